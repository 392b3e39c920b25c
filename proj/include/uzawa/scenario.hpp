#pragma once

// Subcommand dispatch behind the command-line tool. Exit codes: 0 success,
// 1 operational error, 2 a result that contradicts the growth theorem or one
// of the identities it rests on.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include "uzawa/bgp.hpp"
#include "uzawa/characteristics.hpp"
#include "uzawa/config.hpp"
#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"
#include "uzawa/timescale.hpp"

namespace uzawa {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitTheoremViolated = 2;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"simulate", "verdict", "classify", "pde", "timescale"};
  return names;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

inline std::ofstream open_report(const std::string& name, const ScenarioConfig& cfg,
                                 const std::filesystem::path& out_dir) {
  auto out = open_output(out_dir / cfg.report.value_or(name + "_report.txt"));
  out << "# " << name << " report\n\n[config]\n";
  write_config(cfg, out);
  out << '\n';
  return out;
}

struct IdentityCheck {
  double max_eq1 = 0.0;
  double max_euler = 0.0;
  double tol = 0.0;
  bool ok() const { return max_eq1 <= tol && max_euler <= tol; }
};

inline IdentityCheck check_identities(const Trajectory& traj, const ProductionFunction& pf) {
  IdentityCheck c;
  c.tol = !pf.is_custom() && pf.has_analytic_partials() ? 1e-9 : 1e-5;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    c.max_eq1 = std::max(c.max_eq1, std::abs(traj.eq1_residual[i]));
    c.max_euler = std::max(c.max_euler, std::abs(traj.euler_residual[i]));
  }
  return c;
}

inline int run_simulate(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto pf = cfg.technology();
  const auto traj = simulate(pf, cfg.model, cfg.run.t_end, cfg.run.dt);
  {
    auto csv = open_output(out_dir / cfg.trajectory_csv);
    write_trajectory_csv(traj, csv);
  }
  const auto ids = check_identities(traj, pf);
  auto rep = open_report("simulate", cfg, out_dir);
  const auto last = traj.point(traj.size() - 1);
  rep << "[simulate]\n"
      << "technology = " << pf.describe() << '\n'
      << "points = " << traj.size() << '\n'
      << "K_end = " << format_double(last.K) << '\n'
      << "L_end = " << format_double(last.L) << '\n'
      << "Y_end = " << format_double(last.Y) << '\n'
      << "max_eq1_residual = " << format_double(ids.max_eq1) << '\n'
      << "max_euler_residual = " << format_double(ids.max_euler) << '\n'
      << "identity_tol = " << format_double(ids.tol) << '\n'
      << "identities_hold = " << (ids.ok() ? "true" : "false") << '\n';
  log << "simulate: " << traj.size() << " points written to " << (out_dir / cfg.trajectory_csv).string() << '\n';
  return ids.ok() ? kExitOk : kExitTheoremViolated;
}

inline int run_verdict(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto pf = cfg.technology();
  const auto v = uzawa_verdict(pf, cfg.model, cfg.run);
  {
    auto csv = open_output(out_dir / cfg.trajectory_csv);
    write_trajectory_csv(v.trajectory, csv);
  }
  auto rep = open_report("verdict", cfg, out_dir);
  rep << "[bgp]\n";
  write_report(v.report, rep);
  rep << "\n[verdict]\ntechnology = " << pf.describe() << '\n';
  write_report(v, rep);
  if (v.verdict == Verdict::BGP) {
    rep << "harrod_form_deviation = "
        << format_double(harrod_form_deviation(v.trajectory, pf, v.report, cfg.run.tail_fraction)) << '\n';
  }
  log << "verdict: " << to_string(v.verdict) << " g_hat=" << format_double(v.g_hat)
      << (v.consistent ? "" : " (THEOREM CONSISTENCY VIOLATED)") << '\n';
  for (const auto& msg : v.violations) log << "  " << msg << '\n';
  return v.consistent ? kExitOk : kExitTheoremViolated;
}

inline int run_classify(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto cells = classify_matrix(cfg.classify, cfg.model, cfg.run);
  bool all_consistent = true;
  auto csv = open_output(out_dir / "classify.csv");
  csv << "family,bias,rate,verdict,expected,g_hat,rho_effective,max_drift,horizon,consistent\n";
  for (const auto& cell : cells) {
    const auto& r = cell.result;
    all_consistent = all_consistent && r.consistent;
    csv << cell.family << ',' << to_string(cell.bias) << ',' << format_double(cell.pf.bias().effective_rate())
        << ',' << to_string(r.verdict) << ',' << (r.expected ? to_string(*r.expected) : "") << ','
        << format_double(r.g_hat) << ',' << (r.rho_effective ? format_double(*r.rho_effective) : "") << ','
        << format_double(r.report.max_drift()) << ',' << format_double(r.horizon) << ','
        << (r.consistent ? "true" : "false") << '\n';
  }
  auto rep = open_report("classify", cfg, out_dir);
  rep << "[classify]\ncells = " << cells.size() << '\n'
      << "all_consistent = " << (all_consistent ? "true" : "false") << '\n';
  for (std::size_t i = 0; i < cells.size(); ++i) {
    rep << "cell_" << i << " = " << cells[i].family << ' ' << to_string(cells[i].bias) << ' '
        << to_string(cells[i].result.verdict) << (cells[i].result.consistent ? "" : " INCONSISTENT") << '\n';
  }
  log << "classify: " << cells.size() << " cells, " << (all_consistent ? "all consistent" : "INCONSISTENT")
      << '\n';
  return all_consistent ? kExitOk : kExitTheoremViolated;
}

inline AdvectivePDE make_pde(const ScenarioConfig& cfg) {
  AdvectivePDE pde;
  pde.c = cfg.pde.c;
  pde.L_min = cfg.pde.L_min;
  pde.L_max = cfg.pde.L_max;
  pde.t_horizon = cfg.pde.t_horizon;
  const auto& name = cfg.pde.profile;
  if (name == "linear") {
    pde.profile = [](double x) { return x; };
  } else if (name == "log") {
    pde.profile = [](double x) { return std::log(x); };
  } else if (name == "sqrt") {
    pde.profile = [](double x) { return std::sqrt(x); };
  } else if (name == "kernel") {
    const auto pf = cfg.technology();
    const double K0 = cfg.model.K0;
    pde.profile = [pf, K0](double x) { return pf.kernel(K0, x); };
  } else {
    throw ConfigError("unknown profile '" + name + "'");
  }
  return pde;
}

inline int run_pde(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto pde = make_pde(cfg);
  const auto upwind = solve_upwind(pde, cfg.pde.nL, cfg.pde.nt);
  const auto exact = sample_characteristics(pde, cfg.pde.nL, cfg.pde.nt);
  {
    auto grid = open_output(out_dir / "pde_upwind.csv");
    write_grid_csv(upwind, grid);
  }
  {
    auto cmp = open_output(out_dir / "pde_comparison.csv");
    cmp << "L,t,upwind,characteristics,abs_error\n";
    const std::size_t j = upwind.nt() - 1;
    for (std::size_t i = 0; i < upwind.nL(); ++i) {
      cmp << format_double(upwind.L[i]) << ',' << format_double(upwind.t[j]) << ','
          << format_double(upwind.at(j, i)) << ',' << format_double(exact.at(j, i)) << ','
          << format_double(std::abs(upwind.at(j, i) - exact.at(j, i))) << '\n';
    }
  }

  // Refinement table at the configured time-to-space resolution ratio.
  const double ratio = static_cast<double>(cfg.pde.nt) / static_cast<double>(cfg.pde.nL);
  auto rep = open_report("pde", cfg, out_dir);
  rep << "[pde]\nmax_error = " << format_double(max_abs_difference(upwind, exact)) << '\n';
  double prev_err = 0.0;
  double prev_dxi = 0.0;
  int level = 0;
  for (std::size_t n : {64u, 128u, 256u, 512u}) {
    const auto nt = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(n)));
    const double err = max_abs_difference(solve_upwind(pde, n, nt), sample_characteristics(pde, n, nt));
    const double dxi = (std::log(pde.L_max) - std::log(pde.L_min)) / static_cast<double>(n - 1);
    rep << "level_" << level << " = nL=" << n << " nt=" << nt << " max_error=" << format_double(err);
    if (level > 0 && err > 0.0 && prev_err > 0.0) {
      rep << " order=" << format_double(std::log(prev_err / err) / std::log(prev_dxi / dxi));
    }
    rep << '\n';
    prev_err = err;
    prev_dxi = dxi;
    ++level;
  }
  log << "pde: grid " << cfg.pde.nL << "x" << cfg.pde.nt << " max error "
      << format_double(max_abs_difference(upwind, exact)) << '\n';
  return kExitOk;
}

inline int run_timescale(const ScenarioConfig& cfg, const std::filesystem::path& out_dir, std::ostream& log) {
  const auto pf = cfg.technology();
  ModelParams mp = cfg.model;
  const double k_star = steady_state_effective_capital(pf, mp);
  if (cfg.start_ratio) mp.K0 = *cfg.start_ratio * k_star * mp.L0;
  const auto traj = simulate(pf, mp, cfg.run.t_end, cfg.run.dt);
  const auto report = convergence_rate(traj, pf);
  {
    auto csv = open_output(out_dir / "time_to_fraction.csv");
    write_time_to_fraction_csv(report, csv);
  }
  auto rep = open_report("timescale", cfg, out_dir);
  rep << "[timescale]\ntechnology = " << pf.describe() << '\n' << "K0_used = " << format_double(mp.K0) << '\n';
  write_report(report, rep);
  if (const auto* cd = std::get_if<CobbDouglas>(&pf.family())) {
    const double rho = pf.bias().effective_rate();
    rep << "analytic_cd_rate = " << format_double(analytic_cd_rate(cd->alpha, mp.n, rho, mp.delta)) << '\n';
  }
  for (const auto& [f, t] : report.time_to_fraction) {
    rep << "time_to_" << format_double(f) << " = " << (t ? format_double(*t) : "never") << '\n';
  }
  log << "timescale: lambda_hat=" << format_double(report.lambda_hat)
      << " half_life=" << format_double(report.half_life) << (report.poor_fit ? " (poor fit)" : "") << '\n';
  return kExitOk;
}

}  // namespace detail

/// Runs one subcommand, writing outputs under `out_dir`. Library errors are
/// reported on `log` and mapped to exit code 1.
inline int run_subcommand(const std::string& name, const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& log) {
  try {
    std::filesystem::create_directories(out_dir);
    if (name == "simulate") return detail::run_simulate(cfg, out_dir, log);
    if (name == "verdict") return detail::run_verdict(cfg, out_dir, log);
    if (name == "classify") return detail::run_classify(cfg, out_dir, log);
    if (name == "pde") return detail::run_pde(cfg, out_dir, log);
    if (name == "timescale") return detail::run_timescale(cfg, out_dir, log);
    log << "error: unknown subcommand '" << name << "'\n";
    return kExitError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace uzawa
