#pragma once

// Balanced growth path detection on simulated trajectories and the
// labor-augmentation classification of technologies.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"

namespace uzawa {

enum class Verdict { BGP, NoBGP };

inline const char* to_string(Verdict v) { return v == Verdict::BGP ? "BGP" : "NoBGP"; }

struct DetectOptions {
  double tail_fraction = 0.25;
  double tol = 1e-4;
};

inline constexpr std::size_t kMinWindowPoints = 100;

struct BGPReport {
  /// Mean of gY over the window.
  double g_hat = 0.0;
  /// Limit of gY extrapolated from three equally spaced window points
  /// (Aitken); equals g_hat when gY is not settling geometrically.
  double g_limit = 0.0;
  double window_start = 0.0;
  double window_end = 0.0;
  std::size_t window_points = 0;
  double gY_drift = 0.0;
  double gK_drift = 0.0;
  /// max |share_K - mean| over the window.
  double share_drift = 0.0;
  /// share_drift divided by the window mean of share_K.
  double share_rel_drift = 0.0;
  double tol = 0.0;
  Verdict verdict = Verdict::NoBGP;
  double rho_implied = 0.0;

  double max_drift() const { return std::max({gY_drift, gK_drift, share_drift, share_rel_drift}); }
};

namespace detail {

inline std::size_t window_begin(const Trajectory& traj, double tail_fraction) {
  const double t0 = traj.t.front();
  const double t1 = traj.t.back();
  const double start = t1 - tail_fraction * (t1 - t0);
  return static_cast<std::size_t>(std::lower_bound(traj.t.begin(), traj.t.end(), start) - traj.t.begin());
}

inline double extrapolated_limit(const std::vector<double>& y, std::size_t begin, double fallback) {
  const std::size_t half = (y.size() - 1 - begin) / 2;
  const double y1 = y[begin], y2 = y[begin + half], y3 = y[begin + 2 * half];
  const double d1 = y2 - y1, d2 = y3 - y2;
  if (!(std::abs(d1) > 1e-12) || d1 * d2 <= 0.0 || std::abs(d2) >= 0.9 * std::abs(d1)) return fallback;
  return y3 - d2 * d2 / (d2 - d1);
}

}  // namespace detail

/// Constant-growth test over the trailing `tail_fraction` of the trajectory.
/// A factor share counts as constant only when both its absolute and its
/// relative deviation from the window mean stay within `tol`; an exponentially
/// vanishing share is not a balanced path however small it has become.
inline BGPReport detect_bgp(const Trajectory& traj, double tail_fraction, double tol) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
    throw ConfigError("tail_fraction out of range (0,1): " + format_double(tail_fraction));
  }
  if (!(tol > 0.0)) throw ConfigError("tol must be positive: " + format_double(tol));
  if (traj.size() < 2) throw AnalysisError("trajectory too short for BGP detection");

  const std::size_t begin = detail::window_begin(traj, tail_fraction);
  const std::size_t count = traj.size() - begin;
  if (count < kMinWindowPoints) {
    throw AnalysisError("tail window has " + std::to_string(count) + " points, need at least " +
                        std::to_string(kMinWindowPoints));
  }

  BGPReport r;
  r.window_start = traj.t[begin];
  r.window_end = traj.t.back();
  r.window_points = count;
  r.tol = tol;

  double sum_g = 0.0;
  double sum_share = 0.0;
  for (std::size_t i = begin; i < traj.size(); ++i) {
    sum_g += traj.gY[i];
    sum_share += traj.share_K[i];
  }
  r.g_hat = sum_g / static_cast<double>(count);
  r.g_limit = detail::extrapolated_limit(traj.gY, begin, r.g_hat);
  const double share_mean = sum_share / static_cast<double>(count);

  for (std::size_t i = begin; i < traj.size(); ++i) {
    r.gY_drift = std::max(r.gY_drift, std::abs(traj.gY[i] - r.g_hat));
    r.gK_drift = std::max(r.gK_drift, std::abs(traj.gK[i] - r.g_hat));
    r.share_drift = std::max(r.share_drift, std::abs(traj.share_K[i] - share_mean));
  }
  r.share_rel_drift = share_mean > 0.0 ? r.share_drift / share_mean : std::numeric_limits<double>::infinity();
  r.verdict = r.max_drift() <= tol ? Verdict::BGP : Verdict::NoBGP;
  r.rho_implied = r.g_hat - traj.params.n;
  return r;
}

inline BGPReport detect_bgp(const Trajectory& traj, const DetectOptions& opts = {}) {
  return detect_bgp(traj, opts.tail_fraction, opts.tol);
}

/// [n + f_t/(f_L*L)] - gY at a recorded point; zero on a balanced path.
inline double bgp_condition_residual(const ProductionFunction& pf, const TrajectoryPoint& p) {
  const auto mp = marginal_products(pf, p.K, p.L, p.t);
  const double labor_income = mp.f_L * p.L;
  if (!(std::abs(labor_income) > 1e3 * std::numeric_limits<double>::min())) {
    throw NumericalError("f_L*L underflows at t=" + format_double(p.t));
  }
  return p.gL + mp.f_t / labor_income - p.gY;
}

/// bgp_condition_residual over the tail window.
inline std::vector<double> bgp_condition_series(const ProductionFunction& pf, const Trajectory& traj,
                                                double tail_fraction) {
  std::vector<double> out;
  for (std::size_t i = detail::window_begin(traj, tail_fraction); i < traj.size(); ++i) {
    out.push_back(bgp_condition_residual(pf, traj.point(i)));
  }
  return out;
}

/// Max relative deviation of recorded Y from F(K, L*exp(c*t)) over the tail
/// window, with c = g_limit - n taken from `report`. The window mean lags the
/// limit on slow transitions and the error grows like (g_hat - g) * t.
inline double harrod_form_deviation(const Trajectory& traj, const ProductionFunction& pf,
                                    const BGPReport& report, double tail_fraction) {
  if (report.verdict != Verdict::BGP) {
    throw AnalysisError("no balanced growth path: output has no labor-augmenting representation");
  }
  const double c = report.g_limit - traj.params.n;
  double worst = 0.0;
  for (std::size_t i = detail::window_begin(traj, tail_fraction); i < traj.size(); ++i) {
    const double predicted = pf.kernel(traj.K[i], traj.L[i] * std::exp(c * traj.t[i]));
    worst = std::max(worst, std::abs(predicted - traj.Y[i]) / traj.Y[i]);
  }
  return worst;
}

inline double verify_harrod_form(const Trajectory& traj, const ProductionFunction& pf,
                                 const DetectOptions& opts = {}) {
  return harrod_form_deviation(traj, pf, detect_bgp(traj, opts), opts.tail_fraction);
}

inline void write_report(const BGPReport& r, std::ostream& out) {
  out << "g_hat = " << format_double(r.g_hat) << '\n'
      << "g_limit = " << format_double(r.g_limit) << '\n'
      << "window_start = " << format_double(r.window_start) << '\n'
      << "window_end = " << format_double(r.window_end) << '\n'
      << "window_points = " << r.window_points << '\n'
      << "gY_drift = " << format_double(r.gY_drift) << '\n'
      << "gK_drift = " << format_double(r.gK_drift) << '\n'
      << "share_drift = " << format_double(r.share_drift) << '\n'
      << "share_rel_drift = " << format_double(r.share_rel_drift) << '\n'
      << "tol = " << format_double(r.tol) << '\n'
      << "verdict = " << to_string(r.verdict) << '\n'
      << "rho_implied = " << format_double(r.rho_implied) << '\n';
}

struct UzawaSettings {
  double t_end = 600.0;
  double dt = 0.05;
  double tail_fraction = 0.25;
  double tol = 1e-4;
  /// Re-run a NoBGP scenario at 2*t_end; it stays NoBGP only if the drift
  /// persists, so slow convergence is not mistaken for divergence.
  bool confirm_by_doubling = true;
};

struct UzawaVerdict {
  Verdict verdict = Verdict::NoBGP;
  double g_hat = 0.0;
  double rho_implied = 0.0;
  /// Labor-augmenting rate the technology is equivalent to, if any.
  std::optional<double> rho_effective;
  /// What the steady-state growth theorem demands; empty when it makes no
  /// prediction (custom kernel with non-Harrod bias).
  std::optional<Verdict> expected;
  bool consistent = true;
  std::vector<std::string> violations;

  BGPReport report;
  Trajectory trajectory;
  double horizon = 0.0;
  bool doubled = false;
  double first_max_drift = 0.0;
  std::optional<double> divergence_time;
  double max_eq1_residual = 0.0;
  double max_euler_residual = 0.0;
  double identity_tol = 0.0;
};

namespace detail {

struct HorizonRun {
  Trajectory traj;
  double horizon;
  std::optional<double> divergence_time;
};

/// Simulates to t_end; an explosive run is cut at 90% of the time it overflowed.
inline HorizonRun run_horizon(const ProductionFunction& pf, const ModelParams& mp, double t_end, double dt) {
  try {
    return {simulate(pf, mp, t_end, dt), t_end, std::nullopt};
  } catch (const OverflowError& e) {
    const double cut = std::floor(0.9 * e.time() / dt) * dt;
    if (!(cut >= dt)) throw;
    return {simulate(pf, mp, cut, dt), cut, e.time()};
  }
}

}  // namespace detail

/// Simulates, detects a balanced path and checks the outcome against the
/// theorem: Harrod or no bias (or any bias on Cobb-Douglas, via the
/// equivalent labor-augmenting rate) must give BGP with g = n + rho; any other
/// bias on a built-in non-Cobb-Douglas family must give NoBGP. The growth
/// accounting and Euler identities must hold along the whole path.
inline UzawaVerdict uzawa_verdict(const ProductionFunction& pf, const ModelParams& mp,
                                  const UzawaSettings& settings = {}) {
  auto run = detail::run_horizon(pf, mp, settings.t_end, settings.dt);
  auto report = detect_bgp(run.traj, settings.tail_fraction, settings.tol);

  UzawaVerdict v;
  v.first_max_drift = report.max_drift();
  if (report.verdict == Verdict::NoBGP && settings.confirm_by_doubling) {
    auto longer = detail::run_horizon(pf, mp, 2.0 * settings.t_end, settings.dt);
    report = detect_bgp(longer.traj, settings.tail_fraction, settings.tol);
    run = std::move(longer);
    v.doubled = true;
  }

  v.verdict = report.verdict;
  v.g_hat = report.g_hat;
  v.rho_implied = report.rho_implied;
  v.report = report;
  v.horizon = run.horizon;
  v.divergence_time = run.divergence_time;
  v.rho_effective = equivalent_harrod_rate(pf);
  if (v.rho_effective) {
    v.expected = Verdict::BGP;
  } else if (!pf.is_custom()) {
    v.expected = Verdict::NoBGP;
  }

  const bool exact_path_derivative = !pf.is_custom();
  v.identity_tol = exact_path_derivative && pf.has_analytic_partials() ? 1e-9 : 1e-5;
  for (std::size_t i = 0; i < run.traj.size(); ++i) {
    v.max_eq1_residual = std::max(v.max_eq1_residual, std::abs(run.traj.eq1_residual[i]));
    v.max_euler_residual = std::max(v.max_euler_residual, std::abs(run.traj.euler_residual[i]));
  }
  v.trajectory = std::move(run.traj);

  if (v.expected && *v.expected != v.verdict) {
    v.violations.push_back(std::string("verdict ") + to_string(v.verdict) + " but theorem requires " +
                           to_string(*v.expected));
  }
  if (v.verdict == Verdict::BGP && v.rho_effective) {
    const double target = mp.n + *v.rho_effective;
    if (std::abs(v.g_hat - target) > settings.tol) {
      v.violations.push_back("g_hat " + format_double(v.g_hat) + " differs from n + rho = " +
                             format_double(target));
    }
  }
  if (!(v.max_eq1_residual <= v.identity_tol)) {
    v.violations.push_back("growth accounting identity violated: max residual " +
                           format_double(v.max_eq1_residual));
  }
  if (!(v.max_euler_residual <= v.identity_tol)) {
    v.violations.push_back("Euler identity violated: max residual " + format_double(v.max_euler_residual));
  }
  v.consistent = v.violations.empty();
  return v;
}

inline void write_report(const UzawaVerdict& v, std::ostream& out) {
  out << "verdict = " << to_string(v.verdict) << '\n'
      << "g_hat = " << format_double(v.g_hat) << '\n'
      << "rho_implied = " << format_double(v.rho_implied) << '\n'
      << "rho_effective = " << (v.rho_effective ? format_double(*v.rho_effective) : "none") << '\n'
      << "expected = " << (v.expected ? to_string(*v.expected) : "unspecified") << '\n'
      << "consistent = " << (v.consistent ? "true" : "false") << '\n'
      << "horizon = " << format_double(v.horizon) << '\n'
      << "doubled_horizon = " << (v.doubled ? "true" : "false") << '\n'
      << "first_max_drift = " << format_double(v.first_max_drift) << '\n'
      << "divergence_time = " << (v.divergence_time ? format_double(*v.divergence_time) : "none") << '\n'
      << "max_eq1_residual = " << format_double(v.max_eq1_residual) << '\n'
      << "max_euler_residual = " << format_double(v.max_euler_residual) << '\n'
      << "identity_tol = " << format_double(v.identity_tol) << '\n';
  for (std::size_t i = 0; i < v.violations.size(); ++i) {
    out << "violation_" << i << " = " << v.violations[i] << '\n';
  }
}

struct ClassificationSettings {
  double alpha = 1.0 / 3.0;
  double share = 0.4;
  double sigma_low = 0.5;
  double sigma_high = 2.0;
  double rate = 0.02;
};

struct ClassificationCell {
  std::string family;
  BiasKind bias;
  ProductionFunction pf;
  UzawaVerdict result;
};

/// {CobbDouglas, CES(sigma_low), CES(sigma_high)} x {None, Harrod, Hicks, Solow}.
inline std::vector<ProductionFunction> classification_technologies(const ClassificationSettings& cs) {
  const TechBias biases[] = {TechBias::none(), TechBias::harrod(cs.rate), TechBias::hicks(cs.rate),
                             TechBias::solow(cs.rate)};
  std::vector<ProductionFunction> out;
  for (int f = 0; f < 3; ++f) {
    for (const auto& b : biases) {
      if (f == 0) out.push_back(ProductionFunction::cobb_douglas(cs.alpha, b));
      if (f == 1) out.push_back(ProductionFunction::ces(cs.share, cs.sigma_low, b));
      if (f == 2) out.push_back(ProductionFunction::ces(cs.share, cs.sigma_high, b));
    }
  }
  return out;
}

/// Runs every cell concurrently; results come back in matrix order.
inline std::vector<ClassificationCell> classify_matrix(const ClassificationSettings& cs, const ModelParams& mp,
                                                       const UzawaSettings& settings) {
  const auto techs = classification_technologies(cs);
  std::vector<std::future<UzawaVerdict>> jobs;
  jobs.reserve(techs.size());
  for (const auto& pf : techs) {
    jobs.push_back(std::async(std::launch::async, [&pf, &mp, &settings] { return uzawa_verdict(pf, mp, settings); }));
  }
  std::vector<ClassificationCell> cells;
  for (std::size_t i = 0; i < techs.size(); ++i) {
    const auto& pf = techs[i];
    std::string family;
    if (const auto* ces = std::get_if<Ces>(&pf.family())) {
      family = "ces(sigma=" + format_double(ces->sigma) + ")";
    } else {
      family = "cobb_douglas";
    }
    cells.push_back({family, pf.bias().kind, pf, jobs[i].get()});
  }
  return cells;
}

}  // namespace uzawa
