#pragma once

// Transport equation u_t - c*L*u_L = 0, u(L, 0) = F(L), whose characteristics
// L*exp(c*t) = const give the closed form u(L, t) = F(L*exp(c*t)). A
// first-order upwind scheme in xi = ln L serves as an independent oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "uzawa/bgp.hpp"
#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"

namespace uzawa {

struct AdvectivePDE {
  double c = 0.0;
  std::function<double(double)> profile;
  /// Interval on which the initial profile may be evaluated.
  double profile_min = 0.0;
  double profile_max = std::numeric_limits<double>::infinity();
  /// Solution domain in L and time horizon for grid solves.
  double L_min = 1.0;
  double L_max = 2.0;
  double t_horizon = 1.0;
};

inline void validate(const AdvectivePDE& pde) {
  if (!pde.profile) throw ConfigError("initial profile is empty");
  if (!std::isfinite(pde.c)) throw ConfigError("advection rate c must be finite");
  if (!(pde.L_min > 0.0)) throw ConfigError("L_min must be positive: " + format_double(pde.L_min));
  if (!(pde.L_max > pde.L_min) || !std::isfinite(pde.L_max)) {
    throw ConfigError("L_max must exceed L_min: " + format_double(pde.L_max));
  }
  if (!(pde.t_horizon >= 0.0) || !std::isfinite(pde.t_horizon)) {
    throw ConfigError("t_horizon must be >= 0: " + format_double(pde.t_horizon));
  }
  if (!(pde.profile_max > pde.profile_min)) throw ConfigError("empty profile interval");
}

/// F(L*exp(c*t)); throws DomainError when the characteristic foot leaves the
/// profile interval.
inline double solve_characteristics(const AdvectivePDE& pde, double L, double t) {
  if (!(L > 0.0)) throw DomainError("L must be positive: " + format_double(L));
  const double foot = L * std::exp(pde.c * t);
  if (!(foot >= pde.profile_min && foot <= pde.profile_max) || (pde.profile_min == 0.0 && !(foot > 0.0))) {
    throw DomainError("characteristic foot " + format_double(foot) + " outside profile interval [" +
                      format_double(pde.profile_min) + ", " + format_double(pde.profile_max) + "]");
  }
  return pde.profile(foot);
}

/// Values u(L_i, t_j) stored row-major by time: values[j * L.size() + i].
struct GridSolution {
  std::vector<double> L;
  std::vector<double> t;
  std::vector<double> values;

  std::size_t nL() const { return L.size(); }
  std::size_t nt() const { return t.size(); }
  double at(std::size_t j, std::size_t i) const { return values[j * L.size() + i]; }
  double& at(std::size_t j, std::size_t i) { return values[j * L.size() + i]; }
};

namespace detail {

inline GridSolution make_grid(const AdvectivePDE& pde, std::size_t nL, std::size_t nt) {
  GridSolution g;
  const double xi0 = std::log(pde.L_min);
  const double xi1 = std::log(pde.L_max);
  g.L.resize(nL);
  for (std::size_t i = 0; i < nL; ++i) {
    g.L[i] = std::exp(xi0 + (xi1 - xi0) * static_cast<double>(i) / static_cast<double>(nL - 1));
  }
  g.L.front() = pde.L_min;
  g.L.back() = pde.L_max;
  g.t.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) {
    g.t[j] = pde.t_horizon * static_cast<double>(j) / static_cast<double>(nt - 1);
  }
  g.values.assign(nL * nt, 0.0);
  return g;
}

}  // namespace detail

/// Closed form sampled on the same log-spaced grid solve_upwind uses.
inline GridSolution sample_characteristics(const AdvectivePDE& pde, std::size_t nL, std::size_t nt) {
  validate(pde);
  if (nL < 2 || nt < 2) throw ConfigError("grid needs at least 2 points per axis");
  auto g = detail::make_grid(pde, nL, nt);
  for (std::size_t j = 0; j < nt; ++j) {
    for (std::size_t i = 0; i < nL; ++i) g.at(j, i) = solve_characteristics(pde, g.L[i], g.t[j]);
  }
  return g;
}

/// First-order upwind on u_t = c*u_xi (xi = ln L) with the exact
/// characteristic value imposed at the inflow boundary.
inline GridSolution solve_upwind(const AdvectivePDE& pde, std::size_t nL, std::size_t nt) {
  validate(pde);
  if (nL < 16 || nt < 16) throw ConfigError("upwind grid needs nL, nt >= 16");
  auto g = detail::make_grid(pde, nL, nt);

  const double dxi = (std::log(pde.L_max) - std::log(pde.L_min)) / static_cast<double>(nL - 1);
  const double dtau = pde.t_horizon / static_cast<double>(nt - 1);
  const double courant = pde.c * dtau / dxi;
  if (std::abs(courant) > 1.0 + 1e-12) {
    const double floor_nt = 1.0 + std::ceil(std::abs(pde.c) * pde.t_horizon / dxi);
    throw ConfigError("CFL violated (|c|*dtau/dxi = " + format_double(std::abs(courant)) +
                      "); need nt >= " + format_double(floor_nt));
  }

  for (std::size_t i = 0; i < nL; ++i) g.at(0, i) = pde.profile(g.L[i]);
  for (std::size_t j = 0; j + 1 < nt; ++j) {
    if (pde.c > 0.0) {
      // Information travels toward smaller L; inflow at L_max.
      for (std::size_t i = 0; i + 1 < nL; ++i) {
        g.at(j + 1, i) = g.at(j, i) + courant * (g.at(j, i + 1) - g.at(j, i));
      }
      g.at(j + 1, nL - 1) = solve_characteristics(pde, pde.L_max, g.t[j + 1]);
    } else if (pde.c < 0.0) {
      for (std::size_t i = 1; i < nL; ++i) {
        g.at(j + 1, i) = g.at(j, i) + courant * (g.at(j, i) - g.at(j, i - 1));
      }
      g.at(j + 1, 0) = solve_characteristics(pde, pde.L_min, g.t[j + 1]);
    } else {
      for (std::size_t i = 0; i < nL; ++i) g.at(j + 1, i) = g.at(j, i);
    }
  }
  return g;
}

inline double max_abs_difference(const GridSolution& a, const GridSolution& b) {
  if (a.values.size() != b.values.size()) throw ConfigError("grid shapes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) worst = std::max(worst, std::abs(a.values[k] - b.values[k]));
  return worst;
}

/// |u_t - c*L*u_L| / (|u_t| + |c*L*u_L|) for the closed form, derivatives by
/// central differences. Zero when both terms vanish.
inline double pde_residual(const AdvectivePDE& pde, double L, double t) {
  const double hL = fd_step(L);
  const double ht = fd_step(t);
  const double u_t = (solve_characteristics(pde, L, t + ht) - solve_characteristics(pde, L, t - ht)) / (2.0 * ht);
  const double u_L = (solve_characteristics(pde, L + hL, t) - solve_characteristics(pde, L - hL, t)) / (2.0 * hL);
  const double transport = pde.c * L * u_L;
  const double scale = std::abs(u_t) + std::abs(transport);
  if (scale == 0.0) return 0.0;
  return std::abs(u_t - transport) / scale;
}

/// First row: empty corner then the L grid. Each further row: t_j then u(., t_j).
inline void write_grid_csv(const GridSolution& g, std::ostream& out) {
  for (double L : g.L) out << ',' << format_double(L);
  out << '\n';
  for (std::size_t j = 0; j < g.nt(); ++j) {
    out << format_double(g.t[j]);
    for (std::size_t i = 0; i < g.nL(); ++i) out << ',' << format_double(g.at(j, i));
    out << '\n';
  }
}

/// Along each tail-window point, transports the profile x -> F(K(t), x) with
/// rate c = g_hat - n (K frozen along the characteristic) and compares the
/// result at (L(t), t) with recorded output. Returns the max relative deviation.
inline double verify_corollary_on_trajectory(const Trajectory& traj, const ProductionFunction& pf, double g_hat,
                                             const DetectOptions& opts = {}) {
  const auto report = detect_bgp(traj, opts);
  if (report.verdict != Verdict::BGP) {
    throw AnalysisError("trajectory has no balanced growth path; the transported form does not exist");
  }
  double worst = 0.0;
  for (std::size_t i = detail::window_begin(traj, opts.tail_fraction); i < traj.size(); ++i) {
    const double K = traj.K[i];
    AdvectivePDE pde;
    pde.c = g_hat - traj.params.n;
    pde.profile = [&pf, K](double x) { return pf.kernel(K, x); };
    const double u = solve_characteristics(pde, traj.L[i], traj.t[i]);
    worst = std::max(worst, std::abs(u - traj.Y[i]) / traj.Y[i]);
  }
  return worst;
}

}  // namespace uzawa
