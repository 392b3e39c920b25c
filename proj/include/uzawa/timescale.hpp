#pragma once

// How long the approach to the balanced path takes, measured in capital per
// effective worker.

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "uzawa/dynamics.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"

namespace uzawa {

inline constexpr std::array<double, 4> kGapFractions{0.5, 0.1, 0.05, 0.01};

struct TimescaleReport {
  double lambda_hat = 0.0;
  double half_life = 0.0;
  /// (fraction, first time the gap falls to fraction * initial gap).
  std::vector<std::pair<double, std::optional<double>>> time_to_fraction;
  double fit_start = 0.0;
  double fit_end = 0.0;
  std::size_t fit_points = 0;
  double fit_r2 = 0.0;
  bool poor_fit = false;
  double k_star = 0.0;
  double initial_gap_ratio = 0.0;

  std::optional<double> crossing(double fraction) const {
    for (const auto& [f, t] : time_to_fraction) {
      if (f == fraction) return t;
    }
    return std::nullopt;
  }
};

/// Linearized Cobb-Douglas convergence rate (1-alpha)(n+rho+delta).
inline double analytic_cd_rate(double alpha, double n, double rho, double delta) {
  return (1.0 - alpha) * (n + rho + delta);
}

namespace detail {

inline double labor_augmenting_rate(const ProductionFunction& pf) {
  switch (pf.bias().kind) {
    case BiasKind::None: return 0.0;
    case BiasKind::Harrod: return pf.bias().rate;
    default: throw ConfigError("convergence analysis needs Harrod (or no) technical change");
  }
}

}  // namespace detail

/// Root of s*F(k, 1) = (n + rho + delta)*k by bisection, relative width 1e-12.
inline double steady_state_effective_capital(const ProductionFunction& pf, const ModelParams& mp) {
  const double rho = detail::labor_augmenting_rate(pf);
  const double outflow = mp.n + rho + mp.delta;
  if (!(outflow > 0.0)) throw AnalysisError("n + rho + delta must be positive for a steady state");
  auto excess = [&](double k) { return mp.s * pf.kernel(k, 1.0) - outflow * k; };

  double lo = 1.0;
  double hi = 1.0;
  for (int i = 0; excess(lo) <= 0.0; ++i) {
    if (i > 1000) throw AnalysisError("no steady state: saving never covers effective depreciation");
    lo *= 0.5;
  }
  for (int i = 0; excess(hi) >= 0.0; ++i) {
    if (i > 1000) throw AnalysisError("no steady state: capital accumulates without bound");
    hi *= 2.0;
  }
  for (int i = 0; i < 400 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Fits log|k(t) - k*| against t over the stretch where the gap lies between
/// 50% and 1% of its initial value.
inline TimescaleReport convergence_rate(const Trajectory& traj, const ProductionFunction& pf) {
  const double rho = detail::labor_augmenting_rate(pf);
  const double k_star = steady_state_effective_capital(pf, traj.params);
  if (traj.size() < 3) throw AnalysisError("trajectory too short for a convergence fit");

  std::vector<double> gap(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    gap[i] = std::abs(traj.K[i] / (traj.L[i] * std::exp(rho * traj.t[i])) - k_star);
  }

  TimescaleReport r;
  r.k_star = k_star;
  r.initial_gap_ratio = gap[0] / k_star;
  if (r.initial_gap_ratio < 0.1) {
    throw AnalysisError("trajectory starts within 10% of the steady state (gap ratio " +
                        format_double(r.initial_gap_ratio) + ")");
  }

  auto first_below = [&](double level) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < gap.size(); ++i) {
      if (gap[i] <= level) return i;
    }
    return std::nullopt;
  };
  const auto begin = first_below(0.5 * gap[0]);
  const auto end = first_below(0.01 * gap[0]);
  if (!begin || !end) {
    throw AnalysisError("gap to the steady state does not fall to 1% of its initial value");
  }
  if (*end - *begin < 2) throw AnalysisError("fit window holds fewer than 3 points");

  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0, syy = 0.0;
  const auto m = static_cast<double>(*end - *begin + 1);
  for (std::size_t i = *begin; i <= *end; ++i) {
    const double x = traj.t[i];
    const double y = std::log(gap[i]);
    st += x;
    sy += y;
    stt += x * x;
    sty += x * y;
    syy += y * y;
  }
  const double sxx = stt - st * st / m;
  const double sxy = sty - st * sy / m;
  const double syy_c = syy - sy * sy / m;
  const double slope = sxy / sxx;
  r.lambda_hat = -slope;
  if (!(r.lambda_hat > 0.0)) throw AnalysisError("gap does not decay: fitted rate " + format_double(r.lambda_hat));
  r.half_life = std::log(2.0) / r.lambda_hat;
  r.fit_r2 = syy_c > 0.0 ? (sxy * sxy) / (sxx * syy_c) : 1.0;
  r.poor_fit = r.fit_r2 < 0.99;
  r.fit_start = traj.t[*begin];
  r.fit_end = traj.t[*end];
  r.fit_points = *end - *begin + 1;

  for (double fraction : kGapFractions) {
    const double level = fraction * gap[0];
    std::optional<double> when;
    if (const auto i = first_below(level)) {
      if (*i == 0) {
        when = traj.t[0];
      } else {
        // Interpolate log gap between the bracketing grid points.
        const double y0 = std::log(gap[*i - 1]);
        const double y1 = std::log(gap[*i]);
        const double w = y1 == y0 ? 1.0 : (std::log(level) - y0) / (y1 - y0);
        when = traj.t[*i - 1] + w * (traj.t[*i] - traj.t[*i - 1]);
      }
    }
    r.time_to_fraction.emplace_back(fraction, when);
  }
  return r;
}

inline void write_report(const TimescaleReport& r, std::ostream& out) {
  out << "lambda_hat = " << format_double(r.lambda_hat) << '\n'
      << "half_life = " << format_double(r.half_life) << '\n'
      << "k_star = " << format_double(r.k_star) << '\n'
      << "initial_gap_ratio = " << format_double(r.initial_gap_ratio) << '\n'
      << "fit_start = " << format_double(r.fit_start) << '\n'
      << "fit_end = " << format_double(r.fit_end) << '\n'
      << "fit_points = " << r.fit_points << '\n'
      << "fit_r2 = " << format_double(r.fit_r2) << '\n'
      << "poor_fit = " << (r.poor_fit ? "true" : "false") << '\n';
}

/// `fraction,time` rows; time is empty when the gap never got that small.
inline void write_time_to_fraction_csv(const TimescaleReport& r, std::ostream& out) {
  out << "fraction,time\n";
  for (const auto& [f, t] : r.time_to_fraction) {
    out << format_double(f) << ',' << (t ? format_double(*t) : std::string()) << '\n';
  }
}

}  // namespace uzawa
