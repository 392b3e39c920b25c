#pragma once

// Solow/Swan accumulation K' = s*Y - delta*K, L' = n*L integrated with fixed-step
// RK4, with the growth-accounting decomposition recorded at every grid point.

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"
#include "uzawa/production.hpp"

namespace uzawa {

struct ModelParams {
  double s = 0.2;
  double delta = 0.05;
  double n = 0.01;
  double K0 = 1.0;
  double L0 = 1.0;
};

inline void validate(const ModelParams& mp, const ProductionFunction& pf) {
  if (!(mp.s > 0.0 && mp.s < 1.0)) throw ConfigError("saving rate s out of range (0,1): " + format_double(mp.s));
  if (!(mp.delta >= 0.0) || !std::isfinite(mp.delta)) {
    throw ConfigError("depreciation delta must be >= 0: " + format_double(mp.delta));
  }
  if (!std::isfinite(mp.n)) throw ConfigError("population growth n must be finite");
  if (!(mp.K0 > 0.0) || !std::isfinite(mp.K0)) throw ConfigError("K0 must be positive: " + format_double(mp.K0));
  if (!(mp.L0 > 0.0) || !std::isfinite(mp.L0)) throw ConfigError("L0 must be positive: " + format_double(mp.L0));
  const double decay = mp.n + mp.delta + pf.bias().effective_rate();
  if (!(decay > 0.0)) {
    throw ConfigError("n + delta + bias rate must be positive, got " + format_double(decay));
  }
}

/// One recorded grid point. gL is L'/L, i.e. n.
struct TrajectoryPoint {
  double t;
  double K;
  double L;
  double A;
  double Y;
  double gY;
  double gK;
  double gL;
  double share_K;
  double share_L;
  double eq1_residual;
  double euler_residual;
};

/// Time-gridded record of a simulated economy, stored column-wise.
struct Trajectory {
  ModelParams params;
  std::vector<double> t, K, L, A, Y, gY, gK, share_K, share_L, eq1_residual, euler_residual;

  std::size_t size() const { return t.size(); }
  bool empty() const { return t.empty(); }

  TrajectoryPoint point(std::size_t i) const {
    return {t[i], K[i], L[i], A[i], Y[i], gY[i], gK[i], params.n,
            share_K[i], share_L[i], eq1_residual[i], euler_residual[i]};
  }

  void push(const TrajectoryPoint& p) {
    t.push_back(p.t);
    K.push_back(p.K);
    L.push_back(p.L);
    A.push_back(p.A);
    Y.push_back(p.Y);
    gY.push_back(p.gY);
    gK.push_back(p.gK);
    share_K.push_back(p.share_K);
    share_L.push_back(p.share_L);
    eq1_residual.push_back(p.eq1_residual);
    euler_residual.push_back(p.euler_residual);
  }

  void reserve(std::size_t n) {
    for (auto* v : {&t, &K, &L, &A, &Y, &gY, &gK, &share_K, &share_L, &eq1_residual, &euler_residual}) {
      v->reserve(n);
    }
  }
};

/// Y'/Y - [share_K*K'/K + share_L*L'/L + f_t/Y]. Y' comes from differentiating
/// f along the path (K'/K = gK, L'/L = gL), not from the marginal products,
/// so the identity is checked rather than assumed.
inline double growth_accounting_residual(const ProductionFunction& pf, const TrajectoryPoint& p) {
  const double Y = evaluate(pf, p.K, p.L, p.t);
  const auto mp = marginal_products(pf, p.K, p.L, p.t);
  const double Y_dot = output_time_derivative(pf, p.K, p.L, p.t, p.gK * p.K, p.gL * p.L);
  const double decomposition =
      (mp.f_K * p.K / Y) * p.gK + (mp.f_L * p.L / Y) * p.gL + mp.f_t / Y;
  return Y_dot / Y - decomposition;
}

namespace detail {

inline TrajectoryPoint record_point(const ProductionFunction& pf, const ModelParams& mp, double t,
                                    double K, double L) {
  TrajectoryPoint p{};
  p.t = t;
  p.K = K;
  p.L = L;
  p.A = pf.augmentation(t);
  p.Y = evaluate(pf, K, L, t);
  const auto m = marginal_products(pf, K, L, t);
  p.gK = (mp.s * p.Y - mp.delta * K) / K;
  p.gL = mp.n;
  p.gY = output_time_derivative(pf, K, L, t, p.gK * K, p.gL * L) / p.Y;
  p.share_K = m.f_K * K / p.Y;
  p.share_L = m.f_L * L / p.Y;
  p.eq1_residual = p.gY - (p.share_K * p.gK + p.share_L * p.gL + m.f_t / p.Y);
  p.euler_residual = (m.f_K * K + m.f_L * L - p.Y) / p.Y;
  return p;
}

inline bool all_finite(const TrajectoryPoint& p) {
  for (double v : {p.K, p.L, p.A, p.Y, p.gY, p.gK, p.share_K, p.share_L, p.eq1_residual, p.euler_residual}) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace detail

/// Fixed-step classical RK4 on (K, L). The grid is t_j = j*dt, with the last
/// step shortened to land on t_end.
inline Trajectory simulate(const ProductionFunction& pf, const ModelParams& mp, double t_end, double dt) {
  validate(mp, pf);
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive: " + format_double(t_end));
  if (!(dt > 0.0) || dt > t_end) throw ConfigError("dt must lie in (0, t_end]: " + format_double(dt));

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  auto grid_time = [&](std::size_t j) { return j == steps ? t_end : static_cast<double>(j) * dt; };

  auto rhs = [&](double t, double K, double L) -> std::array<double, 2> {
    if (!(K > 0.0)) {
      throw IntegrationError("capital became non-positive at t=" + format_double(t), t);
    }
    if (!std::isfinite(K) || !std::isfinite(L)) {
      throw OverflowError("state became non-finite at t=" + format_double(t), t);
    }
    const double Y = evaluate(pf, K, L, t);
    if (!std::isfinite(Y)) throw OverflowError("output became non-finite at t=" + format_double(t), t);
    return {mp.s * Y - mp.delta * K, mp.n * L};
  };

  Trajectory traj;
  traj.params = mp;
  traj.reserve(steps + 1);

  double K = mp.K0;
  double L = mp.L0;
  for (std::size_t j = 0;; ++j) {
    const double t = grid_time(j);
    const auto p = detail::record_point(pf, mp, t, K, L);
    if (!detail::all_finite(p)) throw OverflowError("non-finite record at t=" + format_double(t), t);
    traj.push(p);
    if (j == steps) break;

    const double h = grid_time(j + 1) - t;
    const auto k1 = rhs(t, K, L);
    const auto k2 = rhs(t + 0.5 * h, K + 0.5 * h * k1[0], L + 0.5 * h * k1[1]);
    const auto k3 = rhs(t + 0.5 * h, K + 0.5 * h * k2[0], L + 0.5 * h * k2[1]);
    const auto k4 = rhs(t + h, K + h * k3[0], L + h * k3[1]);
    K += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    L += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);

    const double t_next = grid_time(j + 1);
    if (!std::isfinite(K) || !std::isfinite(L)) {
      throw OverflowError("state became non-finite at t=" + format_double(t_next), t_next);
    }
    if (!(K > 0.0) || !(L > 0.0)) {
      throw IntegrationError("stock became non-positive at t=" + format_double(t_next), t_next);
    }
  }
  return traj;
}

/// Capital per effective worker K / (L * exp(rho t)); Harrod bias only.
inline double effective_units(const ProductionFunction& pf, double K, double L, double t) {
  if (pf.bias().kind != BiasKind::Harrod) {
    throw ConfigError("effective_units requires Harrod (labor-augmenting) bias");
  }
  return K / (L * pf.augmentation(t));
}

inline constexpr const char* kTrajectoryCsvHeader =
    "t,K,L,A,Y,gY,gK,share_K,share_L,eq1_residual,euler_residual";

inline void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << kTrajectoryCsvHeader << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto p = traj.point(i);
    out << format_double(p.t) << ',' << format_double(p.K) << ',' << format_double(p.L) << ','
        << format_double(p.A) << ',' << format_double(p.Y) << ',' << format_double(p.gY) << ','
        << format_double(p.gK) << ',' << format_double(p.share_K) << ',' << format_double(p.share_L)
        << ',' << format_double(p.eq1_residual) << ',' << format_double(p.euler_residual) << '\n';
  }
}

}  // namespace uzawa
