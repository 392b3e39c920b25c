#pragma once

// Constant-returns production technologies Y = f(K, L, t) with an explicit
// exponential technical-change bias.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "uzawa/dual.hpp"
#include "uzawa/errors.hpp"
#include "uzawa/format.hpp"

namespace uzawa {

enum class BiasKind { None, Harrod, Solow, Hicks };

inline const char* to_string(BiasKind kind) {
  switch (kind) {
    case BiasKind::None: return "none";
    case BiasKind::Harrod: return "harrod";
    case BiasKind::Solow: return "solow";
    case BiasKind::Hicks: return "hicks";
  }
  return "?";
}

/// Technical change A(t) = exp(rate * t) entering as a labor (Harrod),
/// capital (Solow) or output (Hicks) multiplier.
struct TechBias {
  BiasKind kind = BiasKind::None;
  double rate = 0.0;

  static TechBias none() { return {}; }
  static TechBias harrod(double rate) { return {BiasKind::Harrod, rate}; }
  static TechBias solow(double rate) { return {BiasKind::Solow, rate}; }
  static TechBias hicks(double rate) { return {BiasKind::Hicks, rate}; }

  /// Rate actually applied; zero when kind is None.
  double effective_rate() const { return kind == BiasKind::None ? 0.0 : rate; }
};

struct CobbDouglas {
  double alpha;
};

/// F = (share*K^r + (1-share)*L^r)^(1/r), r = (sigma-1)/sigma.
struct Ces {
  double share;
  double sigma;

  double exponent() const { return (sigma - 1.0) / sigma; }
};

/// User-supplied kernel F(K, L). Partials come from `gradient` when given,
/// otherwise from central differences.
struct Custom {
  using Kernel = std::function<double(double, double)>;
  using Gradient = std::function<std::array<double, 2>(double, double)>;

  Kernel kernel;
  Gradient gradient;
  std::string name = "custom";
};

using Family = std::variant<CobbDouglas, Ces, Custom>;

struct MarginalProducts {
  double f_K;
  double f_L;
  double f_t;
};

struct FactorShares {
  double capital;
  double labor;
};

/// Central-difference step for a coordinate at x: max(|x|,1)*eps^(1/3),
/// shrunk so that x - h stays positive.
inline double fd_step(double x) {
  static const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  const double h = std::max(std::abs(x), 1.0) * cbrt_eps;
  return x > 0.0 ? std::min(h, 0.5 * x) : h;
}

class ProductionFunction {
 public:
  static ProductionFunction cobb_douglas(double alpha, TechBias bias = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ConfigError("alpha out of range (0,1): " + format_double(alpha));
    }
    return ProductionFunction(CobbDouglas{alpha}, checked(bias));
  }

  /// sigma == 1 is routed to Cobb-Douglas with alpha = share.
  static ProductionFunction ces(double share, double sigma, TechBias bias = {}) {
    if (!(share > 0.0 && share < 1.0)) {
      throw ConfigError("share out of range (0,1): " + format_double(share));
    }
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw ConfigError("sigma must be positive and finite: " + format_double(sigma));
    }
    if (std::abs(sigma - 1.0) <= 1e-12) return cobb_douglas(share, bias);
    return ProductionFunction(Ces{share, sigma}, checked(bias));
  }

  static ProductionFunction custom(Custom::Kernel kernel, TechBias bias = {},
                                   Custom::Gradient gradient = {},
                                   std::string name = "custom") {
    if (!kernel) throw ConfigError("custom production kernel is empty");
    return ProductionFunction(Custom{std::move(kernel), std::move(gradient), std::move(name)},
                              checked(bias));
  }

  const Family& family() const { return family_; }
  const TechBias& bias() const { return bias_; }

  ProductionFunction with_bias(TechBias bias) const {
    return ProductionFunction(family_, checked(bias));
  }

  bool is_cobb_douglas() const { return std::holds_alternative<CobbDouglas>(family_); }
  bool is_custom() const { return std::holds_alternative<Custom>(family_); }

  /// True when marginal products are closed-form (built-in families or a
  /// custom kernel that ships its own gradient).
  bool has_analytic_partials() const {
    if (const auto* c = std::get_if<Custom>(&family_)) return static_cast<bool>(c->gradient);
    return true;
  }

  /// Augmentation factor A(t) = exp(rate * t); 1 without bias.
  double augmentation(double t) const { return std::exp(bias_.effective_rate() * t); }

  /// Unbiased kernel F(K, L).
  double kernel(double K, double L) const {
    if (const auto* c = std::get_if<Custom>(&family_)) return c->kernel(K, L);
    return kernel_as<double>(K, L);
  }

  /// Closed-form kernel for the built-in families; works on double and Dual.
  template <typename T>
  T kernel_as(T K, T L) const {
    using std::pow;
    if (const auto* cd = std::get_if<CobbDouglas>(&family_)) {
      return pow(K, cd->alpha) * pow(L, 1.0 - cd->alpha);
    }
    if (const auto* ces = std::get_if<Ces>(&family_)) {
      const double r = ces->exponent();
      return pow(T(ces->share) * pow(K, r) + T(1.0 - ces->share) * pow(L, r), 1.0 / r);
    }
    throw ConfigError("kernel_as is defined for built-in families only");
  }

  /// (dF/dK, dF/dL) of the unbiased kernel.
  std::array<double, 2> kernel_gradient(double K, double L) const {
    if (const auto* cd = std::get_if<CobbDouglas>(&family_)) {
      const double F = kernel_as<double>(K, L);
      return {cd->alpha * F / K, (1.0 - cd->alpha) * F / L};
    }
    if (const auto* ces = std::get_if<Ces>(&family_)) {
      const double F = kernel_as<double>(K, L);
      const double q = 1.0 - ces->exponent();
      return {ces->share * std::pow(F / K, q), (1.0 - ces->share) * std::pow(F / L, q)};
    }
    const auto& c = std::get<Custom>(family_);
    if (c.gradient) return c.gradient(K, L);
    const double hK = fd_step(K);
    const double hL = fd_step(L);
    // Divide by the representable spacing, not 2h.
    const double Kp = K + hK, Km = K - hK, Lp = L + hL, Lm = L - hL;
    return {(c.kernel(Kp, L) - c.kernel(Km, L)) / (Kp - Km), (c.kernel(K, Lp) - c.kernel(K, Lm)) / (Lp - Lm)};
  }

  /// Biased value f(K, L, t) on any scalar supported by kernel_as.
  template <typename T>
  T value_as(T K, T L, T t) const {
    using std::exp;
    const double rate = bias_.effective_rate();
    switch (bias_.kind) {
      case BiasKind::None: return kernel_as<T>(K, L);
      case BiasKind::Harrod: return kernel_as<T>(K, L * exp(T(rate) * t));
      case BiasKind::Solow: return kernel_as<T>(K * exp(T(rate) * t), L);
      case BiasKind::Hicks: return exp(T(rate) * t) * kernel_as<T>(K, L);
    }
    return kernel_as<T>(K, L);
  }

  std::string describe() const {
    std::string s;
    if (const auto* cd = std::get_if<CobbDouglas>(&family_)) {
      s = "cobb_douglas(alpha=" + format_double(cd->alpha) + ")";
    } else if (const auto* ces = std::get_if<Ces>(&family_)) {
      s = "ces(share=" + format_double(ces->share) + ",sigma=" + format_double(ces->sigma) + ")";
    } else {
      s = std::get<Custom>(family_).name;
    }
    return s + " bias=" + to_string(bias_.kind) + "(" + format_double(bias_.effective_rate()) + ")";
  }

 private:
  ProductionFunction(Family family, TechBias bias) : family_(std::move(family)), bias_(bias) {}

  static TechBias checked(TechBias bias) {
    if (!std::isfinite(bias.rate)) throw ConfigError("technical change rate must be finite");
    if (bias.kind == BiasKind::None) bias.rate = 0.0;
    return bias;
  }

  Family family_;
  TechBias bias_;
};

namespace detail {

inline void check_point(double K, double L, double t) {
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("capital must be positive, got " + format_double(K));
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("labor must be positive, got " + format_double(L));
  if (!std::isfinite(t)) throw DomainError("time must be finite");
}

}  // namespace detail

inline double evaluate(const ProductionFunction& pf, double K, double L, double t) {
  detail::check_point(K, L, t);
  const double A = pf.augmentation(t);
  switch (pf.bias().kind) {
    case BiasKind::None: return pf.kernel(K, L);
    case BiasKind::Harrod: return pf.kernel(K, L * A);
    case BiasKind::Solow: return pf.kernel(K * A, L);
    case BiasKind::Hicks: return A * pf.kernel(K, L);
  }
  return pf.kernel(K, L);
}

inline MarginalProducts marginal_products(const ProductionFunction& pf, double K, double L, double t) {
  detail::check_point(K, L, t);
  const double A = pf.augmentation(t);
  const double rate = pf.bias().effective_rate();
  switch (pf.bias().kind) {
    case BiasKind::None: {
      const auto [F1, F2] = pf.kernel_gradient(K, L);
      return {F1, F2, 0.0};
    }
    case BiasKind::Harrod: {
      const double E = L * A;
      const auto [F1, F2] = pf.kernel_gradient(K, E);
      return {F1, A * F2, rate * E * F2};
    }
    case BiasKind::Solow: {
      const double C = K * A;
      const auto [F1, F2] = pf.kernel_gradient(C, L);
      return {A * F1, F2, rate * C * F1};
    }
    case BiasKind::Hicks: {
      const auto [F1, F2] = pf.kernel_gradient(K, L);
      return {A * F1, A * F2, rate * A * pf.kernel(K, L)};
    }
  }
  return {0.0, 0.0, 0.0};
}

inline FactorShares factor_shares(const ProductionFunction& pf, double K, double L, double t) {
  const double Y = evaluate(pf, K, L, t);
  const auto mp = marginal_products(pf, K, L, t);
  return {mp.f_K * K / Y, mp.f_L * L / Y};
}

/// (f_K*K + f_L*L - Y) / Y; zero for degree-1 technologies.
inline double euler_residual(const ProductionFunction& pf, double K, double L, double t) {
  const double Y = evaluate(pf, K, L, t);
  const auto mp = marginal_products(pf, K, L, t);
  return (mp.f_K * K + mp.f_L * L - Y) / Y;
}

/// max over lambda of |f(lambda K, lambda L, t) - lambda f(K, L, t)| / (lambda f(K, L, t)).
inline double homogeneity_check(const ProductionFunction& pf, double K, double L, double t,
                                std::span<const double> lambdas) {
  if (lambdas.empty()) throw ConfigError("homogeneity_check needs at least one lambda");
  const double Y = evaluate(pf, K, L, t);
  double worst = 0.0;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw DomainError("scaling factor must be positive, got " + format_double(lambda));
    const double scaled = evaluate(pf, lambda * K, lambda * L, t);
    worst = std::max(worst, std::abs(scaled - lambda * Y) / (lambda * Y));
  }
  return worst;
}

/// dY/dt along the path with velocities (K_dot, L_dot). Built-in families
/// propagate the derivative through the closed form with dual numbers;
/// custom kernels use a central difference in time.
inline double output_time_derivative(const ProductionFunction& pf, double K, double L, double t,
                                     double K_dot, double L_dot) {
  detail::check_point(K, L, t);
  if (!pf.is_custom()) {
    return pf.value_as<Dual>(Dual(K, K_dot), Dual(L, L_dot), Dual(t, 1.0)).d;
  }
  double h = fd_step(t);
  if (K_dot != 0.0) h = std::min(h, 0.5 * K / std::abs(K_dot));
  if (L_dot != 0.0) h = std::min(h, 0.5 * L / std::abs(L_dot));
  const double up = evaluate(pf, K + h * K_dot, L + h * L_dot, t + h);
  const double down = evaluate(pf, K - h * K_dot, L - h * L_dot, t - h);
  return (up - down) / (2.0 * h);
}

/// Labor-augmenting rate that reproduces this technology exactly, when one
/// exists in closed form: Harrod rho -> rho, none -> 0, and for Cobb-Douglas
/// Hicks gamma -> gamma/(1-alpha), Solow gamma -> gamma*alpha/(1-alpha).
inline std::optional<double> equivalent_harrod_rate(const ProductionFunction& pf) {
  const auto& bias = pf.bias();
  switch (bias.kind) {
    case BiasKind::None: return 0.0;
    case BiasKind::Harrod: return bias.rate;
    case BiasKind::Hicks:
    case BiasKind::Solow: break;
  }
  const auto* cd = std::get_if<CobbDouglas>(&pf.family());
  if (cd == nullptr) return std::nullopt;
  if (bias.kind == BiasKind::Hicks) return bias.rate / (1.0 - cd->alpha);
  return bias.rate * cd->alpha / (1.0 - cd->alpha);
}

}  // namespace uzawa
