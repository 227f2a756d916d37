#pragma once

#include <cstdint>

namespace circkde {

/// Concentrations above this are treated as point masses. Every estimator and
/// fitter clamps to it so downstream Bessel ratios stay finite.
inline constexpr double kKappaCap = 1e5;

/// Largest argument accepted by the unscaled bessel_i.
inline constexpr double kBesselOverflowThreshold = 700.0;

/// I_r(x) written as value * exp(scale_exponent).
struct ScaledBessel {
  double value = 0.0;
  double scale_exponent = 0.0;

  [[nodiscard]] double reconstruct() const;
};

/// Modified Bessel function of the first kind, I_r(x), for integer r >= 0.
/// Throws std::overflow_error above kBesselOverflowThreshold.
[[nodiscard]] double bessel_i(int order, double x);

/// exp(-x) * I_r(x), returned with scale_exponent = x. Finite for any x >= 0.
[[nodiscard]] ScaledBessel bessel_i_scaled(int order, double x);

/// Shorthand for bessel_i_scaled(order, x).value.
[[nodiscard]] double bessel_i_exp(int order, double x);

/// A(kappa) = I_1(kappa) / I_0(kappa).
[[nodiscard]] double mean_resultant_ratio(double kappa);

struct KappaEstimate {
  double kappa = 0.0;
  bool saturated = false;
};

/// Solves A(kappa) = rbar. Targets at or above A(kKappaCap) return the cap
/// with the saturation flag set.
[[nodiscard]] KappaEstimate inverse_mean_resultant_ratio(double rbar);

}  // namespace circkde
