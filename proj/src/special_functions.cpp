#include "circkde/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace circkde {

namespace {

// Both branches agree to ~1e-15 relative here.
constexpr double kSeriesSwitchover = 30.0;

void check_arguments(int order, double x) {
  if (order < 0) {
    throw std::invalid_argument("Bessel order must be non-negative, got " + std::to_string(order));
  }
  if (!(x >= 0.0)) {
    throw std::invalid_argument("Bessel argument must be non-negative");
  }
}

// Power series sum_k (x/2)^(2k+r) / (k! (k+r)!), unscaled.
double series(int order, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= order; ++j) {
    term *= half / j;
  }
  if (term == 0.0) {
    return 0.0;
  }
  const double q = half * half;
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (term < sum * 1e-17) {
      break;
    }
  }
  return sum;
}

// Hankel expansion of exp(-x) I_r(x) for large x.
double asymptotic_scaled(int order, double x) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double last = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu - odd * odd) / (8.0 * k * x);
    const double mag = std::abs(term);
    if (mag > last) {
      break;  // series started diverging
    }
    sum += term;
    last = mag;
    if (mag < std::abs(sum) * 1e-17) {
      break;
    }
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double ScaledBessel::reconstruct() const { return value * std::exp(scale_exponent); }

double bessel_i(int order, double x) {
  check_arguments(order, x);
  if (x > kBesselOverflowThreshold) {
    throw std::overflow_error("bessel_i argument above overflow threshold; use bessel_i_scaled");
  }
  if (x <= kSeriesSwitchover) {
    return series(order, x);
  }
  return asymptotic_scaled(order, x) * std::exp(x);
}

ScaledBessel bessel_i_scaled(int order, double x) {
  check_arguments(order, x);
  if (x <= kSeriesSwitchover) {
    return {series(order, x) * std::exp(-x), x};
  }
  return {asymptotic_scaled(order, x), x};
}

double bessel_i_exp(int order, double x) { return bessel_i_scaled(order, x).value; }

double mean_resultant_ratio(double kappa) {
  if (!(kappa >= 0.0)) {
    throw std::invalid_argument("concentration must be non-negative");
  }
  if (kappa == 0.0) {
    return 0.0;
  }
  return bessel_i_exp(1, kappa) / bessel_i_exp(0, kappa);
}

KappaEstimate inverse_mean_resultant_ratio(double rbar) {
  if (!(rbar >= 0.0)) {
    throw std::invalid_argument("mean resultant length must be non-negative");
  }
  if (rbar == 0.0) {
    return {0.0, false};
  }
  static const double cap_ratio = mean_resultant_ratio(kKappaCap);
  if (rbar >= cap_ratio) {
    return {kKappaCap, true};
  }

  // Standard piecewise starting value, then Newton safeguarded by bisection.
  double kappa;
  if (rbar < 0.53) {
    kappa = 2.0 * rbar + rbar * rbar * rbar + 5.0 * std::pow(rbar, 5) / 6.0;
  } else if (rbar < 0.85) {
    kappa = -0.4 + 1.39 * rbar + 0.43 / (1.0 - rbar);
  } else {
    kappa = 1.0 / (rbar * rbar * rbar - 4.0 * rbar * rbar + 3.0 * rbar);
  }

  double lo = 0.0;
  double hi = kKappaCap;
  if (!(kappa > lo && kappa < hi)) {
    kappa = 0.5 * (lo + hi);
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double a = mean_resultant_ratio(kappa);
    const double f = a - rbar;
    if (f > 0.0) {
      hi = kappa;
    } else {
      lo = kappa;
    }
    if (std::abs(f) < 1e-15 || (hi - lo) <= 1e-15 * hi) {
      break;
    }
    const double slope = 1.0 - a / kappa - a * a;
    double next = kappa - f / slope;
    if (!(slope > 0.0) || !(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);
    }
    if (next == kappa) {
      break;
    }
    kappa = next;
  }
  return {kappa, false};
}

}  // namespace circkde
