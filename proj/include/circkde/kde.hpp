#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "circkde/circular_models.hpp"

namespace circkde {

inline constexpr std::size_t kDefaultGridSize = 1024;

/// Von Mises kernel density estimate with concentration (inverse bandwidth) nu.
class KdeFit {
 public:
  /// Throws std::invalid_argument for an empty sample or nu outside [0, kKappaCap].
  KdeFit(AngleSample sample, double nu);

  [[nodiscard]] const AngleSample& sample() const { return sample_; }
  [[nodiscard]] double nu() const { return nu_; }

  [[nodiscard]] double evaluate(double theta) const;

  /// The same estimate written as an equal-weight von Mises mixture.
  [[nodiscard]] VonMisesMixture as_mixture() const;

 private:
  AngleSample sample_;
  double nu_;
  double norm_;  // 1 / (2 pi n exp(-nu) I0(nu))
};

/// Density values on theta_k = 2 pi k / size.
struct DensityGrid {
  std::vector<double> values;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] double theta(std::size_t k) const {
    return kTwoPi * static_cast<double>(k) / static_cast<double>(values.size());
  }
  /// Periodic trapezoid rule.
  [[nodiscard]] double integral() const;
};

/// Throws unless gridsize is a power of two and at least 8.
void check_gridsize(std::size_t gridsize);

[[nodiscard]] DensityGrid kde_grid(const KdeFit& fit, std::size_t gridsize = kDefaultGridSize);
[[nodiscard]] DensityGrid density_grid(const ModelSpec& model, std::size_t gridsize = kDefaultGridSize);
[[nodiscard]] DensityGrid density_grid(const VonMisesMixture& mix, std::size_t gridsize = kDefaultGridSize);

/// Integrated squared difference by the periodic trapezoid rule.
[[nodiscard]] double ise(const DensityGrid& a, const DensityGrid& b);

/// Precomputed kernel exponents cos(theta_k - Theta_i) - 1 for one sample, so
/// estimates at many bandwidths on the same grid only pay for exp().
class KdeGridEvaluator {
 public:
  KdeGridEvaluator(std::span<const double> sample, std::size_t gridsize);

  [[nodiscard]] DensityGrid grid(double nu) const;

 private:
  std::size_t n_;
  std::size_t gridsize_;
  std::vector<double> exponents_;  // gridsize x n
};

}  // namespace circkde
