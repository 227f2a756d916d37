#include "circkde/kde.hpp"

#include <cmath>
#include <stdexcept>

#include "circkde/special_functions.hpp"

namespace circkde {

KdeFit::KdeFit(AngleSample sample, double nu) : sample_(std::move(sample)), nu_(nu) {
  if (sample_.empty()) {
    throw std::invalid_argument("kernel estimate needs a non-empty sample");
  }
  if (!(nu_ >= 0.0 && nu_ <= kKappaCap)) {
    throw std::invalid_argument("kernel concentration must lie in [0, cap]");
  }
  norm_ = 1.0 / (kTwoPi * bessel_i_exp(0, nu_) * static_cast<double>(sample_.size()));
}

double KdeFit::evaluate(double theta) const {
  double sum = 0.0;
  for (double obs : sample_) {
    sum += std::exp(nu_ * (std::cos(theta - obs) - 1.0));
  }
  return norm_ * sum;
}

VonMisesMixture KdeFit::as_mixture() const {
  const double w = 1.0 / static_cast<double>(sample_.size());
  std::vector<double> weights(sample_.size(), w);
  std::vector<VonMisesComponent> comps;
  comps.reserve(sample_.size());
  for (double obs : sample_) {
    comps.push_back({obs, nu_});
  }
  // Equal weights 1/n may miss 1 by a few ulps times n; renormalize the last.
  double partial = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    partial += weights[i];
  }
  weights.back() = 1.0 - partial;
  return VonMisesMixture(std::move(weights), std::move(comps));
}

double DensityGrid::integral() const {
  double sum = 0.0;
  for (double v : values) {
    sum += v;
  }
  return kTwoPi * sum / static_cast<double>(values.size());
}

void check_gridsize(std::size_t gridsize) {
  if (gridsize < 8 || (gridsize & (gridsize - 1)) != 0) {
    throw std::invalid_argument("grid size must be a power of two and at least 8");
  }
}

DensityGrid kde_grid(const KdeFit& fit, std::size_t gridsize) {
  check_gridsize(gridsize);
  DensityGrid grid{std::vector<double>(gridsize)};
  for (std::size_t k = 0; k < gridsize; ++k) {
    grid.values[k] = fit.evaluate(grid.theta(k));
  }
  return grid;
}

DensityGrid density_grid(const ModelSpec& model, std::size_t gridsize) {
  check_gridsize(gridsize);
  DensityGrid grid{std::vector<double>(gridsize)};
  for (std::size_t k = 0; k < gridsize; ++k) {
    grid.values[k] = density(model, grid.theta(k));
  }
  return grid;
}

DensityGrid density_grid(const VonMisesMixture& mix, std::size_t gridsize) {
  check_gridsize(gridsize);
  DensityGrid grid{std::vector<double>(gridsize)};
  for (std::size_t k = 0; k < gridsize; ++k) {
    grid.values[k] = density(mix, grid.theta(k));
  }
  return grid;
}

double ise(const DensityGrid& a, const DensityGrid& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("ISE needs grids of equal size");
  }
  if (a.size() == 0) {
    throw std::invalid_argument("ISE needs non-empty grids");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a.values[k] - b.values[k];
    sum += d * d;
  }
  return kTwoPi * sum / static_cast<double>(a.size());
}

KdeGridEvaluator::KdeGridEvaluator(std::span<const double> sample, std::size_t gridsize)
    : n_(sample.size()), gridsize_(gridsize), exponents_(sample.size() * gridsize) {
  check_gridsize(gridsize);
  if (sample.empty()) {
    throw std::invalid_argument("kernel estimate needs a non-empty sample");
  }
  for (std::size_t k = 0; k < gridsize; ++k) {
    const double theta = kTwoPi * static_cast<double>(k) / static_cast<double>(gridsize);
    for (std::size_t i = 0; i < n_; ++i) {
      exponents_[k * n_ + i] = std::cos(theta - sample[i]) - 1.0;
    }
  }
}

DensityGrid KdeGridEvaluator::grid(double nu) const {
  const double norm = 1.0 / (kTwoPi * bessel_i_exp(0, nu) * static_cast<double>(n_));
  DensityGrid grid{std::vector<double>(gridsize_)};
  for (std::size_t k = 0; k < gridsize_; ++k) {
    const double* row = exponents_.data() + k * n_;
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      sum += std::exp(nu * row[i]);
    }
    grid.values[k] = norm * sum;
  }
  return grid;
}

}  // namespace circkde
