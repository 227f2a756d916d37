#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "circkde/rng.hpp"

namespace circkde {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Observations in radians, each in [0, 2pi).
using AngleSample = std::vector<double>;

/// Canonical representative of theta in [0, 2pi).
[[nodiscard]] double wrap_angle(double theta);

/// Shifts every angle by phi and wraps the result.
[[nodiscard]] AngleSample rotate(std::span<const double> sample, double phi);

/// Signed-free distance on the circle, in [0, pi].
[[nodiscard]] double circular_distance(double a, double b);

struct VonMisesComponent {
  double mu = 0.0;
  double kappa = 0.0;
};

/// Finite mixture of von Mises densities with positive weights summing to one.
class VonMisesMixture {
 public:
  VonMisesMixture(std::vector<double> weights, std::vector<VonMisesComponent> components);

  static VonMisesMixture single(VonMisesComponent component);

  [[nodiscard]] std::size_t size() const { return components_.size(); }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] const std::vector<VonMisesComponent>& components() const { return components_; }

  [[nodiscard]] VonMisesMixture rotated(double phi) const;

 private:
  std::vector<double> weights_;
  std::vector<VonMisesComponent> components_;
};

// Primitive families used by the model catalogue.
struct CircularUniform {};
using VonMises = VonMisesComponent;
struct Cardioid {
  double mu = 0.0;
  double rho = 0.0;  // |rho| <= 1/2
};
struct WrappedNormal {
  double mu = 0.0;
  double rho = 0.0;  // mean resultant length, rho = exp(-sigma^2 / 2)
};
struct WrappedCauchy {
  double mu = 0.0;
  double rho = 0.0;
};
struct WrappedSkewNormal {
  double xi = 0.0;
  double eta = 1.0;
  double lambda = 0.0;
};

using Primitive =
    std::variant<CircularUniform, VonMises, Cardioid, WrappedNormal, WrappedCauchy, WrappedSkewNormal>;

/// Short family tag: CU, vM, CAR, WN, WC, WSN.
[[nodiscard]] std::string family_name(const Primitive& dist);

/// Throws std::invalid_argument when parameters are out of range.
void validate(const Primitive& dist);

[[nodiscard]] double density(const Primitive& dist, double theta);
[[nodiscard]] double draw(const Primitive& dist, Rng& rng);
[[nodiscard]] Primitive rotated(const Primitive& dist, double phi);

struct WeightedPrimitive {
  double weight = 1.0;
  Primitive dist;
};

/// A simulation truth: a weighted list of primitive circular distributions.
class ModelSpec {
 public:
  ModelSpec(std::string id, std::vector<WeightedPrimitive> parts, std::string formula = {});

  [[nodiscard]] const std::string& id() const { return id_; }
  [[nodiscard]] const std::vector<WeightedPrimitive>& parts() const { return parts_; }
  /// Human-readable definition, e.g. "1/2*vM(0,4) + 1/2*vM(pi,4)".
  [[nodiscard]] const std::string& formula() const { return formula_; }

  [[nodiscard]] ModelSpec rotated(double phi) const;

 private:
  std::string id_;
  std::vector<WeightedPrimitive> parts_;
  std::string formula_;
};

[[nodiscard]] double density(const ModelSpec& model, double theta);
[[nodiscard]] double density(const VonMisesMixture& mix, double theta);

[[nodiscard]] AngleSample sample(const ModelSpec& model, std::size_t n, Rng& rng);
[[nodiscard]] AngleSample sample(const VonMisesMixture& mix, std::size_t n, Rng& rng);

/// Analytic second derivative of the mixture density.
[[nodiscard]] double mixture_second_derivative(const VonMisesMixture& mix, double theta);

/// Integral over the circle of the squared second derivative. Empty when the
/// quadrature fails to converge by 2^16 nodes or an evaluation is not finite.
[[nodiscard]] std::optional<double> curvature_integral(const VonMisesMixture& mix);

/// (2pi/points) * sum_k f(2pi k / points).
template <typename F>
double periodic_trapezoid(F&& f, std::size_t points) {
  double sum = 0.0;
  const double h = kTwoPi / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) {
    sum += f(h * static_cast<double>(k));
  }
  return h * sum;
}

}  // namespace circkde
