#include "circkde/circular_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "circkde/special_functions.hpp"

namespace circkde {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double von_mises_density(const VonMises& d, double theta) {
  return std::exp(d.kappa * (std::cos(theta - d.mu) - 1.0)) / (kTwoPi * bessel_i_exp(0, d.kappa));
}

// Number of 2pi translates on each side so that the neglected tail of a
// linear density with scale `sigma` is below ~1e-12.
int wrap_terms(double sigma) {
  return std::max(6, static_cast<int>(std::ceil(7.5 * sigma / kTwoPi)) + 1);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double wrapped_normal_density(const WrappedNormal& d, double theta) {
  if (d.rho == 0.0) {
    return 1.0 / kTwoPi;
  }
  const double sigma = std::sqrt(-2.0 * std::log(d.rho));
  const int terms = wrap_terms(sigma);
  const double base = wrap_angle(theta - d.mu);
  double sum = 0.0;
  for (int k = -terms; k <= terms; ++k) {
    sum += normal_pdf((base + kTwoPi * k) / sigma);
  }
  return sum / sigma;
}

double wrapped_skew_normal_density(const WrappedSkewNormal& d, double theta) {
  const int terms = wrap_terms(d.eta);
  const double base = wrap_angle(theta - d.xi);
  double sum = 0.0;
  for (int k = -terms; k <= terms; ++k) {
    const double z = (base + kTwoPi * k) / d.eta;
    sum += 2.0 * normal_pdf(z) * normal_cdf(d.lambda * z);
  }
  return sum / d.eta;
}

// Best & Fisher (1979) rejection sampler.
double draw_von_mises(const VonMises& d, Rng& rng) {
  if (d.kappa < 1e-8) {
    return kTwoPi * rng.uniform();
  }
  const double kappa = d.kappa;
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double z = std::cos(kPi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0 || std::log(c / u2) + 1.0 - c >= 0.0) {
      break;
    }
  }
  const double u3 = rng.uniform();
  const double offset = std::acos(std::clamp(f, -1.0, 1.0));
  return wrap_angle(u3 > 0.5 ? d.mu + offset : d.mu - offset);
}

void check_rho(double rho, const char* family) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument(std::string(family) + " rho must lie in [0, 1)");
  }
}

}  // namespace

double wrap_angle(double theta) {
  double w = std::fmod(theta, kTwoPi);
  if (w < 0.0) {
    w += kTwoPi;
  }
  // fmod of a tiny negative value can round up to exactly 2pi
  if (w >= kTwoPi) {
    w = 0.0;
  }
  return w;
}

AngleSample rotate(std::span<const double> sample, double phi) {
  AngleSample out;
  out.reserve(sample.size());
  for (double t : sample) {
    out.push_back(wrap_angle(t + phi));
  }
  return out;
}

double circular_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

VonMisesMixture::VonMisesMixture(std::vector<double> weights, std::vector<VonMisesComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) {
    throw std::invalid_argument("mixture needs at least one component");
  }
  if (weights_.size() != components_.size()) {
    throw std::invalid_argument("mixture weights and components differ in length");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0)) {
      throw std::invalid_argument("mixture weights must be positive");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mixture weights must sum to 1");
  }
  for (auto& c : components_) {
    if (!(c.kappa >= 0.0 && c.kappa <= kKappaCap)) {
      throw std::invalid_argument("von Mises concentration outside [0, cap]");
    }
    c.mu = wrap_angle(c.mu);
  }
}

VonMisesMixture VonMisesMixture::single(VonMisesComponent component) {
  return VonMisesMixture({1.0}, {component});
}

VonMisesMixture VonMisesMixture::rotated(double phi) const {
  auto comps = components_;
  for (auto& c : comps) {
    c.mu = wrap_angle(c.mu + phi);
  }
  return VonMisesMixture(weights_, std::move(comps));
}

std::string family_name(const Primitive& dist) {
  return std::visit(overloaded{
                        [](const CircularUniform&) { return std::string("CU"); },
                        [](const VonMises&) { return std::string("vM"); },
                        [](const Cardioid&) { return std::string("CAR"); },
                        [](const WrappedNormal&) { return std::string("WN"); },
                        [](const WrappedCauchy&) { return std::string("WC"); },
                        [](const WrappedSkewNormal&) { return std::string("WSN"); },
                    },
                    dist);
}

void validate(const Primitive& dist) {
  std::visit(overloaded{
                 [](const CircularUniform&) {},
                 [](const VonMises& d) {
                   if (!(d.kappa >= 0.0 && d.kappa <= kKappaCap)) {
                     throw std::invalid_argument("vM kappa outside [0, cap]");
                   }
                 },
                 [](const Cardioid& d) {
                   if (!(std::abs(d.rho) <= 0.5)) {
                     throw std::invalid_argument("cardioid requires |rho| <= 1/2");
                   }
                 },
                 [](const WrappedNormal& d) { check_rho(d.rho, "WN"); },
                 [](const WrappedCauchy& d) { check_rho(d.rho, "WC"); },
                 [](const WrappedSkewNormal& d) {
                   if (!(d.eta > 0.0) || !std::isfinite(d.lambda)) {
                     throw std::invalid_argument("WSN requires eta > 0 and finite lambda");
                   }
                 },
             },
             dist);
}

double density(const Primitive& dist, double theta) {
  return std::visit(
      overloaded{
          [](const CircularUniform&) { return 1.0 / kTwoPi; },
          [theta](const VonMises& d) { return von_mises_density(d, theta); },
          [theta](const Cardioid& d) { return (1.0 + 2.0 * d.rho * std::cos(theta - d.mu)) / kTwoPi; },
          [theta](const WrappedNormal& d) { return wrapped_normal_density(d, theta); },
          [theta](const WrappedCauchy& d) {
            return (1.0 - d.rho * d.rho) /
                   (kTwoPi * (1.0 + d.rho * d.rho - 2.0 * d.rho * std::cos(theta - d.mu)));
          },
          [theta](const WrappedSkewNormal& d) { return wrapped_skew_normal_density(d, theta); },
      },
      dist);
}

double draw(const Primitive& dist, Rng& rng) {
  return std::visit(
      overloaded{
          [&rng](const CircularUniform&) { return kTwoPi * rng.uniform(); },
          [&rng](const VonMises& d) { return draw_von_mises(d, rng); },
          [&rng](const Cardioid& d) {
            const double envelope = 1.0 + 2.0 * std::abs(d.rho);
            for (;;) {
              const double theta = kTwoPi * rng.uniform();
              if (rng.uniform() * envelope <= 1.0 + 2.0 * d.rho * std::cos(theta - d.mu)) {
                return theta;
              }
            }
          },
          [&rng](const WrappedNormal& d) {
            if (d.rho == 0.0) {
              return kTwoPi * rng.uniform();
            }
            const double sigma = std::sqrt(-2.0 * std::log(d.rho));
            return wrap_angle(d.mu + sigma * rng.normal());
          },
          [&rng](const WrappedCauchy& d) {
            if (d.rho == 0.0) {
              return kTwoPi * rng.uniform();
            }
            const double scale = -std::log(d.rho);
            return wrap_angle(d.mu + scale * std::tan(kPi * (rng.uniform() - 0.5)));
          },
          [&rng](const WrappedSkewNormal& d) {
            const double delta = d.lambda / std::sqrt(1.0 + d.lambda * d.lambda);
            const double u0 = rng.normal();
            const double u1 = rng.normal();
            const double z = delta * std::abs(u0) + std::sqrt(1.0 - delta * delta) * u1;
            return wrap_angle(d.xi + d.eta * z);
          },
      },
      dist);
}

Primitive rotated(const Primitive& dist, double phi) {
  return std::visit(overloaded{
                        [](const CircularUniform& d) -> Primitive { return d; },
                        [phi](VonMises d) -> Primitive {
                          d.mu = wrap_angle(d.mu + phi);
                          return d;
                        },
                        [phi](Cardioid d) -> Primitive {
                          d.mu = wrap_angle(d.mu + phi);
                          return d;
                        },
                        [phi](WrappedNormal d) -> Primitive {
                          d.mu = wrap_angle(d.mu + phi);
                          return d;
                        },
                        [phi](WrappedCauchy d) -> Primitive {
                          d.mu = wrap_angle(d.mu + phi);
                          return d;
                        },
                        [phi](WrappedSkewNormal d) -> Primitive {
                          d.xi = wrap_angle(d.xi + phi);
                          return d;
                        },
                    },
                    dist);
}

ModelSpec::ModelSpec(std::string id, std::vector<WeightedPrimitive> parts, std::string formula)
    : id_(std::move(id)), parts_(std::move(parts)), formula_(std::move(formula)) {
  if (parts_.empty()) {
    throw std::invalid_argument("model " + id_ + " has no components");
  }
  double total = 0.0;
  for (const auto& p : parts_) {
    if (!(p.weight > 0.0)) {
      throw std::invalid_argument("model " + id_ + " has a non-positive weight");
    }
    validate(p.dist);
    total += p.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("model " + id_ + " weights do not sum to 1");
  }
}

ModelSpec ModelSpec::rotated(double phi) const {
  auto parts = parts_;
  for (auto& p : parts) {
    p.dist = circkde::rotated(p.dist, phi);
  }
  return ModelSpec(id_, std::move(parts), formula_);
}

double density(const ModelSpec& model, double theta) {
  double sum = 0.0;
  for (const auto& p : model.parts()) {
    sum += p.weight * density(p.dist, theta);
  }
  return sum;
}

double density(const VonMisesMixture& mix, double theta) {
  double sum = 0.0;
  for (std::size_t j = 0; j < mix.size(); ++j) {
    sum += mix.weights()[j] * von_mises_density(mix.components()[j], theta);
  }
  return sum;
}

namespace {

template <typename Draw>
AngleSample sample_mixture(std::span<const double> weights, std::size_t n, Rng& rng, Draw&& draw_from) {
  std::vector<double> cumulative(weights.size());
  std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
  AngleSample out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = 0;
    if (weights.size() > 1) {
      const double u = rng.uniform() * cumulative.back();
      j = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                   cumulative.begin());
      j = std::min(j, weights.size() - 1);
    }
    out.push_back(draw_from(j));
  }
  return out;
}

}  // namespace

AngleSample sample(const ModelSpec& model, std::size_t n, Rng& rng) {
  std::vector<double> weights;
  for (const auto& p : model.parts()) {
    weights.push_back(p.weight);
  }
  return sample_mixture(weights, n, rng,
                        [&](std::size_t j) { return draw(model.parts()[j].dist, rng); });
}

AngleSample sample(const VonMisesMixture& mix, std::size_t n, Rng& rng) {
  return sample_mixture(mix.weights(), n, rng, [&](std::size_t j) {
    return draw(Primitive{mix.components()[j]}, rng);
  });
}

double mixture_second_derivative(const VonMisesMixture& mix, double theta) {
  double sum = 0.0;
  for (std::size_t j = 0; j < mix.size(); ++j) {
    const auto& c = mix.components()[j];
    const double s = std::sin(theta - c.mu);
    const double co = std::cos(theta - c.mu);
    const double scaled_density = std::exp(c.kappa * (co - 1.0)) / (kTwoPi * bessel_i_exp(0, c.kappa));
    sum += mix.weights()[j] * (c.kappa * c.kappa * s * s - c.kappa * co) * scaled_density;
  }
  return sum;
}

std::optional<double> curvature_integral(const VonMisesMixture& mix) {
  constexpr std::size_t kStart = std::size_t{1} << 10;
  constexpr std::size_t kCap = std::size_t{1} << 16;
  constexpr double kRelTol = 1e-8;

  auto squared = [&mix](double theta) {
    const double g2 = mixture_second_derivative(mix, theta);
    return g2 * g2;
  };

  std::size_t points = kStart;
  double sum = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    sum += squared(kTwoPi * static_cast<double>(k) / static_cast<double>(points));
  }
  if (!std::isfinite(sum)) {
    return std::nullopt;
  }
  double previous = kTwoPi * sum / static_cast<double>(points);
  while (points < kCap) {
    // Add the midpoints of the current grid.
    const std::size_t doubled = 2 * points;
    for (std::size_t k = 1; k < doubled; k += 2) {
      sum += squared(kTwoPi * static_cast<double>(k) / static_cast<double>(doubled));
    }
    points = doubled;
    if (!std::isfinite(sum)) {
      return std::nullopt;
    }
    const double current = kTwoPi * sum / static_cast<double>(points);
    if (std::abs(current - previous) <= kRelTol * std::abs(current)) {
      return current;
    }
    previous = current;
  }
  return std::nullopt;
}

}  // namespace circkde
