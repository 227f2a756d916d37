#include "circkde/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "circkde/special_functions.hpp"

namespace circkde {

std::string_view selector_name(Selector s) {
  switch (s) {
    case Selector::RuleOfThumb:
      return "RT";
    case Selector::PlugIn:
      return "PI";
    case Selector::Lcv:
      return "LCV";
    case Selector::Oracle:
      return "ORACLE";
  }
  return "?";
}

std::optional<Selector> parse_selector(std::string_view name) {
  for (auto s : {Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv, Selector::Oracle}) {
    if (selector_name(s) == name) {
      return s;
    }
  }
  return std::nullopt;
}

NuSearchDomain NuSearchDomain::for_sample_size(std::size_t n) {
  NuSearchDomain d;
  d.nu_max = 10.0 * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), 0.4);
  return d;
}

void NuSearchDomain::validate() const {
  if (!(nu_min > 0.0 && nu_max > nu_min)) {
    throw std::invalid_argument("search domain needs 0 < nu_min < nu_max");
  }
  if (probes < 2) {
    throw std::invalid_argument("search domain needs at least 2 probes");
  }
  if (!(rel_tol > 0.0)) {
    throw std::invalid_argument("search tolerance must be positive");
  }
}

double amise(double nu, std::size_t n, double curvature) {
  if (!(nu > 0.0) || n == 0 || !(curvature >= 0.0) || !std::isfinite(curvature)) {
    throw std::invalid_argument("amise needs nu > 0, n >= 1 and finite curvature >= 0");
  }
  const double b0 = bessel_i_exp(0, nu);
  const double shrink = 1.0 - bessel_i_exp(2, nu) / b0;
  // I0(2 nu) / I0(nu)^2 with the exp(2 nu) factors cancelled.
  const double variance_ratio = bessel_i_exp(0, 2.0 * nu) / (b0 * b0);
  return shrink * shrink * curvature / 16.0 +
         variance_ratio / (2.0 * static_cast<double>(n) * std::numbers::pi);
}

double rule_of_thumb_nu(double kappa, std::size_t n) {
  if (!(kappa >= 0.0) || n == 0) {
    throw std::invalid_argument("rule of thumb needs kappa >= 0 and n >= 1");
  }
  if (kappa == 0.0) {
    return 0.0;
  }
  const double b0 = bessel_i_exp(0, kappa);
  // I2(2k) / I0(k)^2, exponentials cancel.
  const double ratio = bessel_i_exp(2, 2.0 * kappa) / (b0 * b0);
  const double inner =
      3.0 * static_cast<double>(n) * kappa * kappa * ratio / (4.0 * std::sqrt(std::numbers::pi));
  return std::min(std::pow(inner, 0.4), kKappaCap);
}

BandwidthResult rule_of_thumb(std::span<const double> sample) {
  const auto single = fit_single_von_mises(sample);
  BandwidthResult r;
  r.selector = Selector::RuleOfThumb;
  r.kappa_hat = single.component.kappa;
  r.nu = rule_of_thumb_nu(single.component.kappa, sample.size());
  r.probe_nu = r.nu;
  if (r.nu > 0.0) {
    // Exact R(f'') of the fitted von Mises. The closed-form nu above is the
    // asymptotic minimizer for 3k^2 I2(2k) / (8 pi I0(k)^2), which drops the
    // 2k I1(2k) term, so the reported AMISE uses the exact value.
    const double k = single.component.kappa;
    const double curvature = (3.0 * k * k * bessel_i_exp(2, 2.0 * k) + 2.0 * k * bessel_i_exp(1, 2.0 * k)) /
                             (8.0 * std::numbers::pi * std::pow(bessel_i_exp(0, k), 2));
    r.curvature = curvature;
    r.objective = amise(r.nu, sample.size(), curvature);
  }
  return r;
}

SearchResult minimize_amise(std::size_t n, double curvature, const NuSearchDomain& domain) {
  domain.validate();
  return probe_golden_minimize([&](double nu) { return amise(nu, n, curvature); }, domain.nu_min,
                               domain.nu_max, domain.probes, domain.rel_tol);
}

BandwidthResult plug_in(std::span<const double> sample, const EmConfig& cfg, const NuSearchDomain& domain,
                        std::span<const int> candidates) {
  auto selection = select_reference_mixture(sample, candidates, cfg);
  if (!selection.best) {
    auto fallback = rule_of_thumb(sample);
    fallback.selector = Selector::PlugIn;
    fallback.aic_table = std::move(selection.table);
    fallback.fallback = true;
    fallback.fallback_reason = "no valid reference mixture; rule of thumb used";
    return fallback;
  }
  const double curvature = *selection.curvature;
  const auto search = minimize_amise(sample.size(), curvature, domain);
  BandwidthResult r;
  r.selector = Selector::PlugIn;
  r.nu = search.x;
  r.objective = search.value;
  r.evaluations = search.evaluations;
  r.probe_nu = search.probe_x;
  r.curvature = curvature;
  r.selected_components = selection.best->components;
  r.aic_table = std::move(selection.table);
  return r;
}

LcvObjective::LcvObjective(std::span<const double> sample) : n_(sample.size()) {
  if (n_ < 2) {
    throw std::invalid_argument("likelihood cross-validation needs at least 2 observations");
  }
  exponents_.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      exponents_.push_back(std::cos(sample[i] - sample[j]) - 1.0);
    }
  }
}

double LcvObjective::operator()(double nu) const {
  std::vector<double> row_sums(n_, 0.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n_; ++i) {
    double acc = 0.0;
    for (std::size_t j = i + 1; j < n_; ++j, ++idx) {
      const double k = std::exp(nu * exponents_[idx]);
      acc += k;
      row_sums[j] += k;
    }
    row_sums[i] += acc;
  }
  const double log_norm =
      std::log(static_cast<double>(n_ - 1) * kTwoPi * bessel_i_exp(0, nu));
  double total = 0.0;
  bool underflow = false;
  for (double s : row_sums) {
    if (!(s > 1e-280)) {
      underflow = true;
      break;
    }
    total += std::log(s);
  }
  if (underflow) {
    // Redo every row in log-sum-exp form.
    total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double peak = -std::numeric_limits<double>::infinity();
      auto exponent = [&](std::size_t j) {
        const auto a = std::min(i, j);
        const auto b = std::max(i, j);
        const std::size_t at = a * n_ - a * (a + 1) / 2 + (b - a - 1);
        return nu * exponents_[at];
      };
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) {
          peak = std::max(peak, exponent(j));
        }
      }
      double s = 0.0;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j != i) {
          s += std::exp(exponent(j) - peak);
        }
      }
      total += peak + std::log(s);
    }
  }
  return total - static_cast<double>(n_) * log_norm;
}

BandwidthResult lcv(std::span<const double> sample, const NuSearchDomain& domain) {
  domain.validate();
  const LcvObjective objective(sample);
  const auto search = probe_golden_minimize([&](double nu) { return -objective(nu); }, domain.nu_min,
                                            domain.nu_max, domain.probes, domain.rel_tol);
  BandwidthResult r;
  r.selector = Selector::Lcv;
  r.nu = search.x;
  r.objective = -search.value;
  r.evaluations = search.evaluations;
  r.probe_nu = search.probe_x;
  return r;
}

std::vector<double> default_oracle_grid() { return log_space(0.01, 1000.0, 81); }

OracleResult oracle_from_samples(const ModelSpec& model, std::span<const AngleSample> samples,
                                 std::span<const double> nu_grid, std::size_t gridsize) {
  if (samples.empty() || nu_grid.empty()) {
    throw std::invalid_argument("oracle needs at least one replicate and one grid value");
  }
  const DensityGrid truth = density_grid(model, gridsize);
  OracleResult out;
  out.nu_grid.assign(nu_grid.begin(), nu_grid.end());
  out.mise.assign(nu_grid.size(), 0.0);
  for (const auto& s : samples) {
    const KdeGridEvaluator evaluator(s, gridsize);
    for (std::size_t g = 0; g < nu_grid.size(); ++g) {
      out.mise[g] += ise(evaluator.grid(nu_grid[g]), truth);
    }
  }
  for (auto& m : out.mise) {
    m /= static_cast<double>(samples.size());
  }
  const auto best = std::min_element(out.mise.begin(), out.mise.end()) - out.mise.begin();
  out.nu0 = out.nu_grid[static_cast<std::size_t>(best)];
  out.mise0 = out.mise[static_cast<std::size_t>(best)];
  return out;
}

OracleResult oracle_bandwidth(const ModelSpec& model, std::size_t n, std::size_t replicates, Rng& rng,
                              std::span<const double> nu_grid, std::size_t gridsize) {
  std::vector<AngleSample> samples;
  samples.reserve(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    samples.push_back(sample(model, n, rng));
  }
  return oracle_from_samples(model, samples, nu_grid, gridsize);
}

}  // namespace circkde
