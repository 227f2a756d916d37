#include "circkde/vm_mixture_em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "circkde/special_functions.hpp"

namespace circkde {

namespace {

struct Trig {
  std::vector<double> c;
  std::vector<double> s;
};

Trig trig_of(std::span<const double> sample) {
  Trig t;
  t.c.reserve(sample.size());
  t.s.reserve(sample.size());
  for (double theta : sample) {
    t.c.push_back(std::cos(theta));
    t.s.push_back(std::sin(theta));
  }
  return t;
}

// Fills resp (n x M) and returns the log-likelihood of `mix`.
double expectation(const VonMisesMixture& mix, const Trig& trig, std::vector<double>& resp) {
  const std::size_t n = trig.c.size();
  const std::size_t m = mix.size();
  std::vector<double> log_norm(m);
  std::vector<double> cos_mu(m);
  std::vector<double> sin_mu(m);
  for (std::size_t j = 0; j < m; ++j) {
    const auto& comp = mix.components()[j];
    log_norm[j] = std::log(mix.weights()[j]) - std::log(kTwoPi * bessel_i_exp(0, comp.kappa));
    cos_mu[j] = std::cos(comp.mu);
    sin_mu[j] = std::sin(comp.mu);
  }
  resp.assign(n * m, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double* row = resp.data() + i * m;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
      const double cos_diff = trig.c[i] * cos_mu[j] + trig.s[i] * sin_mu[j];
      row[j] = log_norm[j] + mix.components()[j].kappa * (cos_diff - 1.0);
      peak = std::max(peak, row[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      row[j] = std::exp(row[j] - peak);
      sum += row[j];
    }
    for (std::size_t j = 0; j < m; ++j) {
      row[j] /= sum;
    }
    total += peak + std::log(sum);
  }
  return total;
}

struct MaximizationResult {
  std::vector<double> weights;
  std::vector<VonMisesComponent> components;
  std::vector<double> effective_members;
  std::vector<bool> saturated;
};

MaximizationResult maximization(const Trig& trig, const std::vector<double>& resp, std::size_t m) {
  const std::size_t n = trig.c.size();
  MaximizationResult out;
  out.weights.resize(m);
  out.components.resize(m);
  out.effective_members.assign(m, 0.0);
  out.saturated.assign(m, false);
  std::vector<double> sum_c(m, 0.0);
  std::vector<double> sum_s(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = resp.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      out.effective_members[j] += row[j];
      sum_c[j] += row[j] * trig.c[i];
      sum_s[j] += row[j] * trig.s[i];
    }
  }
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double members = out.effective_members[j];
    out.weights[j] = members / static_cast<double>(n);
    total += out.weights[j];
    if (members > 0.0) {
      const double rbar = std::min(std::hypot(sum_c[j], sum_s[j]) / members, 1.0);
      const auto kappa = inverse_mean_resultant_ratio(rbar);
      out.components[j] = {wrap_angle(std::atan2(sum_s[j], sum_c[j])), kappa.kappa};
      out.saturated[j] = kappa.saturated;
    }
  }
  for (auto& w : out.weights) {
    w /= total;
  }
  return out;
}

VonMisesMixture farthest_point_start(std::span<const double> sample, int components, Rng& rng) {
  std::vector<double> centers{sample[rng.below(sample.size())]};
  std::vector<double> nearest(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    nearest[i] = circular_distance(sample[i], centers.front());
  }
  while (static_cast<int>(centers.size()) < components) {
    const auto far = std::max_element(nearest.begin(), nearest.end()) - nearest.begin();
    const double c = sample[static_cast<std::size_t>(far)];
    centers.push_back(c);
    for (std::size_t i = 0; i < sample.size(); ++i) {
      nearest[i] = std::min(nearest[i], circular_distance(sample[i], c));
    }
  }
  std::vector<VonMisesComponent> comps;
  for (double c : centers) {
    comps.push_back({c, 1.0});
  }
  std::vector<double> weights(static_cast<std::size_t>(components), 1.0 / components);
  return VonMisesMixture(std::move(weights), std::move(comps));
}

}  // namespace

SingleVonMisesFit fit_single_von_mises(std::span<const double> sample) {
  if (sample.empty()) {
    throw std::invalid_argument("cannot fit a von Mises to an empty sample");
  }
  double c = 0.0;
  double s = 0.0;
  for (double theta : sample) {
    c += std::cos(theta);
    s += std::sin(theta);
  }
  const double n = static_cast<double>(sample.size());
  const double rbar = std::min(std::hypot(c, s) / n, 1.0);
  // Perfectly balanced samples leave only rounding noise in the resultant.
  const double resultant = rbar < 1e-14 ? 0.0 : rbar;
  const auto kappa = inverse_mean_resultant_ratio(resultant);
  const double mu = resultant == 0.0 ? 0.0 : wrap_angle(std::atan2(s, c));
  return {{mu, kappa.kappa}, resultant, kappa.saturated};
}

double aic(double log_likelihood, int components) {
  const int free_parameters = 3 * components - 1;
  return 2.0 * free_parameters - 2.0 * log_likelihood;
}

double aic(const MixtureFit& fit) { return aic(fit.log_likelihood, fit.components); }

double log_likelihood(const VonMisesMixture& mix, std::span<const double> sample) {
  std::vector<double> resp;
  return expectation(mix, trig_of(sample), resp);
}

std::vector<double> responsibilities(const VonMisesMixture& mix, std::span<const double> sample) {
  std::vector<double> resp;
  (void)expectation(mix, trig_of(sample), resp);
  return resp;
}

MixtureFit em_run(std::span<const double> sample, VonMisesMixture start, const EmConfig& cfg) {
  if (sample.empty()) {
    throw std::invalid_argument("EM needs a non-empty sample");
  }
  if (cfg.max_iter < 1 || !(cfg.rel_tol >= 0.0)) {
    throw std::invalid_argument("EM config needs max_iter >= 1 and rel_tol >= 0");
  }
  const Trig trig = trig_of(sample);
  const std::size_t m = start.size();
  const double n = static_cast<double>(sample.size());

  MixtureFit fit{.mixture = std::move(start)};
  fit.components = static_cast<int>(m);
  std::vector<double> resp;
  double ll = expectation(fit.mixture, trig, resp);
  fit.trace.push_back(ll);
  MaximizationResult last;

  for (int it = 1; it <= cfg.max_iter; ++it) {
    last = maximization(trig, resp, m);
    const bool emptied =
        std::any_of(last.effective_members.begin(), last.effective_members.end(),
                    [](double v) { return !(v > 0.0); });
    if (emptied) {
      fit.valid = false;
      fit.invalid_reason = "component lost all members";
      break;
    }
    fit.mixture = VonMisesMixture(last.weights, last.components);
    const double next = expectation(fit.mixture, trig, resp);
    fit.trace.push_back(next);
    fit.iterations = it;
    const bool done = std::abs(next - ll) <= cfg.rel_tol * std::abs(ll);
    ll = next;
    if (done) {
      fit.converged = true;
      break;
    }
  }
  fit.log_likelihood = ll;
  fit.aic = aic(fit);

  if (fit.valid && !std::isfinite(ll)) {
    fit.valid = false;
    fit.invalid_reason = "log-likelihood not finite";
  }
  if (fit.valid && fit.iterations > 0) {
    for (std::size_t j = 0; j < m; ++j) {
      if (fit.mixture.weights()[j] < 1.0 / (10.0 * n)) {
        fit.valid = false;
        fit.invalid_reason = "component weight below 1/(10n)";
        break;
      }
      if (last.saturated[j] && last.effective_members[j] < 2.0) {
        fit.valid = false;
        fit.invalid_reason = "saturated concentration with fewer than 2 members";
        break;
      }
    }
  }
  return fit;
}

MixtureFit em_fit(std::span<const double> sample, int components, const EmConfig& cfg) {
  if (components < 1) {
    throw std::invalid_argument("EM needs at least one component");
  }
  if (sample.size() < 3 * static_cast<std::size_t>(components)) {
    throw std::invalid_argument("EM with M components needs at least 3M observations");
  }
  if (cfg.n_restarts < 1) {
    throw std::invalid_argument("EM needs at least one restart");
  }
  std::optional<MixtureFit> best;
  for (int r = 0; r < cfg.n_restarts; ++r) {
    Rng rng(cfg.seed, derive_stream({cfg.stream, static_cast<std::uint64_t>(components),
                                     static_cast<std::uint64_t>(r)}));
    auto fit = em_run(sample, farthest_point_start(sample, components, rng), cfg);
    // Valid runs beat invalid ones; within a class the higher likelihood wins.
    const bool better = !best || (fit.valid && !best->valid) ||
                        (fit.valid == best->valid && fit.log_likelihood > best->log_likelihood);
    if (better) {
      best = std::move(fit);
    }
  }
  return std::move(*best);
}

std::size_t distinct_count(std::span<const double> sample) {
  if (sample.empty()) {
    return 0;
  }
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t count = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i] - sorted[i - 1] > 1e-12) {
      ++count;
    }
  }
  if (count > 1 && sorted.front() + kTwoPi - sorted.back() <= 1e-12) {
    --count;
  }
  return count;
}

ReferenceSelection select_reference_mixture(std::span<const double> sample, std::span<const int> candidates,
                                            const EmConfig& cfg) {
  if (candidates.empty()) {
    throw std::invalid_argument("candidate component counts must be non-empty");
  }
  ReferenceSelection selection;
  const std::size_t distinct = distinct_count(sample);
  for (int m : candidates) {
    CandidateOutcome outcome{.components = m};
    if (m < 1 || distinct < 3 * static_cast<std::size_t>(m)) {
      outcome.reason = "fewer than 3M distinct observations";
      selection.table.push_back(outcome);
      continue;
    }
    auto fit = em_fit(sample, m, cfg);
    outcome.aic = fit.aic;
    if (!fit.valid) {
      outcome.reason = fit.invalid_reason;
      selection.table.push_back(outcome);
      continue;
    }
    const auto curvature = curvature_integral(fit.mixture);
    if (!curvature) {
      outcome.reason = "curvature integral not finite";
      selection.table.push_back(outcome);
      continue;
    }
    outcome.curvature = curvature;
    outcome.valid = true;
    selection.table.push_back(outcome);
    if (!selection.best || fit.aic < selection.best->aic) {
      selection.best = std::move(fit);
      selection.curvature = curvature;
    }
  }
  return selection;
}

}  // namespace circkde
