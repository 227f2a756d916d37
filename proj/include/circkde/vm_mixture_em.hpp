#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circkde/circular_models.hpp"

namespace circkde {

struct EmConfig {
  int max_iter = 200;
  /// Stop once |l_t - l_{t-1}| <= rel_tol * |l_{t-1}|.
  double rel_tol = 1e-6;
  int n_restarts = 5;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct SingleVonMisesFit {
  VonMisesComponent component;
  double mean_resultant_length = 0.0;
  bool saturated = false;
};

/// Closed-form MLE of a single von Mises. Throws on an empty sample.
[[nodiscard]] SingleVonMisesFit fit_single_von_mises(std::span<const double> sample);

struct MixtureFit {
  VonMisesMixture mixture;
  double log_likelihood = 0.0;
  int components = 0;
  bool converged = false;
  double aic = 0.0;
  bool valid = true;
  std::string invalid_reason;
  int iterations = 0;
  /// Log-likelihood after each EM iteration of the returned run; entry 0 is the start.
  std::vector<double> trace;
};

[[nodiscard]] double aic(double log_likelihood, int components);
[[nodiscard]] double aic(const MixtureFit& fit);

[[nodiscard]] double log_likelihood(const VonMisesMixture& mix, std::span<const double> sample);

/// Posterior component probabilities, row-major n x M.
[[nodiscard]] std::vector<double> responsibilities(const VonMisesMixture& mix,
                                                   std::span<const double> sample);

/// Runs EM from a given starting mixture. max_iter = 1 performs a single step.
[[nodiscard]] MixtureFit em_run(std::span<const double> sample, VonMisesMixture start, const EmConfig& cfg);

/// Best of cfg.n_restarts seeded EM runs with M components. Requires
/// sample.size() >= 3M.
[[nodiscard]] MixtureFit em_fit(std::span<const double> sample, int components, const EmConfig& cfg);

/// Number of distinct angles, counting values within 1e-12 rad of a neighbour as one.
[[nodiscard]] std::size_t distinct_count(std::span<const double> sample);

struct CandidateOutcome {
  int components = 0;
  std::optional<double> aic;
  std::optional<double> curvature;
  bool valid = false;
  std::string reason;
};

struct ReferenceSelection {
  std::optional<MixtureFit> best;
  std::optional<double> curvature;
  std::vector<CandidateOutcome> table;
};

inline const std::vector<int> kDefaultCandidates{2, 3, 4, 5};

/// Fits every candidate M and keeps the valid fit with the smallest AIC whose
/// curvature integral is finite. `best` is empty when no candidate survives.
[[nodiscard]] ReferenceSelection select_reference_mixture(std::span<const double> sample,
                                                          std::span<const int> candidates,
                                                          const EmConfig& cfg);

}  // namespace circkde
