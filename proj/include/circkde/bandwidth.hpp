#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "circkde/circular_models.hpp"
#include "circkde/kde.hpp"
#include "circkde/search.hpp"
#include "circkde/vm_mixture_em.hpp"

namespace circkde {

enum class Selector { RuleOfThumb, PlugIn, Lcv, Oracle };

/// "RT", "PI", "LCV", "ORACLE".
[[nodiscard]] std::string_view selector_name(Selector s);
[[nodiscard]] std::optional<Selector> parse_selector(std::string_view name);

/// Interval and probe grid for the one-dimensional bandwidth searches.
struct NuSearchDomain {
  double nu_min = 0.01;
  double nu_max = 100.0;
  int probes = 50;
  /// Golden-section stopping width, relative in nu.
  double rel_tol = 1e-4;

  /// nu_max = 10 * n^(2/5), the rule-of-thumb rate times a safety factor.
  [[nodiscard]] static NuSearchDomain for_sample_size(std::size_t n);
  void validate() const;
};

struct BandwidthResult {
  double nu = 0.0;
  Selector selector = Selector::RuleOfThumb;
  /// AMISE at the optimum for RT/PI, log-LCV for LCV, MISE for ORACLE.
  double objective = 0.0;
  std::optional<double> kappa_hat;

  // Plug-in diagnostics.
  std::optional<int> selected_components;
  std::optional<double> curvature;
  std::vector<CandidateOutcome> aic_table;
  bool fallback = false;
  std::string fallback_reason;

  int evaluations = 0;
  double probe_nu = 0.0;
};

/// Asymptotic MISE of the von Mises kernel estimator for a target whose
/// squared second derivative integrates to `curvature`.
[[nodiscard]] double amise(double nu, std::size_t n, double curvature);

/// Closed-form AMISE minimizer for a single von Mises reference with
/// concentration kappa. Clamped to kKappaCap.
[[nodiscard]] double rule_of_thumb_nu(double kappa, std::size_t n);

[[nodiscard]] BandwidthResult rule_of_thumb(std::span<const double> sample);

[[nodiscard]] SearchResult minimize_amise(std::size_t n, double curvature, const NuSearchDomain& domain);

/// Mixture-reference plug-in selector. Falls back to the rule of thumb when no
/// candidate mixture is usable.
[[nodiscard]] BandwidthResult plug_in(std::span<const double> sample, const EmConfig& cfg,
                                      const NuSearchDomain& domain,
                                      std::span<const int> candidates = kDefaultCandidates);

/// Leave-one-out log-likelihood sum_i log fhat_{-i}(Theta_i; nu).
class LcvObjective {
 public:
  explicit LcvObjective(std::span<const double> sample);

  [[nodiscard]] double operator()(double nu) const;
  [[nodiscard]] std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  std::vector<double> exponents_;  // cos(Theta_i - Theta_j) - 1, upper triangle, row-major
};

[[nodiscard]] BandwidthResult lcv(std::span<const double> sample, const NuSearchDomain& domain);

struct OracleResult {
  double nu0 = 0.0;
  double mise0 = 0.0;
  std::vector<double> nu_grid;
  std::vector<double> mise;
};

/// Default benchmark grid: 81 log-spaced values on [0.01, 1000].
[[nodiscard]] std::vector<double> default_oracle_grid();

/// Average ISE over the given replicate samples for every grid value; every
/// value sees the same samples.
[[nodiscard]] OracleResult oracle_from_samples(const ModelSpec& model, std::span<const AngleSample> samples,
                                               std::span<const double> nu_grid,
                                               std::size_t gridsize = kDefaultGridSize);

/// Draws `replicates` samples of size n from the model and calls oracle_from_samples.
[[nodiscard]] OracleResult oracle_bandwidth(const ModelSpec& model, std::size_t n, std::size_t replicates,
                                            Rng& rng, std::span<const double> nu_grid,
                                            std::size_t gridsize = kDefaultGridSize);

}  // namespace circkde
