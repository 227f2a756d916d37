#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "circkde/bandwidth.hpp"

namespace circkde {

struct ExperimentConfig {
  std::vector<std::string> models{"M1", "M2", "M5", "M7", "M12", "M20"};
  std::vector<std::size_t> sample_sizes{100, 250};
  std::size_t replicates = 200;
  std::vector<Selector> selectors{Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv};
  std::uint64_t base_seed = 1;
  std::size_t gridsize = kDefaultGridSize;
  /// seed and stream are replaced per replicate.
  EmConfig em;
  /// Defaults to NuSearchDomain::for_sample_size(n) when empty.
  std::optional<NuSearchDomain> nu_domain;
  std::vector<double> oracle_grid = default_oracle_grid();
  std::vector<int> candidates = kDefaultCandidates;
  unsigned threads = 1;

  /// Desk-scale smoke set (the defaults above).
  [[nodiscard]] static ExperimentConfig smoke();
  /// All twenty models, n in {100, 250, 500}, 1000 replicates, every selector.
  [[nodiscard]] static ExperimentConfig full();

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct CellResult {
  std::string model;
  std::size_t n = 0;
  Selector selector = Selector::RuleOfThumb;
  double mean_ise = 0.0;
  double sd_ise = 0.0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
  std::size_t fallback_count = 0;
  std::optional<double> mean_selected_components;
  double mean_nu = 0.0;
};

struct SimulationReport {
  std::vector<CellResult> rows;
  std::uint64_t base_seed = 0;
  std::string config_hash;
  double wall_seconds = 0.0;

  [[nodiscard]] const CellResult* find(const std::string& model, std::size_t n, Selector s) const;
};

/// Stream id of the sample drawn for one (model, n, replicate).
[[nodiscard]] std::uint64_t replicate_stream(int model_number, std::size_t n, std::size_t replicate);

[[nodiscard]] SimulationReport run_experiment(const ExperimentConfig& cfg);

[[nodiscard]] std::string config_to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults. Throws std::invalid_argument naming bad fields.
[[nodiscard]] ExperimentConfig config_from_json(const std::string& text);

[[nodiscard]] std::string report_to_json(const SimulationReport& report, bool include_wall_time = true);
/// Aligned table, one block per sample size, MISE x100 with sd x100 in parentheses.
[[nodiscard]] std::string format_table(const SimulationReport& report);

struct ReferenceRow {
  std::string model;
  std::size_t n = 0;
  std::string selector;
  double mise_x100 = 0.0;
  std::optional<double> sd_x100;
};

using ReferenceTable = std::vector<ReferenceRow>;

/// CSV with header `model,n,selector,mise_x100,sd_x100`; `#` lines are comments
/// and an empty sd field means no standard deviation was published.
[[nodiscard]] ReferenceTable parse_reference_table(std::istream& in);
[[nodiscard]] ReferenceTable load_reference_table(const std::string& path);

enum class CellStatus { Pass, Fail, Missing };

struct CellComparison {
  std::string model;
  std::size_t n = 0;
  std::string selector;
  CellStatus status = CellStatus::Missing;
  double observed_x100 = 0.0;
  double reference_x100 = 0.0;
  double half_width = 0.0;
  double z = 0.0;
};

inline constexpr double kDefaultSlackFraction = 0.10;

/// A cell passes when |observed - reference| <= k_sigma * sd / sqrt(replicates)
/// + slack_fraction * reference, all on the x100 scale.
[[nodiscard]] std::vector<CellComparison> compare_to_reference(const SimulationReport& report,
                                                               const ReferenceTable& ref, double k_sigma,
                                                               double slack_fraction = kDefaultSlackFraction);

}  // namespace circkde
