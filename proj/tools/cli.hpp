#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "circkde/bandwidth.hpp"
#include "circkde/circular_models.hpp"

namespace circkde::cli {

enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,
  kReferenceFailure = 2,
  kUnreadableFile = 3,
  kTooFewAngles = 4,
};

enum class Unit { Radians, Degrees };

class AngleFileError : public std::runtime_error {
 public:
  AngleFileError(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  [[nodiscard]] ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

/// One angle per line, `#` comments and blank lines ignored. Values are
/// converted to radians and wrapped into [0, 2pi).
[[nodiscard]] AngleSample read_angles(std::istream& in, Unit unit);
[[nodiscard]] AngleSample read_angle_file(const std::string& path, Unit unit);

/// Counts per equal arc starting at 0; counts sum to the sample size.
[[nodiscard]] std::vector<std::size_t> rose_counts(const AngleSample& sample, std::size_t bins);

struct FitOptions {
  std::string input;
  Unit unit = Unit::Radians;
  std::vector<Selector> selectors{Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv};
  std::size_t gridsize = 1024;
  std::size_t rose_bins = 18;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

struct SampleOptions {
  std::string model;
  std::size_t n = 0;
  std::uint64_t seed = 1;
  Unit unit = Unit::Radians;
  std::string output;  // empty: write to `out`
};

struct SimulateOptions {
  std::string config_file;
  std::optional<std::vector<std::string>> models;
  std::optional<std::vector<std::size_t>> sample_sizes;
  std::optional<std::size_t> replicates;
  std::optional<std::vector<std::string>> selectors;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> gridsize;
  std::optional<unsigned> threads;
  bool full = false;
  std::string output_dir = ".";
  std::string reference;
  double k_sigma = 3.0;
};

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sample(const SampleOptions& opts, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err);
int cmd_models(std::ostream& out);

/// Parses a comma-separated selector list such as "RT,PI".
[[nodiscard]] std::vector<Selector> parse_selector_list(const std::vector<std::string>& names);

}  // namespace circkde::cli
