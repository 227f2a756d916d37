#pragma once

#include <functional>
#include <vector>

namespace circkde {

struct SearchResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
  /// Best of the log-spaced probes, before refinement.
  double probe_x = 0.0;
  double probe_value = 0.0;
};

/// `count` points spaced evenly in log scale from lo to hi inclusive.
[[nodiscard]] std::vector<double> log_space(double lo, double hi, int count);

/// Minimizes f over [lo, hi]: evaluates log-spaced probes, then runs a
/// golden-section search in log(x) between the neighbours of the best probe
/// until the bracket is narrower than rel_tol (relative in x). The result is
/// never worse than the best probe.
[[nodiscard]] SearchResult probe_golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                                                 int probes, double rel_tol);

}  // namespace circkde
