#include "circkde/search.hpp"

#include <cmath>
#include <stdexcept>

namespace circkde {

std::vector<double> log_space(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo) || count < 2) {
    throw std::invalid_argument("log_space needs 0 < lo < hi and count >= 2");
  }
  std::vector<double> xs(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) {
    xs[static_cast<std::size_t>(i)] = std::exp(a + step * i);
  }
  xs.front() = lo;
  xs.back() = hi;
  return xs;
}

SearchResult probe_golden_minimize(const std::function<double(double)>& f, double lo, double hi, int probes,
                                   double rel_tol) {
  const auto xs = log_space(lo, hi, probes);
  SearchResult result;
  std::size_t best = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f(xs[i]);
    ++result.evaluations;
    if (i == 0 || v < best_value) {
      best = i;
      best_value = v;
    }
  }
  result.probe_x = xs[best];
  result.probe_value = best_value;
  result.x = xs[best];
  result.value = best_value;

  double a = std::log(xs[best == 0 ? 0 : best - 1]);
  double b = std::log(xs[best + 1 == xs.size() ? best : best + 1]);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  result.evaluations += 2;
  // Bracket width in log(x) approximates relative width in x.
  while (b - a > rel_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(std::exp(d));
    }
    ++result.evaluations;
  }
  const double refined_x = fc < fd ? std::exp(c) : std::exp(d);
  const double refined_value = fc < fd ? fc : fd;
  if (refined_value < result.value) {
    result.x = refined_x;
    result.value = refined_value;
  }
  return result;
}

}  // namespace circkde
