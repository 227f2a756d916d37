#include "circkde/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "circkde/catalogue.hpp"

namespace circkde {

using nlohmann::json;

namespace {

struct SelectorOutcome {
  bool ok = false;
  double ise = 0.0;
  double nu = 0.0;
  bool fallback = false;
  std::optional<int> components;
};

struct Accumulator {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++count;
  }
};

// Two-pass mean and sample standard deviation (zero for fewer than two values).
std::pair<double, double> mean_sd(const std::vector<double>& xs) {
  if (xs.empty()) {
    return {0.0, 0.0};
  }
  double mean = 0.0;
  for (double x : xs) {
    mean += x;
  }
  mean /= static_cast<double>(xs.size());
  if (xs.size() < 2) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

template <typename Work>
void parallel_for(std::size_t count, unsigned threads, Work&& work) {
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) {
      work(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) {
          work(i);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors) {
    if (e) {
      std::rethrow_exception(e);
    }
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string format_fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

ExperimentConfig ExperimentConfig::smoke() { return {}; }

ExperimentConfig ExperimentConfig::full() {
  ExperimentConfig cfg;
  cfg.models.clear();
  for (const auto& m : catalogue()) {
    cfg.models.push_back(m.id());
  }
  cfg.sample_sizes = {100, 250, 500};
  cfg.replicates = 1000;
  cfg.selectors = {Selector::Oracle, Selector::RuleOfThumb, Selector::PlugIn, Selector::Lcv};
  return cfg;
}

void ExperimentConfig::validate() const {
  if (models.empty()) {
    throw std::invalid_argument("models: at least one model id required");
  }
  for (const auto& m : models) {
    try {
      (void)catalogue_model(m);
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("models: unknown model id '" + m + "'");
    }
  }
  if (sample_sizes.empty()) {
    throw std::invalid_argument("sample_sizes: at least one sample size required");
  }
  for (auto n : sample_sizes) {
    if (n < 2) {
      throw std::invalid_argument("sample_sizes: every sample size must be at least 2");
    }
  }
  if (replicates < 1) {
    throw std::invalid_argument("replicates: must be at least 1");
  }
  if (selectors.empty()) {
    throw std::invalid_argument("selectors: at least one selector required");
  }
  try {
    check_gridsize(gridsize);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("gridsize: must be a power of two and at least 8");
  }
  if (em.max_iter < 1 || !(em.rel_tol > 0.0) || em.n_restarts < 1) {
    throw std::invalid_argument("em: needs max_iter >= 1, rel_tol > 0, n_restarts >= 1");
  }
  if (nu_domain) {
    try {
      nu_domain->validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string("nu_domain: ") + e.what());
    }
  }
  if (oracle_grid.empty() ||
      std::any_of(oracle_grid.begin(), oracle_grid.end(), [](double v) { return !(v > 0.0); })) {
    throw std::invalid_argument("oracle_grid: needs positive values");
  }
  if (candidates.empty()) {
    throw std::invalid_argument("candidates: at least one component count required");
  }
  if (threads < 1) {
    throw std::invalid_argument("threads: must be at least 1");
  }
}

const CellResult* SimulationReport::find(const std::string& model, std::size_t n, Selector s) const {
  for (const auto& row : rows) {
    if (row.model == model && row.n == n && row.selector == s) {
      return &row;
    }
  }
  return nullptr;
}

std::uint64_t replicate_stream(int model_number, std::size_t n, std::size_t replicate) {
  return derive_stream({static_cast<std::uint64_t>(model_number), n, replicate});
}

SimulationReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  SimulationReport report;
  report.base_seed = cfg.base_seed;
  report.config_hash = hex64(fnv1a(config_to_json(cfg)));

  std::vector<Selector> direct;
  for (auto s : cfg.selectors) {
    if (s != Selector::Oracle) {
      direct.push_back(s);
    }
  }

  for (const auto& id : cfg.models) {
    const ModelSpec& model = catalogue_model(id);
    const int number = model_number(id);
    const DensityGrid truth = density_grid(model, cfg.gridsize);
    for (const std::size_t n : cfg.sample_sizes) {
      const NuSearchDomain domain = cfg.nu_domain.value_or(NuSearchDomain::for_sample_size(n));
      std::vector<AngleSample> samples(cfg.replicates);
      std::vector<std::vector<SelectorOutcome>> outcomes(cfg.replicates,
                                                         std::vector<SelectorOutcome>(direct.size()));

      parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
        const std::uint64_t stream = replicate_stream(number, n, r);
        Rng rng(cfg.base_seed, stream);
        samples[r] = sample(model, n, rng);
        for (std::size_t s = 0; s < direct.size(); ++s) {
          SelectorOutcome& out = outcomes[r][s];
          try {
            BandwidthResult bw;
            switch (direct[s]) {
              case Selector::RuleOfThumb:
                bw = rule_of_thumb(samples[r]);
                break;
              case Selector::PlugIn: {
                EmConfig em = cfg.em;
                em.seed = cfg.base_seed;
                em.stream = mix64(stream);
                bw = plug_in(samples[r], em, domain, cfg.candidates);
                break;
              }
              case Selector::Lcv:
                bw = lcv(samples[r], domain);
                break;
              case Selector::Oracle:
                break;
            }
            out.nu = bw.nu;
            out.fallback = bw.fallback;
            out.components = bw.selected_components;
            out.ise = ise(kde_grid(KdeFit(samples[r], bw.nu), cfg.gridsize), truth);
            out.ok = std::isfinite(out.ise);
          } catch (const std::exception&) {
            out.ok = false;
          }
        }
      });

      for (auto s : cfg.selectors) {
        CellResult cell{.model = id, .n = n, .selector = s};
        std::vector<double> values;
        if (s == Selector::Oracle) {
          const auto oracle = oracle_from_samples(model, samples, cfg.oracle_grid, cfg.gridsize);
          for (const auto& smp : samples) {
            values.push_back(ise(kde_grid(KdeFit(smp, oracle.nu0), cfg.gridsize), truth));
          }
          cell.mean_nu = oracle.nu0;
        } else {
          const auto idx = static_cast<std::size_t>(std::find(direct.begin(), direct.end(), s) - direct.begin());
          double nu_sum = 0.0;
          Accumulator components;
          for (std::size_t r = 0; r < cfg.replicates; ++r) {
            const auto& out = outcomes[r][idx];
            if (!out.ok) {
              ++cell.failures;
              continue;
            }
            values.push_back(out.ise);
            nu_sum += out.nu;
            if (out.fallback) {
              ++cell.fallback_count;
            }
            if (out.components) {
              components.add(*out.components);
            }
          }
          if (!values.empty()) {
            cell.mean_nu = nu_sum / static_cast<double>(values.size());
          }
          if (components.count > 0) {
            cell.mean_selected_components = components.sum / static_cast<double>(components.count);
          }
        }
        const auto [mean, sd] = mean_sd(values);
        cell.mean_ise = mean;
        cell.sd_ise = sd;
        cell.replicates = values.size();
        report.rows.push_back(cell);
      }
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["models"] = cfg.models;
  j["sample_sizes"] = cfg.sample_sizes;
  j["replicates"] = cfg.replicates;
  std::vector<std::string> selectors;
  for (auto s : cfg.selectors) {
    selectors.emplace_back(selector_name(s));
  }
  j["selectors"] = selectors;
  j["base_seed"] = cfg.base_seed;
  j["gridsize"] = cfg.gridsize;
  j["em"] = {{"max_iter", cfg.em.max_iter}, {"rel_tol", cfg.em.rel_tol}, {"n_restarts", cfg.em.n_restarts}};
  if (cfg.nu_domain) {
    j["nu_domain"] = {{"nu_min", cfg.nu_domain->nu_min},
                      {"nu_max", cfg.nu_domain->nu_max},
                      {"probes", cfg.nu_domain->probes},
                      {"rel_tol", cfg.nu_domain->rel_tol}};
  }
  j["oracle_grid"] = cfg.oracle_grid;
  j["candidates"] = cfg.candidates;
  return j.dump();
}

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  ExperimentConfig cfg;
  auto field = [&](const char* key, auto& target) {
    if (!j.contains(key)) {
      return;
    }
    try {
      j.at(key).get_to(target);
    } catch (const json::exception&) {
      throw std::invalid_argument(std::string(key) + ": wrong type");
    }
  };
  static const std::vector<std::string> known{"models",   "sample_sizes", "replicates",  "selectors",
                                              "base_seed", "gridsize",     "em",          "nu_domain",
                                              "oracle_grid", "candidates", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument(key + ": unknown config field");
    }
  }
  field("models", cfg.models);
  field("sample_sizes", cfg.sample_sizes);
  field("replicates", cfg.replicates);
  field("base_seed", cfg.base_seed);
  field("gridsize", cfg.gridsize);
  field("oracle_grid", cfg.oracle_grid);
  field("candidates", cfg.candidates);
  field("threads", cfg.threads);
  if (j.contains("selectors")) {
    std::vector<std::string> names;
    field("selectors", names);
    cfg.selectors.clear();
    for (const auto& name : names) {
      auto s = parse_selector(name);
      if (!s) {
        throw std::invalid_argument("selectors: unknown selector '" + name + "'");
      }
      cfg.selectors.push_back(*s);
    }
  }
  if (j.contains("em")) {
    const auto& e = j.at("em");
    try {
      cfg.em.max_iter = e.value("max_iter", cfg.em.max_iter);
      cfg.em.rel_tol = e.value("rel_tol", cfg.em.rel_tol);
      cfg.em.n_restarts = e.value("n_restarts", cfg.em.n_restarts);
    } catch (const json::exception&) {
      throw std::invalid_argument("em: wrong type");
    }
  }
  if (j.contains("nu_domain")) {
    const auto& d = j.at("nu_domain");
    NuSearchDomain dom;
    try {
      dom.nu_min = d.value("nu_min", dom.nu_min);
      dom.nu_max = d.value("nu_max", dom.nu_max);
      dom.probes = d.value("probes", dom.probes);
      dom.rel_tol = d.value("rel_tol", dom.rel_tol);
    } catch (const json::exception&) {
      throw std::invalid_argument("nu_domain: wrong type");
    }
    cfg.nu_domain = dom;
  }
  cfg.validate();
  return cfg;
}

std::string report_to_json(const SimulationReport& report, bool include_wall_time) {
  json j;
  j["base_seed"] = report.base_seed;
  j["config_hash"] = report.config_hash;
  if (include_wall_time) {
    j["wall_seconds"] = report.wall_seconds;
  }
  json rows = json::array();
  for (const auto& r : report.rows) {
    json row{{"model", r.model},
             {"n", r.n},
             {"selector", std::string(selector_name(r.selector))},
             {"mean_ise", r.mean_ise},
             {"sd_ise", r.sd_ise},
             {"mise_x100", 100.0 * r.mean_ise},
             {"sd_x100", 100.0 * r.sd_ise},
             {"replicates", r.replicates},
             {"failures", r.failures},
             {"fallback_count", r.fallback_count},
             {"mean_nu", r.mean_nu}};
    row["mean_selected_M"] = r.mean_selected_components ? json(*r.mean_selected_components) : json(nullptr);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j.dump(2);
}

std::string format_table(const SimulationReport& report) {
  std::vector<std::size_t> sizes;
  std::vector<std::string> models;
  std::vector<Selector> selectors;
  for (const auto& r : report.rows) {
    if (std::find(sizes.begin(), sizes.end(), r.n) == sizes.end()) {
      sizes.push_back(r.n);
    }
    if (std::find(models.begin(), models.end(), r.model) == models.end()) {
      models.push_back(r.model);
    }
    if (std::find(selectors.begin(), selectors.end(), r.selector) == selectors.end()) {
      selectors.push_back(r.selector);
    }
  }
  std::ostringstream os;
  constexpr int kWidth = 20;
  for (const auto n : sizes) {
    os << std::left << std::setw(6) << ("n=" + std::to_string(n));
    for (auto s : selectors) {
      const std::string head = s == Selector::Oracle ? "MISE(nu0)" : "MISE(" + std::string(selector_name(s)) + ")";
      os << std::right << std::setw(kWidth) << head;
    }
    os << '\n';
    for (const auto& m : models) {
      os << std::left << std::setw(6) << m;
      for (auto s : selectors) {
        const CellResult* cell = report.find(m, n, s);
        std::string text = "-";
        if (cell) {
          text = format_fixed(100.0 * cell->mean_ise, 4);
          if (s != Selector::Oracle) {
            text += " (" + format_fixed(100.0 * cell->sd_ise, 4) + ")";
          }
        }
        os << std::right << std::setw(kWidth) << text;
      }
      os << '\n';
    }
    os << '\n';
  }
  return os.str();
}

std::vector<CellComparison> compare_to_reference(const SimulationReport& report, const ReferenceTable& ref,
                                                 double k_sigma, double slack_fraction) {
  std::vector<CellComparison> out;
  for (const auto& cell : report.rows) {
    CellComparison c{.model = cell.model, .n = cell.n, .selector = std::string(selector_name(cell.selector))};
    c.observed_x100 = 100.0 * cell.mean_ise;
    const auto it = std::find_if(ref.begin(), ref.end(), [&](const ReferenceRow& r) {
      return r.model == cell.model && r.n == cell.n && r.selector == c.selector;
    });
    if (it == ref.end()) {
      c.status = CellStatus::Missing;
      out.push_back(c);
      continue;
    }
    c.reference_x100 = it->mise_x100;
    const double sd = it->sd_x100.value_or(0.0);
    const double se = cell.replicates > 0 ? sd / std::sqrt(static_cast<double>(cell.replicates)) : 0.0;
    c.half_width = k_sigma * se + slack_fraction * std::abs(it->mise_x100);
    const double diff = c.observed_x100 - c.reference_x100;
    if (se > 0.0) {
      c.z = diff / se;
    } else {
      c.z = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    }
    c.status = std::abs(diff) <= c.half_width ? CellStatus::Pass : CellStatus::Fail;
    out.push_back(c);
  }
  return out;
}

}  // namespace circkde
