#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "circkde/catalogue.hpp"
#include "circkde/kde.hpp"
#include "circkde/simulation.hpp"

namespace circkde::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string unit_name(Unit u) { return u == Unit::Degrees ? "degrees" : "radians"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  f << text;
}

json primitive_json(const WeightedPrimitive& p) {
  json j{{"weight", p.weight}, {"family", family_name(p.dist)}};
  std::visit(
      [&j](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, VonMises>) {
          j["mu"] = d.mu;
          j["kappa"] = d.kappa;
        } else if constexpr (std::is_same_v<T, Cardioid> || std::is_same_v<T, WrappedNormal> ||
                             std::is_same_v<T, WrappedCauchy>) {
          j["mu"] = d.mu;
          j["rho"] = d.rho;
        } else if constexpr (std::is_same_v<T, WrappedSkewNormal>) {
          j["xi"] = d.xi;
          j["eta"] = d.eta;
          j["lambda"] = d.lambda;
        }
      },
      p.dist);
  return j;
}

json bandwidth_json(const BandwidthResult& r) {
  json j{{"selector", std::string(selector_name(r.selector))},
         {"nu", r.nu},
         {"objective", r.objective},
         {"fallback", r.fallback}};
  if (r.kappa_hat) {
    j["kappa_hat"] = *r.kappa_hat;
  }
  if (r.selector == Selector::PlugIn || r.fallback) {
    j["selected_M"] = r.selected_components ? json(*r.selected_components) : json(nullptr);
    j["curvature"] = r.curvature ? json(*r.curvature) : json(nullptr);
    j["fallback_reason"] = r.fallback_reason;
    json table = json::array();
    for (const auto& c : r.aic_table) {
      table.push_back({{"M", c.components},
                       {"aic", c.aic ? json(*c.aic) : json(nullptr)},
                       {"valid", c.valid},
                       {"curvature", c.curvature ? json(*c.curvature) : json(nullptr)},
                       {"reason", c.reason}});
    }
    j["aic_table"] = table;
  }
  return j;
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string part;
    while (std::getline(ss, part, ',')) {
      part = trim(part);
      if (!part.empty()) {
        out.push_back(part);
      }
    }
  }
  return out;
}

}  // namespace

AngleSample read_angles(std::istream& in, Unit unit) {
  AngleSample sample;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    double value = 0.0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    if (*begin == '+') {
      ++begin;
    }
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
      throw AngleFileError(kUsageError,
                           "line " + std::to_string(line_no) + ": not a finite number: '" + text + "'");
    }
    sample.push_back(wrap_angle(unit == Unit::Degrees ? value * kDegree : value));
  }
  return sample;
}

AngleSample read_angle_file(const std::string& path, Unit unit) {
  std::ifstream in(path);
  if (!in) {
    throw AngleFileError(kUnreadableFile, "cannot read angle file '" + path + "'");
  }
  return read_angles(in, unit);
}

std::vector<std::size_t> rose_counts(const AngleSample& sample, std::size_t bins) {
  if (bins == 0) {
    throw std::invalid_argument("rose diagram needs at least one bin");
  }
  std::vector<std::size_t> counts(bins, 0);
  for (double theta : sample) {
    auto b = static_cast<std::size_t>(wrap_angle(theta) / kTwoPi * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  return counts;
}

std::vector<Selector> parse_selector_list(const std::vector<std::string>& names) {
  std::vector<Selector> out;
  for (const auto& name : split_list(names)) {
    auto s = parse_selector(name);
    if (!s) {
      throw std::invalid_argument("unknown selector '" + name + "' (expected RT, PI, LCV or ORACLE)");
    }
    out.push_back(*s);
  }
  if (out.empty()) {
    throw std::invalid_argument("no selectors given");
  }
  return out;
}

int cmd_fit(const FitOptions& opts, std::ostream& out, std::ostream& err) {
  AngleSample sample;
  try {
    sample = read_angle_file(opts.input, opts.unit);
  } catch (const AngleFileError& e) {
    err << "error: " << e.what() << '\n';
    return e.code();
  }
  if (sample.size() < 2) {
    err << "error: need at least 2 angles, got " << sample.size() << '\n';
    return kTooFewAngles;
  }
  try {
    check_gridsize(opts.gridsize);
    if (opts.rose_bins == 0) {
      throw std::invalid_argument("--rose-bins must be positive");
    }
    for (auto s : opts.selectors) {
      if (s == Selector::Oracle) {
        throw std::invalid_argument("ORACLE needs a known truth and is only available in simulate");
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  const fs::path dir(opts.output_dir);
  fs::create_directories(dir);
  const auto domain = NuSearchDomain::for_sample_size(sample.size());
  EmConfig em;
  em.seed = opts.seed;

  json report{{"input", opts.input}, {"n", sample.size()}, {"unit", unit_name(opts.unit)}, {"seed", opts.seed}};
  json selectors = json::array();
  for (auto s : opts.selectors) {
    BandwidthResult bw;
    switch (s) {
      case Selector::RuleOfThumb:
        bw = rule_of_thumb(sample);
        break;
      case Selector::PlugIn:
        bw = plug_in(sample, em, domain);
        break;
      case Selector::Lcv:
        bw = lcv(sample, domain);
        break;
      case Selector::Oracle:
        break;
    }
    const auto grid = kde_grid(KdeFit(sample, bw.nu), opts.gridsize);
    const std::string file = "density_" + std::string(selector_name(s)) + ".csv";
    std::ostringstream csv;
    csv << "# circkde fit selector=" << selector_name(s) << " nu=" << std::setprecision(17) << bw.nu
        << "; theta in radians, density per radian\n";
    csv << "theta,density\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
      csv << grid.theta(k) << ',' << grid.values[k] << '\n';
    }
    write_text(dir / file, csv.str());

    auto j = bandwidth_json(bw);
    j["density_file"] = file;
    selectors.push_back(j);

    out << std::left << std::setw(4) << selector_name(s) << " nu = " << std::setprecision(8) << bw.nu;
    if (bw.selected_components) {
      out << "  (selected M = " << *bw.selected_components << ")";
    }
    if (bw.fallback) {
      out << "  (fallback: " << bw.fallback_reason << ")";
    }
    out << '\n';
  }
  report["selectors"] = selectors;

  const auto counts = rose_counts(sample, opts.rose_bins);
  const double width = (opts.unit == Unit::Degrees ? 360.0 : kTwoPi) / static_cast<double>(opts.rose_bins);
  std::ostringstream rose;
  rose << "# arcs in " << unit_name(opts.unit) << "\n";
  rose << "bin_start,bin_end,count\n" << std::setprecision(17);
  for (std::size_t b = 0; b < counts.size(); ++b) {
    rose << width * static_cast<double>(b) << ',' << width * static_cast<double>(b + 1) << ',' << counts[b]
         << '\n';
  }
  write_text(dir / "rose.csv", rose.str());
  report["rose_file"] = "rose.csv";
  report["rose_counts"] = counts;
  write_text(dir / "report.json", report.dump(2) + "\n");
  return kOk;
}

int cmd_sample(const SampleOptions& opts, std::ostream& out, std::ostream& err) {
  const ModelSpec* model = nullptr;
  try {
    model = &catalogue_model(opts.model);
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }
  Rng rng(opts.seed, 0);
  const auto draws = sample(*model, opts.n, rng);
  std::ostringstream text;
  text << "# circkde sample model=" << opts.model << " n=" << opts.n << " seed=" << opts.seed
       << " unit=" << unit_name(opts.unit) << '\n';
  text << std::setprecision(17);
  for (double theta : draws) {
    text << (opts.unit == Unit::Degrees ? theta / kDegree : theta) << '\n';
  }
  if (opts.output.empty()) {
    out << text.str();
  } else {
    try {
      write_text(opts.output, text.str());
    } catch (const std::runtime_error& e) {
      err << "error: " << e.what() << '\n';
      return kUnreadableFile;
    }
  }
  return kOk;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg = opts.full ? ExperimentConfig::full() : ExperimentConfig::smoke();
  try {
    if (!opts.config_file.empty()) {
      std::ifstream f(opts.config_file);
      if (!f) {
        err << "error: cannot read config '" << opts.config_file << "'\n";
        return kUnreadableFile;
      }
      std::stringstream buf;
      buf << f.rdbuf();
      cfg = config_from_json(buf.str());
    }
    if (opts.models) {
      cfg.models = split_list(*opts.models);
    }
    if (opts.sample_sizes) {
      cfg.sample_sizes = *opts.sample_sizes;
    }
    if (opts.replicates) {
      cfg.replicates = *opts.replicates;
    }
    if (opts.selectors) {
      cfg.selectors = parse_selector_list(*opts.selectors);
    }
    if (opts.seed) {
      cfg.base_seed = *opts.seed;
    }
    if (opts.gridsize) {
      cfg.gridsize = *opts.gridsize;
    }
    if (opts.threads) {
      cfg.threads = *opts.threads;
    }
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kUsageError;
  }

  ReferenceTable ref;
  if (!opts.reference.empty()) {
    try {
      ref = load_reference_table(opts.reference);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kUnreadableFile;
    }
  }

  const auto report = run_experiment(cfg);
  const fs::path dir(opts.output_dir);
  fs::create_directories(dir);
  write_text(dir / "report.json", report_to_json(report) + "\n");
  const auto table = format_table(report);
  write_text(dir / "report.txt", table);
  out << table;

  if (opts.reference.empty()) {
    return kOk;
  }
  bool failed = false;
  for (const auto& c : compare_to_reference(report, ref, opts.k_sigma)) {
    const char* status = c.status == CellStatus::Pass ? "PASS" : c.status == CellStatus::Fail ? "FAIL" : "MISSING";
    out << status << ' ' << c.model << " n=" << c.n << ' ' << c.selector;
    if (c.status != CellStatus::Missing) {
      out << std::fixed << std::setprecision(4) << " observed=" << c.observed_x100
          << " reference=" << c.reference_x100 << " window=+-" << c.half_width << std::setprecision(2)
          << " z=" << c.z << std::defaultfloat;
    }
    out << '\n';
    failed = failed || c.status == CellStatus::Fail;
  }
  return failed ? kReferenceFailure : kOk;
}

int cmd_models(std::ostream& out) {
  json list = json::array();
  for (const auto& m : catalogue()) {
    json parts = json::array();
    for (const auto& p : m.parts()) {
      parts.push_back(primitive_json(p));
    }
    list.push_back({{"id", m.id()}, {"formula", m.formula()}, {"components", parts}});
  }
  out << list.dump(2) << '\n';
  return kOk;
}

}  // namespace circkde::cli
