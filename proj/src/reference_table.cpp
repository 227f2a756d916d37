#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "circkde/simulation.hpp"

namespace circkde {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double to_double(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument("reference table line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

ReferenceTable parse_reference_table(std::istream& in) {
  ReferenceTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line.front() == '#') {
      continue;
    }
    if (!header_seen) {
      if (line != "model,n,selector,mise_x100,sd_x100") {
        throw std::invalid_argument("reference table: unexpected header '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 5) {
      throw std::invalid_argument("reference table line " + std::to_string(line_no) + ": expected 5 fields");
    }
    ReferenceRow row;
    row.model = f[0];
    row.n = static_cast<std::size_t>(to_double(f[1], line_no));
    row.selector = f[2];
    row.mise_x100 = to_double(f[3], line_no);
    if (!f[4].empty()) {
      row.sd_x100 = to_double(f[4], line_no);
    }
    table.push_back(std::move(row));
  }
  return table;
}

ReferenceTable load_reference_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open reference table '" + path + "'");
  }
  return parse_reference_table(in);
}

}  // namespace circkde
