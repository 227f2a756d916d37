#include "circkde/catalogue.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace circkde {

namespace {

// Transcribed from the appendix model definitions. M19 lists five
// components; they are kept as written since the weights sum to one.
constexpr std::string_view kTable = R"(M1  CU
M2  vM(pi,1)
M3  WN(0,0.9)
M4  CAR(0,0.5)
M5  WC(0,0.8)
M6  WSN(0,1,20)
M7  1/2*vM(0,4) + 1/2*vM(pi,4)
M8  1/2*vM(2,5) + 1/2*vM(4,5)
M9  1/4*vM(0,2) + 3/4*vM(pi/sqrt(3),2)
M10 4/5*vM(pi,5) + 1/5*WC(4*pi/3,0.9)
M11 1/3*vM(pi/3,6) + 1/3*vM(pi,6) + 1/3*vM(5*pi/3,6)
M12 2/5*vM(pi/2,4) + 1/5*vM(pi,5) + 2/5*vM(3*pi/2,4)
M13 2/5*vM(0.5,6) + 2/5*vM(3,6) + 1/5*vM(5,24)
M14 1/4*vM(0,12) + 1/4*vM(pi/2,12) + 1/4*vM(pi,12) + 1/4*vM(3*pi/2,12)
M15 3/10*WC(pi-1,0.6) + 1/4*WN(pi+0.5,0.9) + 1/4*vM(pi+2,3) + 1/5*WSN(6,1,3)
M16 1/5*vM(pi/5,18) + 1/5*vM(3*pi/5,18) + 1/5*vM(pi,18) + 1/5*vM(7*pi/5,18) + 1/5*vM(9*pi/5,18)
M17 2/3*CAR(pi,0.5) + 1/3*WC(pi,0.9)
M18 1/2*vM(pi,1) + 1/6*vM(pi-0.8,30) + 1/6*vM(pi,30) + 1/6*vM(pi+0.8,30)
M19 4/9*vM(2,3) + 5/36*vM(4,3) + 5/36*vM(3.5,50) + 5/36*vM(4,50) + 5/36*vM(4.5,50)
M20 1/3*WSN(0,0.7,20) + 1/3*WSN(pi,0.7,20) + 1/6*WC(3*pi/4,0.9) + 1/6*WC(7*pi/4,0.9)
)";

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  std::vector<WeightedPrimitive> model() {
    std::vector<WeightedPrimitive> parts;
    parts.push_back(term());
    while (accept('+')) {
      parts.push_back(term());
    }
    expect_end();
    return parts;
  }

  double expression_only() {
    const double v = expression();
    expect_end();
    return v;
  }

 private:
  WeightedPrimitive term() {
    double weight = 1.0;
    skip_space();
    if (!std::isalpha(static_cast<unsigned char>(peek()))) {
      weight = number();
      while (accept('/')) {
        weight /= number();
      }
      expect('*');
    }
    const std::string family = identifier();
    if (family == "CU") {
      return {weight, CircularUniform{}};
    }
    const auto args = arguments();
    auto need = [&](std::size_t count) {
      if (args.size() != count) {
        fail(family + " takes " + std::to_string(count) + " parameters");
      }
    };
    if (family == "vM") {
      need(2);
      return {weight, VonMises{args[0], args[1]}};
    }
    if (family == "CAR") {
      need(2);
      return {weight, Cardioid{args[0], args[1]}};
    }
    if (family == "WN") {
      need(2);
      return {weight, WrappedNormal{args[0], args[1]}};
    }
    if (family == "WC") {
      need(2);
      return {weight, WrappedCauchy{args[0], args[1]}};
    }
    if (family == "WSN") {
      need(3);
      return {weight, WrappedSkewNormal{args[0], args[1], args[2]}};
    }
    fail("unknown family '" + family + "'");
  }

  std::vector<double> arguments() {
    expect('(');
    std::vector<double> args{expression()};
    while (accept(',')) {
      args.push_back(expression());
    }
    expect(')');
    return args;
  }

  double expression() {
    double v = product();
    for (;;) {
      if (accept('+')) {
        v += product();
      } else if (accept('-')) {
        v -= product();
      } else {
        return v;
      }
    }
  }

  double product() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        v /= unary();
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) {
      return -unary();
    }
    return primary();
  }

  double primary() {
    if (accept('(')) {
      const double v = expression();
      expect(')');
      return v;
    }
    skip_space();
    if (std::isalpha(static_cast<unsigned char>(peek()))) {
      const std::string name = identifier();
      if (name == "pi") {
        return std::numbers::pi;
      }
      if (name == "sqrt") {
        expect('(');
        const double v = expression();
        expect(')');
        return std::sqrt(v);
      }
      fail("unknown symbol '" + name + "'");
    }
    return number();
  }

  double number() {
    skip_space();
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) {
      fail("expected a number");
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    if (start == pos_) {
      fail("expected a name");
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      fail(std::string("expected '") + c + "'");
    }
  }

  void expect_end() {
    if (peek() != '\0') {
      fail("unexpected trailing input");
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("cannot parse '" + std::string(text_) + "' at offset " +
                                std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  const auto last = s.find_last_not_of(" \t\r");
  return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
}

std::vector<ModelSpec> build_catalogue() {
  std::vector<ModelSpec> models;
  std::istringstream in{std::string(kTable)};
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto split = line.find(' ');
    std::string id = line.substr(0, split);
    std::string formula = trim(line.substr(split));
    models.push_back(parse_model(std::move(id), formula));
  }
  return models;
}

}  // namespace

std::string_view catalogue_table() { return kTable; }

const std::vector<ModelSpec>& catalogue() {
  static const std::vector<ModelSpec> models = build_catalogue();
  return models;
}

const ModelSpec& catalogue_model(std::string_view id) {
  for (const auto& m : catalogue()) {
    if (m.id() == id) {
      return m;
    }
  }
  throw std::out_of_range("unknown model id '" + std::string(id) + "'");
}

int model_number(std::string_view id) {
  int value = 0;
  if (id.size() < 2 || id.front() != 'M') {
    throw std::invalid_argument("model id must look like M<number>");
  }
  auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), value);
  if (ec != std::errc{} || ptr != id.data() + id.size()) {
    throw std::invalid_argument("model id must look like M<number>");
  }
  return value;
}

ModelSpec parse_model(std::string id, std::string_view formula) {
  Parser parser(formula);
  auto parts = parser.model();
  return ModelSpec(std::move(id), std::move(parts), std::string(formula));
}

double evaluate_expression(std::string_view text) { return Parser(text).expression_only(); }

}  // namespace circkde
