#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "circkde/circular_models.hpp"

namespace circkde {

/// The twenty simulation models, one line per model: `<id> <formula>`.
/// Formulas use weights as fractions, `pi`, `sqrt()` and the family tags
/// CU, vM(mu,kappa), CAR(mu,rho), WN(mu,rho), WC(mu,rho), WSN(xi,eta,lambda).
[[nodiscard]] std::string_view catalogue_table();

/// Parsed catalogue, in table order (M1..M20).
[[nodiscard]] const std::vector<ModelSpec>& catalogue();

/// Throws std::out_of_range for unknown ids.
[[nodiscard]] const ModelSpec& catalogue_model(std::string_view id);

/// Numeric part of an id such as "M7"; throws std::invalid_argument otherwise.
[[nodiscard]] int model_number(std::string_view id);

/// Parses a formula such as "1/2*vM(0,4) + 1/2*vM(pi,4)".
[[nodiscard]] ModelSpec parse_model(std::string id, std::string_view formula);

/// Evaluates an arithmetic expression over numbers, pi, sqrt(), + - * / and parentheses.
[[nodiscard]] double evaluate_expression(std::string_view text);

}  // namespace circkde
