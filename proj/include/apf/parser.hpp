#pragma once

#include <string>
#include <string_view>

#include "apf/formulation.hpp"

namespace apf {

// Parses the line-oriented formulation grammar:
//
//   item := "objective" ("maximize" | "minimize") agg
//         | "constraint" agg cmp real
//   agg  := ("min" | "max" | "mean") "(" metric "in" "[" real "," real "]" ")"
//   cmp  := ">=" | "<="
//
// One item per line; blank lines are ignored. Item names are assigned
// positionally (obj1..., c1...). Malformed input raises SyntaxError with
// 1-based line/column; structurally invalid but well-formed input (e.g. an
// empty or inverted band) raises InvariantViolation.
Formulation parse_formulation(std::string_view text, std::string id = "");

// Single line convenience used by response parsing; `line_number` only
// affects error reporting.
FormulationItem parse_item(std::string_view line, const std::string& name,
                           int line_number = 1);

}  // namespace apf
