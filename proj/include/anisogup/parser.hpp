#pragma once

#include <stdexcept>
#include <string>

#include "anisogup/model.hpp"
#include "anisogup/tensor.hpp"

namespace anisogup {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                           std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

// Parses a model file; validates declarations, Einstein index discipline and
// expression well-formedness by realizing the model once.
ModelSpec parse_model(const std::string& text);

// Parses one DSL expression against an existing table. Indices follow the
// Einstein convention: twice = summed, once = free, three times = error.
TensorExpr parse_expr(const TablePtr& table, const std::string& text);

}  // namespace anisogup
