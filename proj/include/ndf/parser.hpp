// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "ndf/ast.hpp"

namespace ndf::lang {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int col)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line(line),
        col(col) {}
  int line;
  int col;
};

/// Parses a program and runs both static checks: the two-sort type check
/// (conditions boolean, arithmetic real) and definite assignment (every
/// read preceded by an input declaration or assignment on every path).
/// Throws ParseError.
Program parse(const std::string& source);

/// Parses a bare scalar expression (used for actor fn strings). When
/// `engine_builtins` is set, tanh is accepted in addition to sin/cos.
/// No static checks beyond syntax.
ExprPtr parse_expression(const std::string& source, bool engine_builtins = false);

}  // namespace ndf::lang
