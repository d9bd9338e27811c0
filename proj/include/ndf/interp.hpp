// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndf/ast.hpp"

namespace ndf::lang {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InterpLimits {
  long long max_loop_iterations = 1000000;
};

struct InterpResult {
  /// Output bindings in order of first `output` mention.
  std::vector<std::pair<std::string, double>> outputs;

  double at(const std::string& name) const;
};

/// Big-step evaluation of a scalar expression over an environment.
/// Boolean subexpressions evaluate to 1.0/0.0; and/or evaluate both
/// operands (matching dataflow execution). Throws EvalError on division
/// by zero, non-finite intermediates, and unbound variables.
double eval_expr(const ExprPtr& e, const std::map<std::string, double>& env);

/// Direct interpretation of a program: the semantic oracle both lowerings
/// are tested against. `inputs` must bind every declared input variable.
/// Throws EvalError when the loop iteration budget is exceeded.
InterpResult interpret(const Program& p, const std::map<std::string, double>& inputs,
                       const InterpLimits& limits = {});

}  // namespace ndf::lang
