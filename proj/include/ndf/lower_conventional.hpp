// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "ndf/ast.hpp"
#include "ndf/graph.hpp"

namespace ndf::lower {

class LoweringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConventionalOptions {
  /// Fuse whole expressions into single coarse operators (default). When
  /// off, every arithmetic node becomes its own operator and condition
  /// roots become deciders over decomposed operands.
  bool fuse_expressions = true;
};

/// Lowers a program into a conventional dataflow graph built from
/// operators, deciders, true/false gates and merges.
///
/// While loops follow the classic schema: every circulating variable gets
/// a merge whose control arc is pre-initialized with one false token
/// (entry side), a true gate admitting the value into the body, and a
/// false gate releasing it at exit when the value is still live. The
/// decider's control token fans out to all gates and merges.
DataflowGraph lower_conventional(const lang::Program& program,
                                 const ConventionalOptions& options = {});

}  // namespace ndf::lower
