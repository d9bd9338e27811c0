// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

#include "ndf/graph.hpp"

namespace ndf {

/// Malformed or semantically invalid graph text. line/col are 1-based and
/// set to 0 when the error is not tied to a position.
class GraphFormatError : public std::runtime_error {
 public:
  GraphFormatError(std::string msg, int line = 0, int col = 0)
      : std::runtime_error(std::move(msg)), line(line), col(col) {}
  int line;
  int col;
};

/// Graph file format: a JSON object with "actors", "arcs" and
/// "initial_tokens". Numeric values round-trip exactly.
std::string serialize(const DataflowGraph& g);

/// Inverse of serialize. Throws GraphFormatError on malformed input or
/// broken referential integrity; run validate() separately for the full
/// structural check.
DataflowGraph deserialize(const std::string& text);

}  // namespace ndf
