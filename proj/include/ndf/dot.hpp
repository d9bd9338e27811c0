// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "ndf/graph.hpp"

namespace ndf {

/// Graphviz rendering. One node per actor labeled with its kind; arcs are
/// styled by kind (data solid, control dashed, switch bold). Output is
/// deterministic: nodes and edges are sorted.
std::string export_dot(const DataflowGraph& g);

}  // namespace ndf
