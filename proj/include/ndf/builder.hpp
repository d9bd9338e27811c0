// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ndf/ast.hpp"
#include "ndf/graph.hpp"

namespace ndf::lower {

struct PortRef {
  std::string actor;
  int port = 0;

  friend bool operator==(const PortRef&, const PortRef&) = default;
};

/// A lowered value: a concrete producer port, a compile-time constant, or
/// a set of mutually exclusive alternative producers (at most one of them
/// emits a token per activation, e.g. the two exits of a branch).
struct Value {
  enum class Kind : uint8_t { Port, Lit, Alts } kind = Kind::Lit;
  PortRef port;
  double lit = 0.0;
  std::vector<PortRef> alts;

  static Value of_port(PortRef p) { return {Kind::Port, std::move(p), 0.0, {}}; }
  static Value of_lit(double v) { return {Kind::Lit, {}, v, {}}; }
  static Value of_alts(std::vector<PortRef> a);
};

/// Accumulates actors and point-to-point links, then materializes the
/// graph: producer ports consumed more than once get a copy operator,
/// unconsumed data outputs get a discard sink, and initial tokens are
/// resolved to arc indices.
class GraphBuilder {
 public:
  /// Creates an actor with a unique id `prefix` or `prefix{N}'.
  std::string add(const std::string& prefix, ActorParams params);

  void link(const PortRef& src, const PortRef& dst, ArcKind kind = ArcKind::Data);
  /// Places an initial token on the (single) arc that will enter `dst`.
  void initial(const PortRef& dst, Token token);

  const Actor& actor(const std::string& id) const;
  DataflowGraph finish();

 private:
  struct Link {
    PortRef src;
    PortRef dst;
    ArcKind kind;
  };
  DataflowGraph g_;
  std::vector<Link> links_;
  std::vector<std::pair<PortRef, Token>> initial_;
  std::map<std::string, int> counters_;
};

/// expr with some variables replaced by other expressions.
lang::ExprPtr substitute(const lang::ExprPtr& e, const std::map<std::string, lang::ExprPtr>& map);

/// Constant value of a variable-free expression; nullopt when the
/// expression reads variables or does not evaluate cleanly (division by
/// zero, non-finite result).
std::optional<double> try_const_eval(const lang::ExprPtr& e);

/// Affine view of an arithmetic expression: coef . vars + constant.
struct AffineForm {
  std::map<std::string, double> coef;
  double constant = 0.0;
};

/// nullopt when the expression is not affine in its variables.
std::optional<AffineForm> linearize(const lang::ExprPtr& e);

/// Canonical fn string for an operator: variables renamed to a0..aN in the
/// order given. Returns the string and the per-argument variable list.
std::string fn_string(const lang::ExprPtr& e, const std::vector<std::string>& args);

}  // namespace ndf::lower
