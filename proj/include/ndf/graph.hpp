// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ndf/token.hpp"

namespace ndf {

enum class ActorKind : uint8_t {
  Operator,
  Decider,
  TrueGate,
  FalseGate,
  Merge,
  StaticWhere,
  DynamicWhere,
  When,
  Source,
  Sink,
  Const,
};

std::string to_string(ActorKind k);

enum class CmpOp : uint8_t { Lt, Le, Gt, Ge };

std::string to_string(CmpOp op);
bool cmp_holds(CmpOp op, double lhs, double rhs);

/// One linear half-space test a . v <op> c over the membrane vector.
struct HalfSpace {
  std::vector<double> coef;  // length k
  CmpOp op = CmpOp::Lt;
  double c = 0.0;

  friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
};

/// A region of membrane-potential space: the conjunction of its tests.
/// An empty test list always matches (catch-all). Regions are evaluated
/// in order; the first match wins and emits `pattern_id`.
struct Region {
  std::vector<HalfSpace> tests;
  int pattern_id = 0;
  std::vector<double> anchor;  // used by ResetRule::SubtractAnchor; empty = zero

  friend bool operator==(const Region&, const Region&) = default;
};

enum class ResetRule : uint8_t { ToZero, SubtractAnchor, None };

struct Nonlinearity {
  enum class Type : uint8_t { Identity, Leak, Clamp } type = Type::Identity;
  double leak = 1.0;  // Leak: v <- leak * v + I^T W
  double lo = 0.0;    // Clamp bounds, applied elementwise after the sum
  double hi = 0.0;

  static Nonlinearity identity() { return {}; }
  static Nonlinearity leak_of(double l) { return {Type::Leak, l, 0.0, 0.0}; }
  static Nonlinearity clamp_of(double lo, double hi) { return {Type::Clamp, 1.0, lo, hi}; }

  friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;
};

/// Configuration of a when primitive: a spiking neuron with k-dimensional
/// membrane potential, an n_inputs x k weight matrix, and a region table
/// mapping the potential to switch-token pattern ids.
struct WhenConfig {
  int k = 1;
  int n_inputs = 1;
  std::vector<double> weights;  // row-major, n_inputs rows, k cols
  Nonlinearity f;
  std::vector<Region> regions;
  ResetRule reset = ResetRule::ToZero;
  std::vector<double> v_init;  // length k; empty = zeros

  double weight(int input, int dim) const { return weights[static_cast<size_t>(input) * k + dim]; }

  friend bool operator==(const WhenConfig&, const WhenConfig&) = default;
};

// Per-kind actor parameters.

struct OperatorParams {
  std::string fn;      // scalar expression over a0..a{arity-1}; "copy" duplicates
  int arity = 1;
  int outputs = 1;                       // > 1 only for fn == "copy"
  ArcKind copy_kind = ArcKind::Data;     // port kind when fn == "copy"

  friend bool operator==(const OperatorParams&, const OperatorParams&) = default;
};

struct DeciderParams {
  std::string fn;  // boolean expression over a0..a{arity-1}
  int arity = 1;

  friend bool operator==(const DeciderParams&, const DeciderParams&) = default;
};

struct TrueGateParams {
  friend bool operator==(const TrueGateParams&, const TrueGateParams&) = default;
};
struct FalseGateParams {
  friend bool operator==(const FalseGateParams&, const FalseGateParams&) = default;
};
struct MergeParams {
  friend bool operator==(const MergeParams&, const MergeParams&) = default;
};

struct StaticWhereParams {
  ConnectionPattern pattern;

  friend bool operator==(const StaticWhereParams&, const StaticWhereParams&) = default;
};

struct DynamicWhereParams {
  std::vector<ConnectionPattern> patterns;  // pattern_id indexes this table

  friend bool operator==(const DynamicWhereParams&, const DynamicWhereParams&) = default;
};

struct WhenParams {
  WhenConfig config;

  friend bool operator==(const WhenParams&, const WhenParams&) = default;
};

struct SourceParams {
  std::string var;

  friend bool operator==(const SourceParams&, const SourceParams&) = default;
};

struct SinkParams {
  std::string var;  // empty: discard sink, not reported as an output

  friend bool operator==(const SinkParams&, const SinkParams&) = default;
};

struct ConstParams {
  double value = 0.0;

  friend bool operator==(const ConstParams&, const ConstParams&) = default;
};

using ActorParams =
    std::variant<OperatorParams, DeciderParams, TrueGateParams, FalseGateParams, MergeParams,
                 StaticWhereParams, DynamicWhereParams, WhenParams, SourceParams, SinkParams,
                 ConstParams>;

struct Actor {
  std::string id;
  ActorParams params;

  ActorKind kind() const { return static_cast<ActorKind>(params.index()); }

  template <class T>
  const T& as() const { return std::get<T>(params); }
  template <class T>
  T& as() { return std::get<T>(params); }

  bool is_copy() const;

  /// Port kind lists derived from the actor kind and parameters.
  std::vector<ArcKind> input_ports() const;
  std::vector<ArcKind> output_ports() const;

  friend bool operator==(const Actor&, const Actor&) = default;
};

struct Arc {
  std::string src;
  int src_port = 0;
  std::string dst;
  int dst_port = 0;
  ArcKind kind = ArcKind::Data;

  friend bool operator==(const Arc&, const Arc&) = default;
  friend auto operator<=>(const Arc&, const Arc&) = default;
};

struct InitialToken {
  int arc_index = 0;
  Token token;
};

/// Directed multigraph of actors and point-to-point FIFO arcs. Fan-out is
/// materialized as explicit copy operators; fan-in only occurs through
/// merge actors and where primitives.
struct DataflowGraph {
  std::vector<Actor> actors;
  std::vector<Arc> arcs;
  std::vector<InitialToken> initial_tokens;

  const Actor* find(const std::string& id) const;
  Actor* find(const std::string& id);
  int arc_index(const Arc& a) const;
};

/// Structural equality up to actor/arc/initial-token ordering.
bool graphs_equal(const DataflowGraph& a, const DataflowGraph& b);

enum class Severity : uint8_t { Error, Warning };

struct Violation {
  Severity severity = Severity::Error;
  std::string actor_id;  // empty when not tied to one actor
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> items;

  bool ok() const;  // no errors (warnings allowed)
  bool empty() const { return items.empty(); }
  std::string to_string() const;
};

/// Checks every structural invariant: port/arc kind agreement, exactly one
/// arc per port, pattern shapes, when-config dimensions, switch-token
/// referential integrity, and initial-token placement. Violations are
/// ordered by actor id then message; all-zero pattern columns are reported
/// as warnings.
ValidationReport validate(const DataflowGraph& g);

}  // namespace ndf
