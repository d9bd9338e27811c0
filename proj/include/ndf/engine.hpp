// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndf/graph.hpp"

namespace ndf::engine {

class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SchedulePolicy : uint8_t { FifoDeterministic, Random };

struct RunLimits {
  long long max_steps = 10000000;
  bool allow_nonfinite = false;  // diagnostics: keep running on non-finite data values
};

struct RunOptions {
  SchedulePolicy policy = SchedulePolicy::FifoDeterministic;
  uint64_t seed = 0;
  RunLimits limits;
  bool record_trace = false;
};

struct TraceEntry {
  long long step = 0;
  std::string actor;
  std::vector<Token> consumed;
  std::vector<Token> produced;
};

struct Trace {
  std::vector<TraceEntry> entries;

  /// One line per firing: `step actor_id consumed=[...] produced=[...]`.
  std::string to_text() const;
};

struct RunResult {
  /// Values delivered to named sinks, in sink declaration order. A sink
  /// that received several tokens reports the last one.
  std::vector<std::pair<std::string, double>> outputs;
  long long steps = 0;
  Trace trace;

  double at(const std::string& name) const;
};

/// Token-driven execution state of one run over an immutable graph.
/// Firing rules per actor kind:
///   - operators/deciders/whens fire when every input arc holds a token;
///   - gates need their control and data token, merges the control token
///     plus a data token on the selected side;
///   - a static where forwards one token per firing from its lowest
///     routed non-empty input column;
///   - a dynamic where works in switch-token epochs: the head switch
///     token selects the pattern, each routed output row receives exactly
///     one token per epoch, and the switch token is consumed once every
///     reachable row of the epoch is served. Columns that route
///     identically under every pattern forward eagerly without consuming
///     an epoch slot (they behave like a static where fused in).
/// Unrouted columns are never consumed.
class Execution {
 public:
  Execution(const DataflowGraph& g, const std::map<std::string, double>& inputs,
            const RunOptions& options = {});
  ~Execution();
  Execution(Execution&&) noexcept;
  Execution& operator=(Execution&&) noexcept;

  bool enabled(const std::string& actor_id) const;
  /// Sorted ids of all currently enabled actors.
  std::vector<std::string> enabled_actors() const;
  /// Fires one enabled actor according to the schedule policy. Returns
  /// false when no actor is enabled (the run has quiesced).
  bool step();
  /// Fires a specific actor; it must be enabled.
  void fire(const std::string& actor_id);
  /// Runs until quiescence or the step limit (which throws RunError).
  RunResult run_to_completion();

  long long steps() const;
  const std::deque<Token>& arc_queue(int arc_index) const;
  /// Membrane potential of a when actor.
  const std::vector<double>& membrane(const std::string& when_id) const;
  /// Ids of arcs that still hold tokens.
  std::vector<int> non_empty_arcs() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Validates, executes and collects outputs in one call.
RunResult run(const DataflowGraph& g, const std::map<std::string, double>& inputs,
              const RunOptions& options = {});

/// Region classification used by the when firing rule: first region (in
/// order) whose every half-space test holds for v; -1 when none match.
int classify_region(const WhenConfig& config, const std::vector<double>& v);

}  // namespace ndf::engine
