// SPDX-License-Identifier: Apache-2.0
#include "ndf/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace ndf {

std::string to_string(ActorKind k) {
  switch (k) {
    case ActorKind::Operator: return "operator";
    case ActorKind::Decider: return "decider";
    case ActorKind::TrueGate: return "true_gate";
    case ActorKind::FalseGate: return "false_gate";
    case ActorKind::Merge: return "merge";
    case ActorKind::StaticWhere: return "static_where";
    case ActorKind::DynamicWhere: return "dynamic_where";
    case ActorKind::When: return "when";
    case ActorKind::Source: return "source";
    case ActorKind::Sink: return "sink";
    case ActorKind::Const: return "const";
  }
  return "?";
}

std::string to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "?";
}

bool cmp_holds(CmpOp op, double lhs, double rhs) {
  switch (op) {
    case CmpOp::Lt: return lhs < rhs;
    case CmpOp::Le: return lhs <= rhs;
    case CmpOp::Gt: return lhs > rhs;
    case CmpOp::Ge: return lhs >= rhs;
  }
  return false;
}

bool Actor::is_copy() const {
  const auto* op = std::get_if<OperatorParams>(&params);
  return op != nullptr && op->fn == "copy";
}

std::vector<ArcKind> Actor::input_ports() const {
  switch (kind()) {
    case ActorKind::Operator: {
      const auto& p = as<OperatorParams>();
      return std::vector<ArcKind>(p.arity, is_copy() ? p.copy_kind : ArcKind::Data);
    }
    case ActorKind::Decider:
      return std::vector<ArcKind>(as<DeciderParams>().arity, ArcKind::Data);
    case ActorKind::TrueGate:
    case ActorKind::FalseGate:
      return {ArcKind::Control, ArcKind::Data};
    case ActorKind::Merge:
      return {ArcKind::Control, ArcKind::Data, ArcKind::Data};
    case ActorKind::StaticWhere:
      return std::vector<ArcKind>(as<StaticWhereParams>().pattern.cols(), ArcKind::Data);
    case ActorKind::DynamicWhere: {
      const auto& ps = as<DynamicWhereParams>().patterns;
      int cols = ps.empty() ? 0 : ps.front().cols();
      std::vector<ArcKind> r{ArcKind::Switch};
      r.insert(r.end(), cols, ArcKind::Data);
      return r;
    }
    case ActorKind::When:
      return std::vector<ArcKind>(as<WhenParams>().config.n_inputs, ArcKind::Data);
    case ActorKind::Source:
    case ActorKind::Const:
      return {};
    case ActorKind::Sink:
      return {ArcKind::Data};
  }
  return {};
}

std::vector<ArcKind> Actor::output_ports() const {
  switch (kind()) {
    case ActorKind::Operator: {
      const auto& p = as<OperatorParams>();
      return std::vector<ArcKind>(p.outputs, is_copy() ? p.copy_kind : ArcKind::Data);
    }
    case ActorKind::Decider:
      return {ArcKind::Control};
    case ActorKind::TrueGate:
    case ActorKind::FalseGate:
    case ActorKind::Merge:
      return {ArcKind::Data};
    case ActorKind::StaticWhere:
      return std::vector<ArcKind>(as<StaticWhereParams>().pattern.rows(), ArcKind::Data);
    case ActorKind::DynamicWhere: {
      const auto& ps = as<DynamicWhereParams>().patterns;
      return std::vector<ArcKind>(ps.empty() ? 0 : ps.front().rows(), ArcKind::Data);
    }
    case ActorKind::When:
      return {ArcKind::Switch};
    case ActorKind::Source:
    case ActorKind::Const:
      return {ArcKind::Data};
    case ActorKind::Sink:
      return {};
  }
  return {};
}

const Actor* DataflowGraph::find(const std::string& id) const {
  for (const auto& a : actors)
    if (a.id == id) return &a;
  return nullptr;
}

Actor* DataflowGraph::find(const std::string& id) {
  for (auto& a : actors)
    if (a.id == id) return &a;
  return nullptr;
}

int DataflowGraph::arc_index(const Arc& a) const {
  for (size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i] == a) return static_cast<int>(i);
  return -1;
}

bool graphs_equal(const DataflowGraph& a, const DataflowGraph& b) {
  auto sorted_actors = [](const DataflowGraph& g) {
    std::vector<Actor> v = g.actors;
    std::sort(v.begin(), v.end(), [](const Actor& x, const Actor& y) { return x.id < y.id; });
    return v;
  };
  auto sorted_arcs = [](const DataflowGraph& g) {
    std::vector<Arc> v = g.arcs;
    std::sort(v.begin(), v.end());
    return v;
  };
  // Initial tokens grouped per arc, preserving their FIFO order within one arc.
  auto tokens_by_arc = [](const DataflowGraph& g) {
    std::map<Arc, std::vector<std::string>> m;
    for (const auto& it : g.initial_tokens) {
      if (it.arc_index < 0 || it.arc_index >= static_cast<int>(g.arcs.size())) continue;
      m[g.arcs[it.arc_index]].push_back(to_string(it.token));
    }
    return m;
  };
  return sorted_actors(a) == sorted_actors(b) && sorted_arcs(a) == sorted_arcs(b) &&
         tokens_by_arc(a) == tokens_by_arc(b);
}

bool ValidationReport::ok() const {
  return std::none_of(items.begin(), items.end(),
                      [](const Violation& v) { return v.severity == Severity::Error; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : items) {
    os << (v.severity == Severity::Error ? "error" : "warning");
    if (!v.actor_id.empty()) os << " [" << v.actor_id << "]";
    os << ": " << v.message << "\n";
  }
  return os.str();
}

namespace {

void check_pattern(const ConnectionPattern& p, const std::string& id, const std::string& what,
                   std::vector<Violation>& out) {
  if (p.rows() < 1 || p.cols() < 1) {
    out.push_back({Severity::Error, id, what + ": pattern must have rows >= 1 and cols >= 1"});
    return;
  }
  for (int i = 0; i < p.cols(); ++i) {
    int n = p.column_count(i);
    if (n > 1)
      out.push_back({Severity::Error, id,
                     what + ": input column " + std::to_string(i) + " routes to " +
                         std::to_string(n) + " outputs (at most one allowed)"});
    else if (n == 0)
      out.push_back({Severity::Warning, id,
                     what + ": input column " + std::to_string(i) + " is all zero (token dropped)"});
  }
}

void check_when(const WhenConfig& w, const std::string& id, std::vector<Violation>& out) {
  if (w.k < 1) out.push_back({Severity::Error, id, "when: membrane dimension k must be >= 1"});
  if (w.n_inputs < 1) out.push_back({Severity::Error, id, "when: input count must be >= 1"});
  if (w.k >= 1 && w.n_inputs >= 1 &&
      w.weights.size() != static_cast<size_t>(w.k) * w.n_inputs)
    out.push_back({Severity::Error, id,
                   "when: weight matrix shape must be n_inputs x k (" +
                       std::to_string(w.n_inputs) + "x" + std::to_string(w.k) + "), got " +
                       std::to_string(w.weights.size()) + " entries"});
  if (!w.v_init.empty() && w.v_init.size() != static_cast<size_t>(w.k))
    out.push_back({Severity::Error, id, "when: initial potential length differs from k"});
  if (w.f.type == Nonlinearity::Type::Leak && !(w.f.leak > 0.0 && w.f.leak <= 1.0))
    out.push_back({Severity::Error, id, "when: leak factor must be in (0, 1]"});
  if (w.f.type == Nonlinearity::Type::Clamp && !(w.f.lo <= w.f.hi))
    out.push_back({Severity::Error, id, "when: clamp bounds must satisfy lo <= hi"});
  for (size_t r = 0; r < w.regions.size(); ++r) {
    const Region& reg = w.regions[r];
    for (const auto& t : reg.tests)
      if (t.coef.size() != static_cast<size_t>(w.k))
        out.push_back({Severity::Error, id,
                       "when: region " + std::to_string(r) + " test coefficient length differs from k"});
    if (!reg.anchor.empty() && reg.anchor.size() != static_cast<size_t>(w.k))
      out.push_back({Severity::Error, id,
                     "when: region " + std::to_string(r) + " anchor length differs from k"});
    if (reg.pattern_id < 0)
      out.push_back({Severity::Error, id,
                     "when: region " + std::to_string(r) + " has negative pattern id"});
  }
}

}  // namespace

ValidationReport validate(const DataflowGraph& g) {
  std::vector<Violation> out;

  std::map<std::string, const Actor*> by_id;
  for (const auto& a : g.actors) {
    if (a.id.empty()) out.push_back({Severity::Error, a.id, "actor has empty id"});
    if (!by_id.emplace(a.id, &a).second)
      out.push_back({Severity::Error, a.id, "duplicate actor id"});
  }

  // Per-actor parameter checks.
  for (const auto& a : g.actors) {
    switch (a.kind()) {
      case ActorKind::Operator: {
        const auto& p = a.as<OperatorParams>();
        if (p.arity < 1) out.push_back({Severity::Error, a.id, "operator arity must be >= 1"});
        if (p.outputs < 1) out.push_back({Severity::Error, a.id, "operator output count must be >= 1"});
        if (!a.is_copy() && p.outputs != 1)
          out.push_back({Severity::Error, a.id, "only copy operators may have multiple outputs"});
        if (a.is_copy() && p.arity != 1)
          out.push_back({Severity::Error, a.id, "copy operator must have exactly one input"});
        if (p.fn.empty()) out.push_back({Severity::Error, a.id, "operator fn is empty"});
        break;
      }
      case ActorKind::Decider: {
        const auto& p = a.as<DeciderParams>();
        if (p.arity < 1) out.push_back({Severity::Error, a.id, "decider arity must be >= 1"});
        if (p.fn.empty()) out.push_back({Severity::Error, a.id, "decider fn is empty"});
        break;
      }
      case ActorKind::StaticWhere:
        check_pattern(a.as<StaticWhereParams>().pattern, a.id, "static where", out);
        break;
      case ActorKind::DynamicWhere: {
        const auto& ps = a.as<DynamicWhereParams>().patterns;
        if (ps.empty()) {
          out.push_back({Severity::Error, a.id, "dynamic where has an empty pattern table"});
          break;
        }
        for (size_t i = 0; i < ps.size(); ++i) {
          if (ps[i].rows() != ps.front().rows() || ps[i].cols() != ps.front().cols())
            out.push_back({Severity::Error, a.id,
                           "pattern table shapes differ: pattern " + std::to_string(i) + " is " +
                               std::to_string(ps[i].rows()) + "x" + std::to_string(ps[i].cols()) +
                               ", pattern 0 is " + std::to_string(ps.front().rows()) + "x" +
                               std::to_string(ps.front().cols())});
          check_pattern(ps[i], a.id, "pattern " + std::to_string(i), out);
        }
        break;
      }
      case ActorKind::When:
        check_when(a.as<WhenParams>().config, a.id, out);
        break;
      default:
        break;
    }
  }

  // Arc endpoint and kind checks; per-port occupancy.
  std::map<std::pair<std::string, int>, int> in_count, out_count;
  for (size_t i = 0; i < g.arcs.size(); ++i) {
    const Arc& arc = g.arcs[i];
    auto si = by_id.find(arc.src);
    auto di = by_id.find(arc.dst);
    if (si == by_id.end()) {
      out.push_back({Severity::Error, arc.src, "arc " + std::to_string(i) + " references unknown actor"});
      continue;
    }
    if (di == by_id.end()) {
      out.push_back({Severity::Error, arc.dst, "arc " + std::to_string(i) + " references unknown actor"});
      continue;
    }
    auto src_ports = si->second->output_ports();
    auto dst_ports = di->second->input_ports();
    if (arc.src_port < 0 || arc.src_port >= static_cast<int>(src_ports.size())) {
      out.push_back({Severity::Error, arc.src,
                     "arc " + std::to_string(i) + " output port " + std::to_string(arc.src_port) +
                         " out of range"});
      continue;
    }
    if (arc.dst_port < 0 || arc.dst_port >= static_cast<int>(dst_ports.size())) {
      out.push_back({Severity::Error, arc.dst,
                     "arc " + std::to_string(i) + " input port " + std::to_string(arc.dst_port) +
                         " out of range"});
      continue;
    }
    if (src_ports[arc.src_port] != arc.kind)
      out.push_back({Severity::Error, arc.src,
                     "arc " + std::to_string(i) + " kind " + to_string(arc.kind) +
                         " does not match source port kind " + to_string(src_ports[arc.src_port])});
    if (dst_ports[arc.dst_port] != arc.kind)
      out.push_back({Severity::Error, arc.dst,
                     "arc " + std::to_string(i) + " kind " + to_string(arc.kind) +
                         " does not match destination port kind " + to_string(dst_ports[arc.dst_port])});
    ++in_count[{arc.dst, arc.dst_port}];
    ++out_count[{arc.src, arc.src_port}];
  }

  for (const auto& a : g.actors) {
    auto ins = a.input_ports();
    for (size_t p = 0; p < ins.size(); ++p) {
      auto it = in_count.find({a.id, static_cast<int>(p)});
      int n = it == in_count.end() ? 0 : it->second;
      if (n == 0)
        out.push_back({Severity::Error, a.id, "missing arc on input port " + std::to_string(p)});
      else if (n > 1)
        out.push_back({Severity::Error, a.id,
                       "input port " + std::to_string(p) + " has " + std::to_string(n) +
                           " incoming arcs (exactly one allowed)"});
    }
    auto outs = a.output_ports();
    for (size_t p = 0; p < outs.size(); ++p) {
      auto it = out_count.find({a.id, static_cast<int>(p)});
      int n = it == out_count.end() ? 0 : it->second;
      if (n == 0)
        out.push_back({Severity::Error, a.id, "dangling output port " + std::to_string(p)});
      else if (n > 1)
        out.push_back({Severity::Error, a.id,
                       "output port " + std::to_string(p) + " fans out to " + std::to_string(n) +
                           " arcs (use a copy operator)"});
    }
  }

  // Switch plumbing: every when's emitted pattern ids must exist in the
  // table of every dynamic where its switch output reaches (through copies).
  for (const auto& a : g.actors) {
    if (a.kind() != ActorKind::When) continue;
    std::vector<const Actor*> targets;
    std::set<std::string> seen;
    std::vector<std::pair<std::string, int>> frontier{{a.id, 0}};
    while (!frontier.empty()) {
      auto [aid, port] = frontier.back();
      frontier.pop_back();
      for (const auto& arc : g.arcs) {
        if (arc.src != aid || arc.src_port != port || arc.kind != ArcKind::Switch) continue;
        auto it = by_id.find(arc.dst);
        if (it == by_id.end()) continue;
        const Actor* dst = it->second;
        if (!seen.insert(dst->id + "#" + std::to_string(arc.dst_port)).second) continue;
        if (dst->kind() == ActorKind::DynamicWhere) {
          targets.push_back(dst);
        } else if (dst->is_copy()) {
          for (int o = 0; o < dst->as<OperatorParams>().outputs; ++o)
            frontier.push_back({dst->id, o});
        }
      }
    }
    for (const Actor* dw : targets) {
      int table = static_cast<int>(dw->as<DynamicWhereParams>().patterns.size());
      for (const auto& reg : a.as<WhenParams>().config.regions)
        if (reg.pattern_id >= table)
          out.push_back({Severity::Error, a.id,
                         "emitted pattern id " + std::to_string(reg.pattern_id) +
                             " not present in pattern table of " + dw->id});
    }
  }

  // Initial token placement.
  for (size_t i = 0; i < g.initial_tokens.size(); ++i) {
    const auto& it = g.initial_tokens[i];
    if (it.arc_index < 0 || it.arc_index >= static_cast<int>(g.arcs.size())) {
      out.push_back({Severity::Error, "",
                     "initial token " + std::to_string(i) + " references arc " +
                         std::to_string(it.arc_index) + " which does not exist"});
      continue;
    }
    const Arc& arc = g.arcs[it.arc_index];
    if (it.token.kind != arc.kind)
      out.push_back({Severity::Error, arc.dst,
                     "initial token " + std::to_string(i) + " kind " + to_string(it.token.kind) +
                         " does not match arc kind " + to_string(arc.kind)});
    if (it.token.kind == ArcKind::Data && !std::isfinite(it.token.value))
      out.push_back({Severity::Error, arc.dst,
                     "initial token " + std::to_string(i) + " has a non-finite data value"});
    if (it.token.kind == ArcKind::Switch) {
      auto di = by_id.find(arc.dst);
      if (di != by_id.end() && di->second->kind() == ActorKind::DynamicWhere) {
        int table = static_cast<int>(di->second->as<DynamicWhereParams>().patterns.size());
        if (it.token.pattern_id < 0 || it.token.pattern_id >= table)
          out.push_back({Severity::Error, arc.dst,
                         "initial switch token pattern id " + std::to_string(it.token.pattern_id) +
                             " out of range for table of size " + std::to_string(table)});
      }
    }
  }

  std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
    if (a.actor_id != b.actor_id) return a.actor_id < b.actor_id;
    if (a.message != b.message) return a.message < b.message;
    return a.severity < b.severity;
  });
  return ValidationReport{std::move(out)};
}

}  // namespace ndf
