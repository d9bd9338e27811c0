// SPDX-License-Identifier: Apache-2.0
#include "ndf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ndf/interp.hpp"
#include "ndf/parser.hpp"

namespace ndf::engine {

std::string Trace::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries) {
    os << e.step << " " << e.actor << " consumed=[";
    for (size_t i = 0; i < e.consumed.size(); ++i)
      os << (i ? " " : "") << to_string(e.consumed[i]);
    os << "] produced=[";
    for (size_t i = 0; i < e.produced.size(); ++i)
      os << (i ? " " : "") << to_string(e.produced[i]);
    os << "]\n";
  }
  return os.str();
}

double RunResult::at(const std::string& name) const {
  for (const auto& [n, v] : outputs)
    if (n == name) return v;
  throw RunError("no output named '" + name + "'");
}

int classify_region(const WhenConfig& config, const std::vector<double>& v) {
  for (size_t r = 0; r < config.regions.size(); ++r) {
    const Region& reg = config.regions[r];
    bool all = true;
    for (const auto& t : reg.tests) {
      double dot = 0.0;
      for (int d = 0; d < config.k; ++d) dot += t.coef[d] * v[d];
      if (!cmp_holds(t.op, dot, t.c)) {
        all = false;
        break;
      }
    }
    if (all) return static_cast<int>(r);
  }
  return -1;
}

namespace {

// Compiled scalar expression over positional arguments a0..aN.
struct CompiledExpr {
  lang::ExprPtr expr;
  std::unordered_map<const lang::Expr*, int> slots;

  static CompiledExpr compile(const std::string& fn, int arity, const std::string& actor_id) {
    CompiledExpr ce;
    try {
      ce.expr = lang::parse_expression(fn, /*engine_builtins=*/true);
    } catch (const lang::ParseError& e) {
      throw RunError("actor '" + actor_id + "': bad fn expression: " + e.what());
    }
    std::set<std::string> reads;
    lang::collect_reads(ce.expr, reads);
    for (const auto& name : reads) {
      int slot = -1;
      if (name.size() >= 2 && name[0] == 'a') {
        bool digits = true;
        for (size_t i = 1; i < name.size(); ++i)
          digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
        if (digits) slot = std::stoi(name.substr(1));
      }
      if (slot < 0 || slot >= arity)
        throw RunError("actor '" + actor_id + "': fn argument '" + name +
                       "' does not name an input port (a0..a" + std::to_string(arity - 1) + ")");
    }
    ce.index_vars(ce.expr);
    return ce;
  }

  void index_vars(const lang::ExprPtr& e) {
    if (!e) return;
    if (e->kind == lang::Expr::Kind::Var) slots[e.get()] = std::stoi(e->var.substr(1));
    index_vars(e->a);
    index_vars(e->b);
  }

  double eval(const std::vector<double>& args) const { return eval_node(expr, args); }

  double eval_node(const lang::ExprPtr& e, const std::vector<double>& args) const {
    using lang::BinOp;
    using lang::Expr;
    switch (e->kind) {
      case Expr::Kind::Number:
        return e->number;
      case Expr::Kind::Var:
        return args[slots.at(e.get())];
      case Expr::Kind::Unary: {
        double a = eval_node(e->a, args);
        return e->un_op == lang::UnOp::Neg ? -a : (a != 0.0 ? 0.0 : 1.0);
      }
      case Expr::Kind::Call: {
        double a = eval_node(e->a, args);
        switch (e->builtin) {
          case lang::Builtin::Sin: return std::sin(a);
          case lang::Builtin::Cos: return std::cos(a);
          case lang::Builtin::Tanh: return std::tanh(a);
        }
        return 0.0;
      }
      case Expr::Kind::Binary: {
        double a = eval_node(e->a, args);
        double b = eval_node(e->b, args);
        switch (e->bin_op) {
          case BinOp::Add: return a + b;
          case BinOp::Sub: return a - b;
          case BinOp::Mul: return a * b;
          case BinOp::Div:
            if (b == 0.0) throw RunError("division by zero");
            return a / b;
          case BinOp::Lt: return a < b ? 1.0 : 0.0;
          case BinOp::Le: return a <= b ? 1.0 : 0.0;
          case BinOp::Gt: return a > b ? 1.0 : 0.0;
          case BinOp::Ge: return a >= b ? 1.0 : 0.0;
          case BinOp::Eq: return a == b ? 1.0 : 0.0;
          case BinOp::Ne: return a != b ? 1.0 : 0.0;
          case BinOp::And: return (a != 0.0 && b != 0.0) ? 1.0 : 0.0;
          case BinOp::Or: return (a != 0.0 || b != 0.0) ? 1.0 : 0.0;
        }
        return 0.0;
      }
    }
    return 0.0;
  }
};

struct DwColumnInfo {
  // Row targeted under each pattern; -1 when unrouted.
  std::vector<int> row_by_pattern;
  bool uniform = false;  // identical routing under every pattern
};

}  // namespace

struct Execution::Impl {
  const DataflowGraph& graph;
  RunOptions options;

  struct ActorRt {
    const Actor* actor = nullptr;
    std::vector<int> in_arcs;   // arc index per input port
    std::vector<int> out_arcs;  // arc index per output port
    // Operator / Decider
    std::optional<CompiledExpr> fn;
    // Source / Const
    bool fired = false;
    double emit_value = 0.0;
    // When
    std::vector<double> membrane;
    // DynamicWhere
    std::vector<DwColumnInfo> columns;
    std::set<int> rows_done;  // per current head switch token
    // Sink
    std::optional<double> sink_value;
  };

  std::vector<ActorRt> rt;
  std::unordered_map<std::string, int> index_of;
  std::vector<int> sorted_order;  // actor indices sorted by id
  std::vector<std::deque<Token>> queues;
  long long step_count = 0;
  std::mt19937_64 rng;
  Trace trace;

  Impl(const DataflowGraph& g, const std::map<std::string, double>& inputs, const RunOptions& opt)
      : graph(g), options(opt), rng(opt.seed) {
    ValidationReport report = validate(g);
    if (!report.ok()) throw RunError("graph is structurally invalid:\n" + report.to_string());

    rt.resize(g.actors.size());
    for (size_t i = 0; i < g.actors.size(); ++i) {
      rt[i].actor = &g.actors[i];
      index_of[g.actors[i].id] = static_cast<int>(i);
      rt[i].in_arcs.assign(g.actors[i].input_ports().size(), -1);
      rt[i].out_arcs.assign(g.actors[i].output_ports().size(), -1);
    }
    queues.resize(g.arcs.size());
    for (size_t ai = 0; ai < g.arcs.size(); ++ai) {
      const Arc& arc = g.arcs[ai];
      rt[index_of.at(arc.src)].out_arcs[arc.src_port] = static_cast<int>(ai);
      rt[index_of.at(arc.dst)].in_arcs[arc.dst_port] = static_cast<int>(ai);
    }
    for (const auto& it : g.initial_tokens) queues[it.arc_index].push_back(it.token);

    for (auto& r : rt) {
      const Actor& a = *r.actor;
      switch (a.kind()) {
        case ActorKind::Operator: {
          const auto& p = a.as<OperatorParams>();
          if (!a.is_copy()) r.fn = CompiledExpr::compile(p.fn, p.arity, a.id);
          break;
        }
        case ActorKind::Decider: {
          const auto& p = a.as<DeciderParams>();
          r.fn = CompiledExpr::compile(p.fn, p.arity, a.id);
          break;
        }
        case ActorKind::Source: {
          const auto& var = a.as<SourceParams>().var;
          auto it = inputs.find(var);
          if (it == inputs.end())
            throw RunError("no input value bound for source '" + a.id + "' (variable '" + var + "')");
          if (!std::isfinite(it->second))
            throw RunError("input for '" + var + "' is not finite");
          r.emit_value = it->second;
          break;
        }
        case ActorKind::Const:
          r.emit_value = a.as<ConstParams>().value;
          break;
        case ActorKind::When: {
          const auto& w = a.as<WhenParams>().config;
          r.membrane = w.v_init.empty() ? std::vector<double>(w.k, 0.0) : w.v_init;
          break;
        }
        case ActorKind::DynamicWhere: {
          const auto& ps = a.as<DynamicWhereParams>().patterns;
          int cols = ps.front().cols();
          r.columns.resize(cols);
          for (int c = 0; c < cols; ++c) {
            auto& info = r.columns[c];
            info.row_by_pattern.resize(ps.size());
            for (size_t p = 0; p < ps.size(); ++p)
              info.row_by_pattern[p] = ps[p].column_target(c);
            info.uniform = std::all_of(info.row_by_pattern.begin(), info.row_by_pattern.end(),
                                       [&](int rr) { return rr == info.row_by_pattern.front(); });
          }
          break;
        }
        default:
          break;
      }
    }

    sorted_order.resize(rt.size());
    for (size_t i = 0; i < rt.size(); ++i) sorted_order[i] = static_cast<int>(i);
    std::sort(sorted_order.begin(), sorted_order.end(),
              [&](int x, int y) { return rt[x].actor->id < rt[y].actor->id; });
  }

  bool queue_has(int arc) const { return arc >= 0 && !queues[arc].empty(); }

  // Scoped rows of a dynamic-where pattern: rows fed by at least one
  // non-uniform column. The epoch completes when all of them are done.
  std::set<int> scoped_rows(const ActorRt& r, int pattern) const {
    std::set<int> rows;
    for (const auto& col : r.columns)
      if (!col.uniform && col.row_by_pattern[pattern] >= 0) rows.insert(col.row_by_pattern[pattern]);
    return rows;
  }

  bool dw_epoch_complete(const ActorRt& r, int pattern) const {
    for (int row : scoped_rows(r, pattern))
      if (!r.rows_done.count(row)) return false;
    return true;
  }

  bool actor_enabled(int idx) const {
    const ActorRt& r = rt[idx];
    const Actor& a = *r.actor;
    switch (a.kind()) {
      case ActorKind::Operator:
      case ActorKind::Decider:
      case ActorKind::When:
        return std::all_of(r.in_arcs.begin(), r.in_arcs.end(),
                           [&](int arc) { return queue_has(arc); });
      case ActorKind::TrueGate:
      case ActorKind::FalseGate:
        return queue_has(r.in_arcs[0]) && queue_has(r.in_arcs[1]);
      case ActorKind::Merge: {
        if (!queue_has(r.in_arcs[0])) return false;
        bool take_true = queues[r.in_arcs[0]].front().flag;
        return queue_has(r.in_arcs[take_true ? 1 : 2]);
      }
      case ActorKind::StaticWhere: {
        const auto& p = a.as<StaticWhereParams>().pattern;
        for (int c = 0; c < p.cols(); ++c)
          if (p.column_target(c) >= 0 && queue_has(r.in_arcs[c])) return true;
        return false;
      }
      case ActorKind::DynamicWhere: {
        for (size_t c = 0; c < r.columns.size(); ++c)
          if (r.columns[c].uniform && r.columns[c].row_by_pattern.front() >= 0 &&
              queue_has(r.in_arcs[1 + c]))
            return true;
        if (!queue_has(r.in_arcs[0])) return false;
        int pattern = queues[r.in_arcs[0]].front().pattern_id;
        if (dw_epoch_complete(r, pattern)) return true;  // can consume the switch token
        for (size_t c = 0; c < r.columns.size(); ++c) {
          const auto& col = r.columns[c];
          if (col.uniform) continue;
          int row = col.row_by_pattern[pattern];
          if (row >= 0 && !r.rows_done.count(row) && queue_has(r.in_arcs[1 + c])) return true;
        }
        return false;
      }
      case ActorKind::Source:
      case ActorKind::Const:
        return !r.fired;
      case ActorKind::Sink:
        return queue_has(r.in_arcs[0]);
    }
    return false;
  }

  Token pop(int arc) {
    Token t = queues[arc].front();
    queues[arc].pop_front();
    return t;
  }

  void push(int arc, const Token& t, std::vector<Token>* produced) {
    if (t.kind == ArcKind::Data && !std::isfinite(t.value) && !options.limits.allow_nonfinite)
      throw RunError("non-finite data value produced on arc " + std::to_string(arc) +
                     " (" + graph.arcs[arc].src + " -> " + graph.arcs[arc].dst + ")");
    queues[arc].push_back(t);
    if (produced) produced->push_back(t);
  }

  void fire_actor(int idx) {
    ActorRt& r = rt[idx];
    const Actor& a = *r.actor;
    std::vector<Token> consumed, produced;
    std::vector<Token>* cons = options.record_trace ? &consumed : nullptr;
    std::vector<Token>* prod = options.record_trace ? &produced : nullptr;
    auto take = [&](int arc) {
      Token t = pop(arc);
      if (cons) cons->push_back(t);
      return t;
    };

    switch (a.kind()) {
      case ActorKind::Operator: {
        const auto& p = a.as<OperatorParams>();
        if (a.is_copy()) {
          Token t = take(r.in_arcs[0]);
          for (int o = 0; o < p.outputs; ++o) push(r.out_arcs[o], t, prod);
        } else {
          std::vector<double> args(p.arity);
          for (int i = 0; i < p.arity; ++i) args[i] = take(r.in_arcs[i]).value;
          double v;
          try {
            v = r.fn->eval(args);
          } catch (const RunError& e) {
            throw RunError(std::string(e.what()) + " in actor '" + a.id + "'");
          }
          push(r.out_arcs[0], Token::data(v), prod);
        }
        break;
      }
      case ActorKind::Decider: {
        const auto& p = a.as<DeciderParams>();
        std::vector<double> args(p.arity);
        for (int i = 0; i < p.arity; ++i) args[i] = take(r.in_arcs[i]).value;
        double v;
        try {
          v = r.fn->eval(args);
        } catch (const RunError& e) {
          throw RunError(std::string(e.what()) + " in actor '" + a.id + "'");
        }
        push(r.out_arcs[0], Token::control(v != 0.0), prod);
        break;
      }
      case ActorKind::TrueGate:
      case ActorKind::FalseGate: {
        Token ctrl = take(r.in_arcs[0]);
        Token data = take(r.in_arcs[1]);
        bool pass = a.kind() == ActorKind::TrueGate ? ctrl.flag : !ctrl.flag;
        if (pass) push(r.out_arcs[0], data, prod);
        break;
      }
      case ActorKind::Merge: {
        Token ctrl = take(r.in_arcs[0]);
        Token data = take(r.in_arcs[ctrl.flag ? 1 : 2]);
        push(r.out_arcs[0], data, prod);
        break;
      }
      case ActorKind::StaticWhere: {
        const auto& p = a.as<StaticWhereParams>().pattern;
        for (int c = 0; c < p.cols(); ++c) {
          int row = p.column_target(c);
          if (row >= 0 && queue_has(r.in_arcs[c])) {
            push(r.out_arcs[row], take(r.in_arcs[c]), prod);
            break;
          }
        }
        break;
      }
      case ActorKind::DynamicWhere:
        fire_dynamic_where(r, cons, prod);
        break;
      case ActorKind::When:
        fire_when(r, cons, prod);
        break;
      case ActorKind::Source:
      case ActorKind::Const:
        r.fired = true;
        push(r.out_arcs[0], Token::data(r.emit_value), prod);
        break;
      case ActorKind::Sink: {
        Token t = take(r.in_arcs[0]);
        r.sink_value = t.value;
        break;
      }
    }

    if (options.record_trace)
      trace.entries.push_back({step_count, a.id, std::move(consumed), std::move(produced)});
  }

  void fire_dynamic_where(ActorRt& r, std::vector<Token>* cons, std::vector<Token>* prod) {
    auto take = [&](int arc) {
      Token t = pop(arc);
      if (cons) cons->push_back(t);
      return t;
    };
    // 1) Completed epoch: consume the switch token.
    if (queue_has(r.in_arcs[0])) {
      int pattern = queues[r.in_arcs[0]].front().pattern_id;
      if (dw_epoch_complete(r, pattern)) {
        take(r.in_arcs[0]);
        r.rows_done.clear();
        return;
      }
    }
    // 2) Pattern-independent columns forward eagerly.
    for (size_t c = 0; c < r.columns.size(); ++c) {
      const auto& col = r.columns[c];
      if (col.uniform && col.row_by_pattern.front() >= 0 && queue_has(r.in_arcs[1 + c])) {
        push(r.out_arcs[col.row_by_pattern.front()], take(r.in_arcs[1 + c]), prod);
        return;
      }
    }
    // 3) Scoped column: forward one token for a not-yet-served row.
    if (!queue_has(r.in_arcs[0])) return;
    int pattern = queues[r.in_arcs[0]].front().pattern_id;
    for (size_t c = 0; c < r.columns.size(); ++c) {
      const auto& col = r.columns[c];
      if (col.uniform) continue;
      int row = col.row_by_pattern[pattern];
      if (row >= 0 && !r.rows_done.count(row) && queue_has(r.in_arcs[1 + c])) {
        push(r.out_arcs[row], take(r.in_arcs[1 + c]), prod);
        r.rows_done.insert(row);
        if (dw_epoch_complete(r, pattern)) {
          take(r.in_arcs[0]);
          r.rows_done.clear();
        }
        return;
      }
    }
  }

  void fire_when(ActorRt& r, std::vector<Token>* cons, std::vector<Token>* prod) {
    const WhenConfig& w = r.actor->as<WhenParams>().config;
    std::vector<double> input(w.n_inputs);
    for (int i = 0; i < w.n_inputs; ++i) {
      Token t = pop(r.in_arcs[i]);
      if (cons) cons->push_back(t);
      input[i] = t.value;
    }
    // v <- f(v + I^T W), with the leak variant scaling the old potential.
    std::vector<double> drive(w.k, 0.0);
    for (int i = 0; i < w.n_inputs; ++i)
      for (int d = 0; d < w.k; ++d) drive[d] += input[i] * w.weight(i, d);
    for (int d = 0; d < w.k; ++d) {
      double base = w.f.type == Nonlinearity::Type::Leak ? w.f.leak * r.membrane[d] : r.membrane[d];
      double v = base + drive[d];
      if (w.f.type == Nonlinearity::Type::Clamp) v = std::clamp(v, w.f.lo, w.f.hi);
      if (!std::isfinite(v))
        throw RunError("non-finite membrane potential in when actor '" + r.actor->id + "'");
      r.membrane[d] = v;
    }
    int region = classify_region(w, r.membrane);
    if (region < 0) return;  // sub-threshold: state persists, no token
    const Region& reg = w.regions[region];
    push(r.out_arcs[0], Token::pattern(reg.pattern_id), prod);
    switch (w.reset) {
      case ResetRule::ToZero:
        std::fill(r.membrane.begin(), r.membrane.end(), 0.0);
        break;
      case ResetRule::SubtractAnchor:
        for (int d = 0; d < w.k; ++d) r.membrane[d] -= reg.anchor.empty() ? 0.0 : reg.anchor[d];
        break;
      case ResetRule::None:
        break;
    }
  }

  int pick_enabled() {
    std::vector<int> enabled;
    for (int idx : sorted_order)
      if (actor_enabled(idx)) enabled.push_back(idx);
    if (enabled.empty()) return -1;
    if (options.policy == SchedulePolicy::FifoDeterministic) return enabled.front();
    std::uniform_int_distribution<size_t> pick(0, enabled.size() - 1);
    return enabled[pick(rng)];
  }
};

Execution::Execution(const DataflowGraph& g, const std::map<std::string, double>& inputs,
                     const RunOptions& options)
    : impl_(std::make_unique<Impl>(g, inputs, options)) {}

Execution::~Execution() = default;
Execution::Execution(Execution&&) noexcept = default;
Execution& Execution::operator=(Execution&&) noexcept = default;

bool Execution::enabled(const std::string& actor_id) const {
  auto it = impl_->index_of.find(actor_id);
  if (it == impl_->index_of.end()) throw RunError("unknown actor '" + actor_id + "'");
  return impl_->actor_enabled(it->second);
}

std::vector<std::string> Execution::enabled_actors() const {
  std::vector<std::string> out;
  for (int idx : impl_->sorted_order)
    if (impl_->actor_enabled(idx)) out.push_back(impl_->rt[idx].actor->id);
  return out;
}

bool Execution::step() {
  int idx = impl_->pick_enabled();
  if (idx < 0) return false;
  ++impl_->step_count;
  impl_->fire_actor(idx);
  return true;
}

void Execution::fire(const std::string& actor_id) {
  auto it = impl_->index_of.find(actor_id);
  if (it == impl_->index_of.end()) throw RunError("unknown actor '" + actor_id + "'");
  if (!impl_->actor_enabled(it->second))
    throw RunError("actor '" + actor_id + "' is not enabled");
  ++impl_->step_count;
  impl_->fire_actor(it->second);
}

long long Execution::steps() const { return impl_->step_count; }

const std::deque<Token>& Execution::arc_queue(int arc_index) const {
  return impl_->queues.at(arc_index);
}

const std::vector<double>& Execution::membrane(const std::string& when_id) const {
  auto it = impl_->index_of.find(when_id);
  if (it == impl_->index_of.end()) throw RunError("unknown actor '" + when_id + "'");
  return impl_->rt[it->second].membrane;
}

std::vector<int> Execution::non_empty_arcs() const {
  std::vector<int> out;
  for (size_t i = 0; i < impl_->queues.size(); ++i)
    if (!impl_->queues[i].empty()) out.push_back(static_cast<int>(i));
  return out;
}

RunResult Execution::run_to_completion() {
  while (step()) {
    if (impl_->step_count >= impl_->options.limits.max_steps) {
      std::ostringstream os;
      os << "step limit exceeded (" << impl_->options.limits.max_steps
         << " firings); tokens remain on arcs:";
      for (int arc : non_empty_arcs()) {
        const Arc& a = impl_->graph.arcs[arc];
        os << " " << a.src << "->" << a.dst << "(x" << impl_->queues[arc].size() << ")";
      }
      throw RunError(os.str());
    }
  }
  RunResult result;
  result.steps = impl_->step_count;
  result.trace = std::move(impl_->trace);
  // Outputs follow sink declaration order in the graph, not id order.
  for (const auto& r : impl_->rt) {
    if (r.actor->kind() != ActorKind::Sink) continue;
    const auto& var = r.actor->as<SinkParams>().var;
    if (var.empty() || !r.sink_value.has_value()) continue;
    bool replaced = false;
    for (auto& [n, v] : result.outputs)
      if (n == var) {
        v = *r.sink_value;
        replaced = true;
      }
    if (!replaced) result.outputs.emplace_back(var, *r.sink_value);
  }
  return result;
}

RunResult run(const DataflowGraph& g, const std::map<std::string, double>& inputs,
              const RunOptions& options) {
  Execution exec(g, inputs, options);
  return exec.run_to_completion();
}

}  // namespace ndf::engine
