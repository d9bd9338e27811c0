// SPDX-License-Identifier: Apache-2.0
#include "ndf/lower_conventional.hpp"

#include <algorithm>
#include <charconv>

#include "ndf/builder.hpp"

namespace ndf::lower {

namespace {

using lang::Block;
using lang::Expr;
using lang::ExprPtr;
using lang::Stmt;
using lang::StmtPtr;

std::string lit_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, res.ptr);
  return v < 0 ? "(" + s + ")" : s;
}

using Env = std::map<std::string, Value>;

std::set<std::string> suffix_live(const std::vector<StmtPtr>& stmts, size_t next,
                                  const std::set<std::string>& live_out) {
  Block rest;
  rest.stmts.assign(stmts.begin() + next, stmts.end());
  auto live = lang::block_reads(rest);
  live.insert(live_out.begin(), live_out.end());
  return live;
}

class ConvLowerer {
 public:
  explicit ConvLowerer(bool fuse) : fuse_(fuse) {}

  DataflowGraph lower(const lang::Program& p) {
    Env env;
    block(p.block, env, {}, std::nullopt, /*top_level=*/true);
    return b_.finish();
  }

 private:
  GraphBuilder b_;
  bool fuse_;
  std::optional<PortRef> top_tick_;

  // A port guaranteed to carry exactly one token per activation of the
  // current context; used to drive constant-producing operators.
  PortRef tick_port(const std::optional<PortRef>& tick) {
    if (tick) return *tick;
    if (!top_tick_) {
      std::string id = b_.add("tickconst", ConstParams{1.0});
      top_tick_ = PortRef{id, 0};
    }
    return *top_tick_;
  }

  PortRef materialize(const Value& v, const std::optional<PortRef>& tick) {
    switch (v.kind) {
      case Value::Kind::Port:
        return v.port;
      case Value::Kind::Lit: {
        if (!tick && !top_tick_) {
          std::string id = b_.add("const", ConstParams{v.lit});
          return {id, 0};
        }
        if (!tick) {
          std::string id = b_.add("const", ConstParams{v.lit});
          return {id, 0};
        }
        std::string op = b_.add("op", OperatorParams{lit_text(v.lit), 1, 1});
        b_.link(*tick, {op, 0});
        return {op, 0};
      }
      case Value::Kind::Alts:
        throw LoweringError("conventional lowering produced unmaterialized alternatives");
    }
    return {};
  }

  // Substitutes variables bound to compile-time constants into the
  // expression, so they fold instead of producing actors.
  ExprPtr fold_lits(const ExprPtr& e, const Env& env) {
    std::map<std::string, ExprPtr> subst_map;
    std::set<std::string> reads;
    lang::collect_reads(e, reads);
    for (const auto& v : reads) {
      auto it = env.find(v);
      if (it != env.end() && it->second.kind == Value::Kind::Lit)
        subst_map[v] = Expr::make_number(it->second.lit);
    }
    return subst_map.empty() ? e : substitute(e, subst_map);
  }

  Value lower_expr(const ExprPtr& raw, const Env& env, const std::optional<PortRef>& tick) {
    ExprPtr e = fold_lits(raw, env);
    if (auto k = try_const_eval(e)) return Value::of_lit(*k);
    if (e->kind == Expr::Kind::Var) return env.at(e->var);
    if (!fuse_) return lower_expr_pernode(e, env, tick);
    std::set<std::string> reads;
    lang::collect_reads(e, reads);
    std::vector<std::string> args(reads.begin(), reads.end());
    if (args.empty()) {
      // Variable-free but not evaluable (e.g. division by zero): keep the
      // expression; it fails at run time like the interpreter does.
      std::string op = b_.add("op", OperatorParams{lang::to_string(e), 1, 1});
      b_.link(tick_port(tick), {op, 0});
      return Value::of_port({op, 0});
    }
    std::string op =
        b_.add("op", OperatorParams{fn_string(e, args), static_cast<int>(args.size()), 1});
    for (size_t i = 0; i < args.size(); ++i)
      b_.link(materialize(env.at(args[i]), tick), {op, static_cast<int>(i)});
    return Value::of_port({op, 0});
  }

  // Per-node lowering: one operator per arithmetic node; literal children
  // are embedded into the parent's fn string.
  Value lower_expr_pernode(const ExprPtr& e, const Env& env, const std::optional<PortRef>& tick) {
    switch (e->kind) {
      case Expr::Kind::Number:
        return Value::of_lit(e->number);
      case Expr::Kind::Var:
        return env.at(e->var);
      case Expr::Kind::Unary: {
        Value a = lower_expr_pernode(e->a, env, tick);
        const char* fmt = e->un_op == lang::UnOp::Neg ? "(-%)" : "(not %)";
        return apply_node(fmt, {a}, tick);
      }
      case Expr::Kind::Call: {
        Value a = lower_expr_pernode(e->a, env, tick);
        std::string name = e->builtin == lang::Builtin::Sin ? "sin"
                           : e->builtin == lang::Builtin::Cos ? "cos"
                                                              : "tanh";
        return apply_node(name + "(%)", {a}, tick);
      }
      case Expr::Kind::Binary: {
        Value a = lower_expr_pernode(e->a, env, tick);
        Value bv = lower_expr_pernode(e->b, env, tick);
        std::string opname;
        switch (e->bin_op) {
          case lang::BinOp::Add: opname = "+"; break;
          case lang::BinOp::Sub: opname = "-"; break;
          case lang::BinOp::Mul: opname = "*"; break;
          case lang::BinOp::Div: opname = "/"; break;
          case lang::BinOp::Lt: opname = "<"; break;
          case lang::BinOp::Le: opname = "<="; break;
          case lang::BinOp::Gt: opname = ">"; break;
          case lang::BinOp::Ge: opname = ">="; break;
          case lang::BinOp::Eq: opname = "="; break;
          case lang::BinOp::Ne: opname = "<>"; break;
          case lang::BinOp::And: opname = "and"; break;
          case lang::BinOp::Or: opname = "or"; break;
        }
        return apply_node("(% " + opname + " %)", {a, bv}, tick);
      }
    }
    return Value::of_lit(0.0);
  }

  // Builds one operator for a node template, embedding literal operands.
  Value apply_node(const std::string& tmpl, const std::vector<Value>& operands,
                   const std::optional<PortRef>& tick) {
    std::string fn;
    std::vector<PortRef> ports;
    size_t oi = 0;
    for (size_t i = 0; i < tmpl.size(); ++i) {
      if (tmpl[i] != '%') {
        fn.push_back(tmpl[i]);
        continue;
      }
      const Value& v = operands[oi++];
      if (v.kind == Value::Kind::Lit) {
        fn += lit_text(v.lit);
      } else {
        fn += "a" + std::to_string(ports.size());
        ports.push_back(materialize(v, tick));
      }
    }
    // All-literal nodes fold unless evaluation fails; then keep an
    // operator driven by the activation tick.
    if (ports.empty()) {
      if (auto k = try_const_eval(lang::parse_expression(fn, true))) return Value::of_lit(*k);
      std::string op = b_.add("op", OperatorParams{fn, 1, 1});
      b_.link(tick_port(tick), {op, 0});
      return Value::of_port({op, 0});
    }
    std::string op = b_.add("op", OperatorParams{fn, static_cast<int>(ports.size()), 1});
    for (size_t i = 0; i < ports.size(); ++i) b_.link(ports[i], {op, static_cast<int>(i)});
    return Value::of_port({op, 0});
  }

  // Lowers a condition to a decider; returns its control output port.
  PortRef lower_condition(const ExprPtr& cond, const Env& env, const std::optional<PortRef>& tick) {
    if (fuse_) {
      std::set<std::string> reads;
      lang::collect_reads(cond, reads);
      std::vector<std::string> args(reads.begin(), reads.end());
      if (args.empty()) {
        std::string dec = b_.add("dec", DeciderParams{lang::to_string(cond), 1});
        b_.link(tick_port(tick), {dec, 0});
        return {dec, 0};
      }
      std::string dec =
          b_.add("dec", DeciderParams{fn_string(cond, args), static_cast<int>(args.size())});
      for (size_t i = 0; i < args.size(); ++i)
        b_.link(materialize(env.at(args[i]), tick), {dec, static_cast<int>(i)});
      return {dec, 0};
    }
    // Per-node mode: the condition root becomes the decider.
    if (cond->kind == Expr::Kind::Binary && lang::is_comparison(cond->bin_op)) {
      Value a = lower_expr_pernode(cond->a, env, tick);
      Value bv = lower_expr_pernode(cond->b, env, tick);
      std::string opname = to_string_comparison(cond->bin_op);
      return decider_node("(% " + opname + " %)", {a, bv}, tick);
    }
    if (cond->kind == Expr::Kind::Binary && lang::is_boolean(cond->bin_op)) {
      Value a = lower_expr_pernode(cond->a, env, tick);
      Value bv = lower_expr_pernode(cond->b, env, tick);
      std::string opname = cond->bin_op == lang::BinOp::And ? "and" : "or";
      return decider_node("(% " + opname + " %)", {a, bv}, tick);
    }
    if (cond->kind == Expr::Kind::Unary && cond->un_op == lang::UnOp::Not) {
      Value a = lower_expr_pernode(cond->a, env, tick);
      return decider_node("(% = 0)", {a}, tick);
    }
    Value a = lower_expr_pernode(cond, env, tick);
    return decider_node("(% <> 0)", {a}, tick);
  }

  static std::string to_string_comparison(lang::BinOp op) {
    switch (op) {
      case lang::BinOp::Lt: return "<";
      case lang::BinOp::Le: return "<=";
      case lang::BinOp::Gt: return ">";
      case lang::BinOp::Ge: return ">=";
      case lang::BinOp::Eq: return "=";
      default: return "<>";
    }
  }

  PortRef decider_node(const std::string& tmpl, const std::vector<Value>& operands,
                       const std::optional<PortRef>& tick) {
    std::string fn;
    std::vector<PortRef> ports;
    size_t oi = 0;
    for (size_t i = 0; i < tmpl.size(); ++i) {
      if (tmpl[i] != '%') {
        fn.push_back(tmpl[i]);
        continue;
      }
      const Value& v = operands[oi++];
      if (v.kind == Value::Kind::Lit) {
        fn += lit_text(v.lit);
      } else {
        fn += "a" + std::to_string(ports.size());
        ports.push_back(materialize(v, tick));
      }
    }
    if (ports.empty()) {
      std::string dec = b_.add("dec", DeciderParams{fn, 1});
      b_.link(tick_port(tick), {dec, 0});
      return {dec, 0};
    }
    std::string dec = b_.add("dec", DeciderParams{fn, static_cast<int>(ports.size())});
    for (size_t i = 0; i < ports.size(); ++i) b_.link(ports[i], {dec, static_cast<int>(i)});
    return {dec, 0};
  }

  void block(const Block& blk, Env& env, const std::set<std::string>& live_out,
             const std::optional<PortRef>& tick, bool top_level = false) {
    for (size_t i = 0; i < blk.stmts.size(); ++i) {
      auto live = suffix_live(blk.stmts, i + 1, live_out);
      statement(*blk.stmts[i], env, live, tick, top_level);
    }
  }

  void statement(const Stmt& s, Env& env, const std::set<std::string>& live_after,
                 const std::optional<PortRef>& tick, bool top_level) {
    switch (s.kind) {
      case Stmt::Kind::Input: {
        if (!top_level)
          throw LoweringError("input declarations must appear at top level");
        for (const auto& name : s.names) {
          std::string src = b_.add("src", SourceParams{name});
          env[name] = Value::of_port({src, 0});
        }
        break;
      }
      case Stmt::Kind::Output: {
        for (const auto& name : s.names) {
          auto it = env.find(name);
          if (it == env.end())
            throw LoweringError("output variable '" + name + "' is unbound");
          std::string sink = b_.add("sink", SinkParams{name});
          b_.link(materialize(it->second, tick), {sink, 0});
        }
        break;
      }
      case Stmt::Kind::Assign:
        env[s.target] = lower_expr(s.expr, env, tick);
        break;
      case Stmt::Kind::If:
        lower_if(s, env, live_after, tick);
        break;
      case Stmt::Kind::While:
        lower_while(s, env, live_after, tick);
        break;
    }
  }

  void lower_if(const Stmt& s, Env& env, const std::set<std::string>& live_after,
                const std::optional<PortRef>& tick) {
    ExprPtr cond = fold_lits(s.cond, env);
    if (auto k = try_const_eval(cond)) {
      // Static condition: lower only the taken branch.
      const Block& taken = *k != 0.0 ? s.body : s.else_body;
      block(taken, env, live_after, tick);
      return;
    }

    auto assigns_then = lang::block_assigns(s.body);
    auto assigns_else = lang::block_assigns(s.else_body);
    std::set<std::string> assigned = assigns_then;
    assigned.insert(assigns_else.begin(), assigns_else.end());

    // Variables with a post-if binding: previously bound, or fresh but
    // assigned on both paths.
    std::set<std::string> merged;
    for (const auto& v : assigned)
      if (env.count(v) || (assigns_then.count(v) && assigns_else.count(v))) merged.insert(v);

    auto gate_set = [&](const Block& branch) {
      std::set<std::string> g = lang::block_reads(branch);
      for (const auto& v : merged)
        if (env.count(v)) g.insert(v);
      // Constants stay folded; only port-backed values are gated.
      std::set<std::string> out;
      for (const auto& v : g) {
        auto it = env.find(v);
        if (it != env.end() && it->second.kind != Value::Kind::Lit) out.insert(v);
      }
      return out;
    };
    std::set<std::string> gate_then = gate_set(s.body);
    std::set<std::string> gate_else = gate_set(s.else_body);

    // Each branch needs at least one gated token per evaluation to drive
    // constant producers; borrow the first port-backed condition operand.
    std::set<std::string> cond_reads;
    lang::collect_reads(cond, cond_reads);
    auto ensure_nonempty = [&](std::set<std::string>& g) {
      if (!g.empty()) return;
      for (const auto& v : cond_reads)
        if (env.count(v) && env.at(v).kind != Value::Kind::Lit) {
          g.insert(v);
          return;
        }
      throw LoweringError("branch has no token source for constant materialization");
    };
    bool then_effectful = !s.body.stmts.empty() || !merged.empty();
    bool else_effectful = !s.else_body.stmts.empty() || !merged.empty();
    if (!then_effectful && !else_effectful) return;  // no observable effect
    ensure_nonempty(gate_then);
    ensure_nonempty(gate_else);

    PortRef dec = lower_condition(cond, env, tick);

    std::map<std::string, PortRef> tg, fg;
    for (const auto& v : gate_then) {
      std::string g = b_.add("tgate", TrueGateParams{});
      b_.link(dec, {g, 0}, ArcKind::Control);
      b_.link(materialize(env.at(v), tick), {g, 1});
      tg[v] = PortRef{g, 0};
    }
    for (const auto& v : gate_else) {
      std::string g = b_.add("fgate", FalseGateParams{});
      b_.link(dec, {g, 0}, ArcKind::Control);
      b_.link(materialize(env.at(v), tick), {g, 1});
      fg[v] = PortRef{g, 0};
    }

    std::set<std::string> live_branch = live_after;
    live_branch.insert(merged.begin(), merged.end());

    Env env_then = env;
    for (const auto& [v, p] : tg) env_then[v] = Value::of_port(p);
    std::optional<PortRef> tick_then = tg.begin()->second;
    block(s.body, env_then, live_branch, tick_then);

    Env env_else = env;
    for (const auto& [v, p] : fg) env_else[v] = Value::of_port(p);
    std::optional<PortRef> tick_else = fg.begin()->second;
    block(s.else_body, env_else, live_branch, tick_else);

    for (const auto& v : merged) {
      std::string m = b_.add("merge", MergeParams{});
      b_.link(dec, {m, 0}, ArcKind::Control);
      b_.link(materialize(env_then.at(v), tick_then), {m, 1});
      b_.link(materialize(env_else.at(v), tick_else), {m, 2});
      env[v] = Value::of_port({m, 0});
    }
    for (const auto& v : assigned)
      if (!merged.count(v)) env.erase(v);
  }

  void lower_while(const Stmt& s, Env& env, const std::set<std::string>& live_after,
                   const std::optional<PortRef>& tick) {
    auto assigns_body = lang::block_assigns(s.body);
    // Constants fold only when loop-invariant.
    std::map<std::string, ExprPtr> foldable;
    for (const auto& [v, val] : env)
      if (val.kind == Value::Kind::Lit && !assigns_body.count(v))
        foldable[v] = Expr::make_number(val.lit);
    ExprPtr cond = substitute(s.cond, foldable);

    if (auto k = try_const_eval(cond); k && *k == 0.0) return;  // never entered

    std::set<std::string> circulating;
    {
      std::set<std::string> cond_reads;
      lang::collect_reads(cond, cond_reads);
      auto body_reads = lang::block_reads(s.body);
      for (const auto& v : cond_reads)
        if (env.count(v)) circulating.insert(v);
      for (const auto& v : body_reads)
        if (env.count(v) && !foldable.count(v)) circulating.insert(v);
      for (const auto& v : assigns_body)
        if (env.count(v)) circulating.insert(v);
    }
    if (circulating.empty()) {
      // Degenerate loop with no circulating state: thread a synthetic one.
      env["__tick"] = Value::of_lit(0.0);
      circulating.insert("__tick");
    }

    std::vector<std::string> vars(circulating.begin(), circulating.end());

    std::map<std::string, std::string> merge_of;
    for (const auto& v : vars) {
      std::string m = b_.add("merge", MergeParams{});
      merge_of[v] = m;
      b_.initial({m, 0}, Token::control(false));
      b_.link(materialize(env.at(v), tick), {m, 2});  // entry on the false side
    }

    // Condition decider reads the merged (loop-head) values.
    Env head_env = env;
    for (const auto& v : vars) head_env[v] = Value::of_port({merge_of[v], 0});
    std::set<std::string> cond_reads;
    lang::collect_reads(cond, cond_reads);
    PortRef dec;
    if (cond_reads.empty()) {
      std::string d = b_.add("dec", DeciderParams{lang::to_string(cond), 1});
      b_.link({merge_of[vars.front()], 0}, {d, 0});
      dec = {d, 0};
    } else {
      dec = lower_condition(cond, head_env, tick);
    }

    std::map<std::string, PortRef> tg;
    for (const auto& v : vars) {
      std::string g = b_.add("tgate", TrueGateParams{});
      b_.link(dec, {g, 0}, ArcKind::Control);
      b_.link({merge_of[v], 0}, {g, 1});
      tg[v] = PortRef{g, 0};
      b_.link(dec, {merge_of[v], 0}, ArcKind::Control);  // next-iteration control
    }
    std::map<std::string, PortRef> fg;
    for (const auto& v : vars) {
      if (!live_after.count(v)) continue;
      std::string g = b_.add("fgate", FalseGateParams{});
      b_.link(dec, {g, 0}, ArcKind::Control);
      b_.link({merge_of[v], 0}, {g, 1});
      fg[v] = PortRef{g, 0};
    }

    Env env_body = env;
    for (const auto& v : vars) env_body[v] = Value::of_port(tg[v]);
    std::optional<PortRef> tick_body = tg[vars.front()];
    std::set<std::string> live_body(vars.begin(), vars.end());
    block(s.body, env_body, live_body, tick_body);

    for (const auto& v : vars)
      b_.link(materialize(env_body.at(v), tick_body), {merge_of[v], 1});  // loop back, true side

    for (const auto& v : vars) {
      if (fg.count(v))
        env[v] = Value::of_port(fg[v]);
      else
        env.erase(v);
    }
    env.erase("__tick");
  }
};

}  // namespace

DataflowGraph lower_conventional(const lang::Program& program, const ConventionalOptions& options) {
  ConvLowerer lowerer(options.fuse_expressions);
  return lowerer.lower(program);
}

}  // namespace ndf::lower
