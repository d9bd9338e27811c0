// SPDX-License-Identifier: Apache-2.0
#include "ndf/builder.hpp"

#include <stdexcept>

#include "ndf/interp.hpp"

namespace ndf::lower {

Value Value::of_alts(std::vector<PortRef> a) {
  if (a.size() == 1) return of_port(a.front());
  Value v;
  v.kind = Kind::Alts;
  v.alts = std::move(a);
  return v;
}

std::string GraphBuilder::add(const std::string& prefix, ActorParams params) {
  std::string id = prefix + std::to_string(counters_[prefix]++);
  while (g_.find(id)) id = prefix + std::to_string(counters_[prefix]++);
  g_.actors.push_back(Actor{id, std::move(params)});
  return id;
}

void GraphBuilder::link(const PortRef& src, const PortRef& dst, ArcKind kind) {
  links_.push_back({src, dst, kind});
}

void GraphBuilder::initial(const PortRef& dst, Token token) {
  initial_.emplace_back(dst, std::move(token));
}

const Actor& GraphBuilder::actor(const std::string& id) const {
  const Actor* a = g_.find(id);
  if (!a) throw std::logic_error("builder: unknown actor '" + id + "'");
  return *a;
}

DataflowGraph GraphBuilder::finish() {
  // Consumers per producer port, in link insertion order.
  std::map<std::pair<std::string, int>, std::vector<size_t>> consumers;
  for (size_t i = 0; i < links_.size(); ++i)
    consumers[{links_[i].src.actor, links_[i].src.port}].push_back(i);

  std::vector<Link> resolved;
  size_t actor_count = g_.actors.size();  // original actors only
  for (size_t ai = 0; ai < actor_count; ++ai) {
    const std::string id = g_.actors[ai].id;
    auto out_kinds = g_.actors[ai].output_ports();
    for (size_t p = 0; p < out_kinds.size(); ++p) {
      auto it = consumers.find({id, static_cast<int>(p)});
      size_t n = it == consumers.end() ? 0 : it->second.size();
      PortRef src{id, static_cast<int>(p)};
      if (n == 0) {
        if (out_kinds[p] != ArcKind::Data)
          throw std::logic_error("builder: unconsumed " + to_string(out_kinds[p]) +
                                 " output on '" + id + "'");
        std::string drop = add("drop", SinkParams{""});
        resolved.push_back({src, {drop, 0}, ArcKind::Data});
      } else if (n == 1) {
        resolved.push_back(links_[it->second.front()]);
      } else {
        OperatorParams cp;
        cp.fn = "copy";
        cp.arity = 1;
        cp.outputs = static_cast<int>(n);
        cp.copy_kind = out_kinds[p];
        std::string copy = add("copy", std::move(cp));
        resolved.push_back({src, {copy, 0}, out_kinds[p]});
        int o = 0;
        for (size_t li : it->second)
          resolved.push_back({{copy, o++}, links_[li].dst, links_[li].kind});
      }
    }
  }

  for (const auto& l : resolved)
    g_.arcs.push_back(Arc{l.src.actor, l.src.port, l.dst.actor, l.dst.port, l.kind});

  for (const auto& [dst, token] : initial_) {
    int found = -1;
    for (size_t i = 0; i < g_.arcs.size(); ++i)
      if (g_.arcs[i].dst == dst.actor && g_.arcs[i].dst_port == dst.port) {
        found = static_cast<int>(i);
        break;
      }
    if (found < 0)
      throw std::logic_error("builder: initial token on unconnected port of '" + dst.actor + "'");
    g_.initial_tokens.push_back({found, token});
  }

  links_.clear();
  initial_.clear();
  return std::move(g_);
}

lang::ExprPtr substitute(const lang::ExprPtr& e, const std::map<std::string, lang::ExprPtr>& map) {
  using lang::Expr;
  if (!e) return e;
  switch (e->kind) {
    case Expr::Kind::Number:
      return e;
    case Expr::Kind::Var: {
      auto it = map.find(e->var);
      return it == map.end() ? e : it->second;
    }
    case Expr::Kind::Unary: {
      auto a = substitute(e->a, map);
      return a == e->a ? e : Expr::make_unary(e->un_op, a);
    }
    case Expr::Kind::Binary: {
      auto a = substitute(e->a, map);
      auto b = substitute(e->b, map);
      return (a == e->a && b == e->b) ? e : Expr::make_binary(e->bin_op, a, b);
    }
    case Expr::Kind::Call: {
      auto a = substitute(e->a, map);
      return a == e->a ? e : Expr::make_call(e->builtin, a);
    }
  }
  return e;
}

std::optional<double> try_const_eval(const lang::ExprPtr& e) {
  std::set<std::string> reads;
  lang::collect_reads(e, reads);
  if (!reads.empty()) return std::nullopt;
  try {
    return lang::eval_expr(e, {});
  } catch (const lang::EvalError&) {
    return std::nullopt;
  }
}

std::optional<AffineForm> linearize(const lang::ExprPtr& e) {
  using lang::BinOp;
  using lang::Expr;
  switch (e->kind) {
    case Expr::Kind::Number:
      return AffineForm{{}, e->number};
    case Expr::Kind::Var:
      return AffineForm{{{e->var, 1.0}}, 0.0};
    case Expr::Kind::Unary: {
      if (e->un_op != lang::UnOp::Neg) return std::nullopt;
      auto a = linearize(e->a);
      if (!a) return std::nullopt;
      for (auto& [_, c] : a->coef) c = -c;
      a->constant = -a->constant;
      return a;
    }
    case Expr::Kind::Call:
      return std::nullopt;
    case Expr::Kind::Binary: {
      if (e->bin_op == BinOp::Add || e->bin_op == BinOp::Sub) {
        auto a = linearize(e->a);
        auto b = linearize(e->b);
        if (!a || !b) return std::nullopt;
        double s = e->bin_op == BinOp::Add ? 1.0 : -1.0;
        for (const auto& [v, c] : b->coef) a->coef[v] += s * c;
        a->constant += s * b->constant;
        return a;
      }
      if (e->bin_op == BinOp::Mul) {
        auto a = linearize(e->a);
        auto b = linearize(e->b);
        if (!a || !b) return std::nullopt;
        if (!a->coef.empty() && !b->coef.empty()) return std::nullopt;
        const AffineForm& lin = a->coef.empty() ? *b : *a;
        double k = a->coef.empty() ? a->constant : b->constant;
        AffineForm out;
        out.constant = lin.constant * k;
        for (const auto& [v, c] : lin.coef) out.coef[v] = c * k;
        return out;
      }
      if (e->bin_op == BinOp::Div) {
        auto a = linearize(e->a);
        auto b = linearize(e->b);
        if (!a || !b || !b->coef.empty() || b->constant == 0.0) return std::nullopt;
        for (auto& [_, c] : a->coef) c /= b->constant;
        a->constant /= b->constant;
        return a;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::string fn_string(const lang::ExprPtr& e, const std::vector<std::string>& args) {
  std::map<std::string, lang::ExprPtr> rename;
  for (size_t i = 0; i < args.size(); ++i)
    rename[args[i]] = lang::Expr::make_var("a" + std::to_string(i));
  return lang::to_string(substitute(e, rename));
}

}  // namespace ndf::lower
