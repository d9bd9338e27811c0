// SPDX-License-Identifier: Apache-2.0
#include "ndf/interp.hpp"

#include <cmath>

namespace ndf::lang {

double InterpResult::at(const std::string& name) const {
  for (const auto& [n, v] : outputs)
    if (n == name) return v;
  throw EvalError("no output named '" + name + "'");
}

namespace {

double check_finite(double v) {
  if (!std::isfinite(v)) throw EvalError("non-finite intermediate value");
  return v;
}

}  // namespace

double eval_expr(const ExprPtr& e, const std::map<std::string, double>& env) {
  switch (e->kind) {
    case Expr::Kind::Number:
      return e->number;
    case Expr::Kind::Var: {
      auto it = env.find(e->var);
      if (it == env.end()) throw EvalError("unbound variable '" + e->var + "'");
      return it->second;
    }
    case Expr::Kind::Unary: {
      double a = eval_expr(e->a, env);
      return e->un_op == UnOp::Neg ? check_finite(-a) : (a != 0.0 ? 0.0 : 1.0);
    }
    case Expr::Kind::Call: {
      double a = eval_expr(e->a, env);
      switch (e->builtin) {
        case Builtin::Sin: return std::sin(a);
        case Builtin::Cos: return std::cos(a);
        case Builtin::Tanh: return std::tanh(a);
      }
      return 0.0;
    }
    case Expr::Kind::Binary: {
      double a = eval_expr(e->a, env);
      double b = eval_expr(e->b, env);
      switch (e->bin_op) {
        case BinOp::Add: return check_finite(a + b);
        case BinOp::Sub: return check_finite(a - b);
        case BinOp::Mul: return check_finite(a * b);
        case BinOp::Div:
          if (b == 0.0) throw EvalError("division by zero");
          return check_finite(a / b);
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

namespace {

struct Interp {
  const std::map<std::string, double>& inputs;
  const InterpLimits& limits;
  std::map<std::string, double> env;
  std::vector<std::pair<std::string, double>> outputs;
  long long iterations = 0;

  void record_output(const std::string& name) {
    auto it = env.find(name);
    if (it == env.end()) throw EvalError("output variable '" + name + "' is unbound");
    for (auto& [n, v] : outputs)
      if (n == name) {
        v = it->second;
        return;
      }
    outputs.emplace_back(name, it->second);
  }

  void run_block(const Block& b) {
    for (const auto& s : b.stmts) run_stmt(*s);
  }

  void run_stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Input:
        for (const auto& n : s.names) {
          auto it = inputs.find(n);
          if (it == inputs.end()) throw EvalError("input variable '" + n + "' not bound");
          if (!std::isfinite(it->second)) throw EvalError("input '" + n + "' is not finite");
          env[n] = it->second;
        }
        break;
      case Stmt::Kind::Output:
        for (const auto& n : s.names) record_output(n);
        break;
      case Stmt::Kind::Assign:
        env[s.target] = eval_expr(s.expr, env);
        break;
      case Stmt::Kind::If:
        if (eval_expr(s.cond, env) != 0.0)
          run_block(s.body);
        else
          run_block(s.else_body);
        break;
      case Stmt::Kind::While:
        while (eval_expr(s.cond, env) != 0.0) {
          if (++iterations > limits.max_loop_iterations)
            throw EvalError("loop iteration budget exceeded (" +
                            std::to_string(limits.max_loop_iterations) + ")");
          run_block(s.body);
        }
        break;
    }
  }
};

}  // namespace

InterpResult interpret(const Program& p, const std::map<std::string, double>& inputs,
                       const InterpLimits& limits) {
  Interp interp{inputs, limits, {}, {}, 0};
  interp.run_block(p.block);
  return InterpResult{std::move(interp.outputs)};
}

}  // namespace ndf::lang
