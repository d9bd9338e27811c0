// SPDX-License-Identifier: Apache-2.0
#include "ndf/ast.hpp"

#include <charconv>
#include <sstream>

namespace ndf::lang {

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
    case BinOp::Eq:
    case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_boolean(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

ExprPtr Expr::make_number(double v) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Number;
  e->number = v;
  return e;
}

ExprPtr Expr::make_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr Expr::make_unary(UnOp op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Unary;
  e->un_op = op;
  e->a = std::move(a);
  return e;
}

ExprPtr Expr::make_binary(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Binary;
  e->bin_op = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

ExprPtr Expr::make_call(Builtin b, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Call;
  e->builtin = b;
  e->a = std::move(a);
  return e;
}

namespace {

const char* op_name(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

const char* builtin_name(Builtin b) {
  switch (b) {
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Tanh: return "tanh";
  }
  return "?";
}

std::string number_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  if (!e) return "<null>";
  switch (e->kind) {
    case Expr::Kind::Number:
      return e->number < 0 ? "(" + number_text(e->number) + ")" : number_text(e->number);
    case Expr::Kind::Var:
      return e->var;
    case Expr::Kind::Unary:
      return e->un_op == UnOp::Neg ? "(-" + to_string(e->a) + ")" : "(not " + to_string(e->a) + ")";
    case Expr::Kind::Binary:
      return "(" + to_string(e->a) + " " + op_name(e->bin_op) + " " + to_string(e->b) + ")";
    case Expr::Kind::Call:
      return std::string(builtin_name(e->builtin)) + "(" + to_string(e->a) + ")";
  }
  return "?";
}

void collect_reads(const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  if (e->kind == Expr::Kind::Var) out.insert(e->var);
  collect_reads(e->a, out);
  collect_reads(e->b, out);
}

namespace {

// Upward-exposed reads and assignments, threaded through one pass.
void block_flow(const Block& b, std::set<std::string> killed, std::set<std::string>& reads,
                std::set<std::string>& assigns) {
  auto expr_reads = [&](const ExprPtr& e) {
    std::set<std::string> r;
    collect_reads(e, r);
    for (const auto& v : r)
      if (!killed.count(v)) reads.insert(v);
  };
  for (const auto& s : b.stmts) {
    switch (s->kind) {
      case Stmt::Kind::Input:
        for (const auto& n : s->names) {
          killed.insert(n);
          assigns.insert(n);
        }
        break;
      case Stmt::Kind::Output:
        for (const auto& n : s->names)
          if (!killed.count(n)) reads.insert(n);
        break;
      case Stmt::Kind::Assign:
        expr_reads(s->expr);
        killed.insert(s->target);
        assigns.insert(s->target);
        break;
      case Stmt::Kind::If: {
        expr_reads(s->cond);
        std::set<std::string> tr, ta, er, ea;
        block_flow(s->body, killed, tr, ta);
        block_flow(s->else_body, killed, er, ea);
        reads.insert(tr.begin(), tr.end());
        reads.insert(er.begin(), er.end());
        assigns.insert(ta.begin(), ta.end());
        assigns.insert(ea.begin(), ea.end());
        // Only assignments on both paths kill downstream reads.
        for (const auto& v : ta)
          if (ea.count(v)) killed.insert(v);
        break;
      }
      case Stmt::Kind::While: {
        expr_reads(s->cond);
        std::set<std::string> br, ba;
        block_flow(s->body, killed, br, ba);
        reads.insert(br.begin(), br.end());
        assigns.insert(ba.begin(), ba.end());
        // The body may run zero times: nothing new is killed.
        break;
      }
    }
  }
}

}  // namespace

std::set<std::string> block_reads(const Block& b) {
  std::set<std::string> reads, assigns;
  block_flow(b, {}, reads, assigns);
  return reads;
}

std::set<std::string> block_assigns(const Block& b) {
  std::set<std::string> reads, assigns;
  block_flow(b, {}, reads, assigns);
  return assigns;
}

std::vector<std::string> Program::input_names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  // Inputs are only meaningful at top level.
  for (const auto& s : block.stmts)
    if (s->kind == Stmt::Kind::Input)
      for (const auto& n : s->names)
        if (seen.insert(n).second) out.push_back(n);
  return out;
}

namespace {
void collect_outputs(const Block& b, std::vector<std::string>& out, std::set<std::string>& seen) {
  for (const auto& s : b.stmts) {
    if (s->kind == Stmt::Kind::Output) {
      for (const auto& n : s->names)
        if (seen.insert(n).second) out.push_back(n);
    } else if (s->kind == Stmt::Kind::If) {
      collect_outputs(s->body, out, seen);
      collect_outputs(s->else_body, out, seen);
    } else if (s->kind == Stmt::Kind::While) {
      collect_outputs(s->body, out, seen);
    }
  }
}
}  // namespace

std::vector<std::string> Program::output_names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  collect_outputs(block, out, seen);
  return out;
}

namespace {

void dump_block(const Block& b, int indent, std::ostringstream& os);

void dump_stmt(const Stmt& s, int indent, std::ostringstream& os) {
  std::string pad(static_cast<size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Input:
    case Stmt::Kind::Output:
      os << pad << (s.kind == Stmt::Kind::Input ? "input" : "output");
      for (const auto& n : s.names) os << " " << n;
      os << "\n";
      break;
    case Stmt::Kind::Assign:
      os << pad << "assign " << s.target << " := " << to_string(s.expr) << "\n";
      break;
    case Stmt::Kind::If:
      os << pad << "if " << to_string(s.cond) << "\n";
      dump_block(s.body, indent + 1, os);
      if (s.has_else) {
        os << pad << "else\n";
        dump_block(s.else_body, indent + 1, os);
      }
      break;
    case Stmt::Kind::While:
      os << pad << "while " << to_string(s.cond) << "\n";
      dump_block(s.body, indent + 1, os);
      break;
  }
}

void dump_block(const Block& b, int indent, std::ostringstream& os) {
  for (const auto& s : b.stmts) dump_stmt(*s, indent, os);
}

}  // namespace

std::string dump(const Program& p) {
  std::ostringstream os;
  dump_block(p.block, 0, os);
  return os.str();
}

}  // namespace ndf::lang
