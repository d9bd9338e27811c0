// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace ndf::lang {

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };
enum class UnOp : uint8_t { Neg, Not };
enum class Builtin : uint8_t { Sin, Cos, Tanh };  // tanh: engine expressions only

bool is_comparison(BinOp op);
bool is_boolean(BinOp op);  // And/Or

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind : uint8_t { Number, Var, Unary, Binary, Call } kind = Kind::Number;
  double number = 0.0;
  std::string var;
  UnOp un_op = UnOp::Neg;
  BinOp bin_op = BinOp::Add;
  Builtin builtin = Builtin::Sin;
  ExprPtr a, b;
  int line = 0, col = 0;

  static ExprPtr make_number(double v);
  static ExprPtr make_var(std::string name);
  static ExprPtr make_unary(UnOp op, ExprPtr a);
  static ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b);
  static ExprPtr make_call(Builtin b, ExprPtr a);
};

/// Fully parenthesized canonical form; parse_expression round-trips it.
std::string to_string(const ExprPtr& e);

/// Variables read by the expression.
void collect_reads(const ExprPtr& e, std::set<std::string>& out);

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

struct Block {
  std::vector<StmtPtr> stmts;
};

struct Stmt {
  enum class Kind : uint8_t { Input, Output, Assign, If, While } kind = Kind::Assign;
  std::vector<std::string> names;  // Input / Output
  std::string target;              // Assign
  ExprPtr expr;                    // Assign rhs
  ExprPtr cond;                    // If / While
  Block body;                      // If then-branch / While body
  Block else_body;
  bool has_else = false;
  int line = 0, col = 0;
};

struct Program {
  Block block;

  /// Names of declared inputs in order of first declaration.
  std::vector<std::string> input_names() const;
  /// Names listed in output statements, in order of first mention.
  std::vector<std::string> output_names() const;
};

/// Upward-exposed variable reads of a block: variables whose value at block
/// entry may be read on some path.
std::set<std::string> block_reads(const Block& b);
/// Variables assigned anywhere in the block (including nested statements).
std::set<std::string> block_assigns(const Block& b);

std::string dump(const Program& p);

}  // namespace ndf::lang
