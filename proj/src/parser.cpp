// SPDX-License-Identifier: Apache-2.0
#include "ndf/parser.hpp"

#include <cctype>
#include <cstdlib>
#include <map>
#include <set>
#include <vector>

namespace ndf::lang {

namespace {

enum class Tok : uint8_t {
  End, Ident, Number,
  Assign,    // :=
  Semi, Comma, LParen, RParen,
  Plus, Minus, Star, Slash,
  Lt, Le, Gt, Ge, Eq, Ne,
  KwInput, KwOutput, KwIf, KwThen, KwElse, KwWhile, KwDo, KwBegin, KwEnd,
  KwAnd, KwOr, KwNot,
};

struct Lexeme {
  Tok tok = Tok::End;
  std::string text;
  double number = 0.0;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) {}

  Lexeme next() {
    skip_space();
    Lexeme lx;
    lx.line = line_;
    lx.col = col_;
    if (pos_ >= src_.size()) return lx;
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        word.push_back(take());
      static const std::map<std::string, Tok> kw = {
          {"input", Tok::KwInput}, {"output", Tok::KwOutput}, {"if", Tok::KwIf},
          {"then", Tok::KwThen},   {"else", Tok::KwElse},     {"while", Tok::KwWhile},
          {"do", Tok::KwDo},       {"begin", Tok::KwBegin},   {"end", Tok::KwEnd},
          {"and", Tok::KwAnd},     {"or", Tok::KwOr},         {"not", Tok::KwNot}};
      auto it = kw.find(word);
      lx.tok = it == kw.end() ? Tok::Ident : it->second;
      lx.text = std::move(word);
      return lx;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
      if (pos_ < src_.size() && src_[pos_] == '.') {
        take();
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        size_t mark = pos_;
        take();
        if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) take();
        if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) take();
        } else {
          pos_ = mark;  // 'e' was not an exponent
        }
      }
      lx.tok = Tok::Number;
      lx.text = src_.substr(start, pos_ - start);
      lx.number = std::strtod(lx.text.c_str(), nullptr);
      return lx;
    }
    take();
    switch (c) {
      case ';': lx.tok = Tok::Semi; return lx;
      case ',': lx.tok = Tok::Comma; return lx;
      case '(': lx.tok = Tok::LParen; return lx;
      case ')': lx.tok = Tok::RParen; return lx;
      case '+': lx.tok = Tok::Plus; return lx;
      case '-': lx.tok = Tok::Minus; return lx;
      case '*': lx.tok = Tok::Star; return lx;
      case '/': lx.tok = Tok::Slash; return lx;
      case '=': lx.tok = Tok::Eq; return lx;
      case ':':
        if (pos_ < src_.size() && src_[pos_] == '=') {
          take();
          lx.tok = Tok::Assign;
          return lx;
        }
        throw ParseError("expected '=' after ':'", lx.line, lx.col);
      case '<':
        if (pos_ < src_.size() && src_[pos_] == '=') { take(); lx.tok = Tok::Le; return lx; }
        if (pos_ < src_.size() && src_[pos_] == '>') { take(); lx.tok = Tok::Ne; return lx; }
        lx.tok = Tok::Lt;
        return lx;
      case '>':
        if (pos_ < src_.size() && src_[pos_] == '=') { take(); lx.tok = Tok::Ge; return lx; }
        lx.tok = Tok::Gt;
        return lx;
      case '!':
        if (pos_ < src_.size() && src_[pos_] == '=') { take(); lx.tok = Tok::Ne; return lx; }
        throw ParseError("expected '=' after '!'", lx.line, lx.col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", lx.line, lx.col);
    }
  }

 private:
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1, col_ = 1;
};

class Parser {
 public:
  Parser(const std::string& src, bool engine_builtins)
      : lexer_(src), engine_builtins_(engine_builtins) {
    advance();
  }

  Program parse_program() {
    Program p;
    while (cur_.tok != Tok::End) p.block.stmts.push_back(statement());
    return p;
  }

  ExprPtr parse_single_expression() {
    ExprPtr e = expression();
    if (cur_.tok != Tok::End) throw ParseError("trailing input after expression", cur_.line, cur_.col);
    return e;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  void expect(Tok t, const char* what) {
    if (cur_.tok != t) throw ParseError(std::string("expected ") + what, cur_.line, cur_.col);
    advance();
  }

  std::string ident() {
    if (cur_.tok != Tok::Ident) throw ParseError("expected identifier", cur_.line, cur_.col);
    std::string name = cur_.text;
    advance();
    return name;
  }

  StmtPtr statement() {
    auto s = std::make_shared<Stmt>();
    s->line = cur_.line;
    s->col = cur_.col;
    switch (cur_.tok) {
      case Tok::KwInput:
      case Tok::KwOutput: {
        s->kind = cur_.tok == Tok::KwInput ? Stmt::Kind::Input : Stmt::Kind::Output;
        advance();
        s->names.push_back(ident());
        while (cur_.tok == Tok::Comma) {
          advance();
          s->names.push_back(ident());
        }
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwIf: {
        s->kind = Stmt::Kind::If;
        advance();
        s->cond = expression();
        expect(Tok::KwThen, "'then'");
        s->body = body();
        if (cur_.tok == Tok::KwElse) {
          advance();
          s->has_else = true;
          s->else_body = body();
        }
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::KwWhile: {
        s->kind = Stmt::Kind::While;
        advance();
        s->cond = expression();
        expect(Tok::KwDo, "'do'");
        s->body = body();
        expect(Tok::Semi, "';'");
        return s;
      }
      case Tok::Ident: {
        s->kind = Stmt::Kind::Assign;
        s->target = ident();
        expect(Tok::Assign, "':='");
        s->expr = expression();
        expect(Tok::Semi, "';'");
        return s;
      }
      default:
        throw ParseError("expected statement", cur_.line, cur_.col);
    }
  }

  // A body is a single statement or a begin..end block followed by ';'.
  Block body() {
    Block b;
    if (cur_.tok == Tok::KwBegin) {
      advance();
      while (cur_.tok != Tok::KwEnd) {
        if (cur_.tok == Tok::End) throw ParseError("unterminated block (missing 'end')", cur_.line, cur_.col);
        b.stmts.push_back(statement());
      }
      advance();  // end
      expect(Tok::Semi, "';' after 'end'");
    } else {
      b.stmts.push_back(statement());
    }
    return b;
  }

  ExprPtr expression() { return or_expr(); }

  ExprPtr or_expr() {
    ExprPtr e = and_expr();
    while (cur_.tok == Tok::KwOr) {
      int line = cur_.line, col = cur_.col;
      advance();
      e = with_pos(Expr::make_binary(BinOp::Or, e, and_expr()), line, col);
    }
    return e;
  }

  ExprPtr and_expr() {
    ExprPtr e = not_expr();
    while (cur_.tok == Tok::KwAnd) {
      int line = cur_.line, col = cur_.col;
      advance();
      e = with_pos(Expr::make_binary(BinOp::And, e, not_expr()), line, col);
    }
    return e;
  }

  ExprPtr not_expr() {
    if (cur_.tok == Tok::KwNot) {
      int line = cur_.line, col = cur_.col;
      advance();
      return with_pos(Expr::make_unary(UnOp::Not, not_expr()), line, col);
    }
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr e = additive();
    BinOp op;
    switch (cur_.tok) {
      case Tok::Lt: op = BinOp::Lt; break;
      case Tok::Le: op = BinOp::Le; break;
      case Tok::Gt: op = BinOp::Gt; break;
      case Tok::Ge: op = BinOp::Ge; break;
      case Tok::Eq: op = BinOp::Eq; break;
      case Tok::Ne: op = BinOp::Ne; break;
      default: return e;
    }
    int line = cur_.line, col = cur_.col;
    advance();
    return with_pos(Expr::make_binary(op, e, additive()), line, col);
  }

  ExprPtr additive() {
    ExprPtr e = multiplicative();
    while (cur_.tok == Tok::Plus || cur_.tok == Tok::Minus) {
      BinOp op = cur_.tok == Tok::Plus ? BinOp::Add : BinOp::Sub;
      int line = cur_.line, col = cur_.col;
      advance();
      e = with_pos(Expr::make_binary(op, e, multiplicative()), line, col);
    }
    return e;
  }

  ExprPtr multiplicative() {
    ExprPtr e = unary();
    while (cur_.tok == Tok::Star || cur_.tok == Tok::Slash) {
      BinOp op = cur_.tok == Tok::Star ? BinOp::Mul : BinOp::Div;
      int line = cur_.line, col = cur_.col;
      advance();
      e = with_pos(Expr::make_binary(op, e, unary()), line, col);
    }
    return e;
  }

  ExprPtr unary() {
    if (cur_.tok == Tok::Minus) {
      int line = cur_.line, col = cur_.col;
      advance();
      return with_pos(Expr::make_unary(UnOp::Neg, unary()), line, col);
    }
    return primary();
  }

  ExprPtr primary() {
    int line = cur_.line, col = cur_.col;
    switch (cur_.tok) {
      case Tok::Number: {
        double v = cur_.number;
        advance();
        return with_pos(Expr::make_number(v), line, col);
      }
      case Tok::LParen: {
        advance();
        ExprPtr e = expression();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        std::string name = cur_.text;
        advance();
        if (cur_.tok == Tok::LParen) {
          Builtin b;
          if (name == "sin")
            b = Builtin::Sin;
          else if (name == "cos")
            b = Builtin::Cos;
          else if (name == "tanh" && engine_builtins_)
            b = Builtin::Tanh;
          else
            throw ParseError("unknown function '" + name + "'", line, col);
          advance();
          ExprPtr arg = expression();
          expect(Tok::RParen, "')'");
          return with_pos(Expr::make_call(b, arg), line, col);
        }
        return with_pos(Expr::make_var(name), line, col);
      }
      default:
        throw ParseError("expected expression", cur_.line, cur_.col);
    }
  }

  static ExprPtr with_pos(ExprPtr e, int line, int col) {
    auto m = std::const_pointer_cast<Expr>(e);
    m->line = line;
    m->col = col;
    return e;
  }

  Lexer lexer_;
  Lexeme cur_;
  bool engine_builtins_;
};

enum class ExprType : uint8_t { Real, Bool };

ExprType type_of(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Number:
    case Expr::Kind::Var:
      return ExprType::Real;
    case Expr::Kind::Call: {
      if (type_of(e->a) != ExprType::Real)
        throw ParseError("function argument must be arithmetic", e->line, e->col);
      return ExprType::Real;
    }
    case Expr::Kind::Unary: {
      ExprType t = type_of(e->a);
      if (e->un_op == UnOp::Neg && t != ExprType::Real)
        throw ParseError("unary '-' needs an arithmetic operand", e->line, e->col);
      if (e->un_op == UnOp::Not && t != ExprType::Bool)
        throw ParseError("'not' needs a boolean operand", e->line, e->col);
      return e->un_op == UnOp::Neg ? ExprType::Real : ExprType::Bool;
    }
    case Expr::Kind::Binary: {
      ExprType ta = type_of(e->a);
      ExprType tb = type_of(e->b);
      if (is_boolean(e->bin_op)) {
        if (ta != ExprType::Bool || tb != ExprType::Bool)
          throw ParseError("'and'/'or' need boolean operands", e->line, e->col);
        return ExprType::Bool;
      }
      if (ta != ExprType::Real || tb != ExprType::Real)
        throw ParseError("arithmetic/comparison operands must be arithmetic", e->line, e->col);
      return is_comparison(e->bin_op) ? ExprType::Bool : ExprType::Real;
    }
  }
  return ExprType::Real;
}

void check_types(const Block& b) {
  for (const auto& s : b.stmts) {
    switch (s->kind) {
      case Stmt::Kind::Assign:
        if (type_of(s->expr) != ExprType::Real)
          throw ParseError("assignment needs an arithmetic expression", s->line, s->col);
        break;
      case Stmt::Kind::If:
      case Stmt::Kind::While:
        if (type_of(s->cond) != ExprType::Bool)
          throw ParseError("condition must be boolean", s->line, s->col);
        check_types(s->body);
        check_types(s->else_body);
        break;
      default:
        break;
    }
  }
}

// Definite assignment: after the block, returns the set of variables
// assigned on every path.
std::set<std::string> check_assigned(const Block& b, std::set<std::string> assigned) {
  auto check_expr = [&](const ExprPtr& e, int line, int col) {
    std::set<std::string> reads;
    collect_reads(e, reads);
    for (const auto& v : reads)
      if (!assigned.count(v))
        throw ParseError("variable '" + v + "' may be used before assignment", line, col);
  };
  for (const auto& s : b.stmts) {
    switch (s->kind) {
      case Stmt::Kind::Input:
        for (const auto& n : s->names) assigned.insert(n);
        break;
      case Stmt::Kind::Output:
        for (const auto& n : s->names)
          if (!assigned.count(n))
            throw ParseError("output variable '" + n + "' may be used before assignment", s->line,
                             s->col);
        break;
      case Stmt::Kind::Assign:
        check_expr(s->expr, s->line, s->col);
        assigned.insert(s->target);
        break;
      case Stmt::Kind::If: {
        check_expr(s->cond, s->line, s->col);
        auto then_set = check_assigned(s->body, assigned);
        auto else_set = check_assigned(s->else_body, assigned);
        for (const auto& v : then_set)
          if (else_set.count(v)) assigned.insert(v);
        break;
      }
      case Stmt::Kind::While:
        check_expr(s->cond, s->line, s->col);
        check_assigned(s->body, assigned);
        break;
    }
  }
  return assigned;
}

}  // namespace

Program parse(const std::string& source) {
  Parser parser(source, /*engine_builtins=*/false);
  Program p = parser.parse_program();
  check_types(p.block);
  check_assigned(p.block, {});
  return p;
}

ExprPtr parse_expression(const std::string& source, bool engine_builtins) {
  Parser parser(source, engine_builtins);
  return parser.parse_single_expression();
}

}  // namespace ndf::lang
