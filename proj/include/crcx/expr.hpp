#pragma once

// Expression language for charts, frame fields, contact forms and immersion
// components. Precedence-climbing parser, immutable ASTs, evaluation over
// jets. re/im/conj act coefficient-wise on jets; that is sound here because
// the coordinates are real, but they are not complex-analytic operations.

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "crcx/errors.hpp"
#include "crcx/jet.hpp"

namespace crcx {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind { literal, coordinate, imaginary, unary, binary, call };
  enum class Unary { neg, re, im, conj };
  enum class Binary { add, sub, mul, div, pow };
  enum class Fn { exp, sin, cos, sqrt, log };

  Kind kind{};
  double lit = 0.0;      // literal
  bool lit_is_int = false;
  int coord = 0;         // coordinate axis 0..2
  Unary un{};
  Binary bin{};
  Fn fn{};
  int exponent = 0;      // binary pow
  ExprPtr a, b;

  static ExprPtr literal(double v, bool is_int) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::literal;
    e->lit = v;
    e->lit_is_int = is_int;
    return e;
  }
  static ExprPtr coordinate(int axis) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::coordinate;
    e->coord = axis;
    return e;
  }
  static ExprPtr imaginary() {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::imaginary;
    return e;
  }
  static ExprPtr unary(Unary u, ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::unary;
    e->un = u;
    e->a = std::move(x);
    return e;
  }
  static ExprPtr binary(Binary b, ExprPtr x, ExprPtr y) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::binary;
    e->bin = b;
    e->a = std::move(x);
    e->b = std::move(y);
    return e;
  }
  static ExprPtr power(ExprPtr x, int n) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::binary;
    e->bin = Binary::pow;
    e->a = std::move(x);
    e->exponent = n;
    return e;
  }
  static ExprPtr call(Fn f, ExprPtr x) {
    auto e = std::make_shared<Expr>();
    e->kind = Kind::call;
    e->fn = f;
    e->a = std::move(x);
    return e;
  }
};

inline bool expr_equal(const ExprPtr& x, const ExprPtr& y) {
  if (!x || !y) return x == y;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case Expr::Kind::literal:
      return x->lit == y->lit && x->lit_is_int == y->lit_is_int;
    case Expr::Kind::coordinate:
      return x->coord == y->coord;
    case Expr::Kind::imaginary:
      return true;
    case Expr::Kind::unary:
      return x->un == y->un && expr_equal(x->a, y->a);
    case Expr::Kind::binary:
      if (x->bin != y->bin) return false;
      if (x->bin == Expr::Binary::pow)
        return x->exponent == y->exponent && expr_equal(x->a, y->a);
      return expr_equal(x->a, y->a) && expr_equal(x->b, y->b);
    case Expr::Kind::call:
      return x->fn == y->fn && expr_equal(x->a, y->a);
  }
  return false;
}

namespace detail {

struct Token {
  enum class Type { number, ident, plus, minus, star, slash, caret, lparen, rparen, end };
  Type type{};
  std::string text;
  double value = 0.0;
  bool is_int = false;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ >= src_.size()) {
      t.type = Token::Type::end;
      return t;
    }
    const char c = src_[pos_];
    switch (c) {
      case '+': t.type = Token::Type::plus; ++pos_; return t;
      case '-': t.type = Token::Type::minus; ++pos_; return t;
      case '*': t.type = Token::Type::star; ++pos_; return t;
      case '/': t.type = Token::Type::slash; ++pos_; return t;
      case '^': t.type = Token::Type::caret; ++pos_; return t;
      case '(': t.type = Token::Type::lparen; ++pos_; return t;
      case ')': t.type = Token::Type::rparen; ++pos_; return t;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      bool saw_dot = false, saw_exp = false;
      while (pos_ < src_.size()) {
        const char d = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(d))) {
          ++pos_;
        } else if (d == '.' && !saw_dot && !saw_exp) {
          saw_dot = true;
          ++pos_;
        } else if ((d == 'e' || d == 'E') && !saw_exp && pos_ > start) {
          saw_exp = true;
          ++pos_;
          if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
        } else {
          break;
        }
      }
      t.type = Token::Type::number;
      t.text = std::string(src_.substr(start, pos_ - start));
      t.value = std::strtod(t.text.c_str(), nullptr);
      t.is_int = !saw_dot && !saw_exp;
      return t;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      t.type = Token::Type::ident;
      t.text = std::string(src_.substr(start, pos_ - start));
      return t;
    }
    throw ParseError(errc::syntax_error, std::string("unexpected character '") + c + "'", pos_,
                     {"number", "identifier", "operator", "("});
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) { advance(); }

  ExprPtr parse() {
    ExprPtr e = parse_expr(0);
    if (cur_.type != Token::Type::end)
      throw ParseError(errc::syntax_error, "trailing input", cur_.offset, {"end of input"});
    return e;
  }

 private:
  void advance() { cur_ = lex_.next(); }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected) {
    throw ParseError(errc::syntax_error, what, cur_.offset, std::move(expected));
  }

  static int lbp(Token::Type t) {
    switch (t) {
      case Token::Type::plus:
      case Token::Type::minus: return 10;
      case Token::Type::star:
      case Token::Type::slash: return 20;
      case Token::Type::caret: return 30;
      default: return 0;
    }
  }

  ExprPtr parse_expr(int min_bp) {
    ExprPtr left = parse_prefix();
    while (true) {
      const int bp = lbp(cur_.type);
      if (bp <= min_bp) break;
      const Token op = cur_;
      advance();
      if (op.type == Token::Type::caret) {
        // Right-associative; the exponent must reduce to an integer literal.
        ExprPtr rhs = parse_expr(bp - 1);
        left = Expr::power(std::move(left), extract_int(rhs, op.offset));
      } else {
        ExprPtr rhs = parse_expr(bp);
        switch (op.type) {
          case Token::Type::plus: left = Expr::binary(Expr::Binary::add, left, rhs); break;
          case Token::Type::minus: left = Expr::binary(Expr::Binary::sub, left, rhs); break;
          case Token::Type::star: left = Expr::binary(Expr::Binary::mul, left, rhs); break;
          case Token::Type::slash: left = Expr::binary(Expr::Binary::div, left, rhs); break;
          default: fail("unexpected operator", {"+", "-", "*", "/", "^"});
        }
      }
    }
    return left;
  }

  ExprPtr parse_prefix() {
    switch (cur_.type) {
      case Token::Type::minus: {
        advance();
        return Expr::unary(Expr::Unary::neg, parse_expr(25));
      }
      case Token::Type::plus: {
        advance();
        return parse_expr(25);
      }
      case Token::Type::number: {
        const Token t = cur_;
        advance();
        return Expr::literal(t.value, t.is_int);
      }
      case Token::Type::lparen: {
        advance();
        ExprPtr e = parse_expr(0);
        expect(Token::Type::rparen, ")");
        return e;
      }
      case Token::Type::ident:
        return parse_ident();
      default:
        fail("expected an operand", {"number", "identifier", "(", "-"});
    }
  }

  ExprPtr parse_ident() {
    const Token t = cur_;
    advance();
    if (t.text == "u1") return Expr::coordinate(0);
    if (t.text == "u2") return Expr::coordinate(1);
    if (t.text == "u3") return Expr::coordinate(2);
    if (t.text == "i") return Expr::imaginary();
    if (t.text == "pi") return Expr::literal(std::numbers::pi, false);

    auto parse_arg = [&]() {
      expect(Token::Type::lparen, "(");
      ExprPtr arg = parse_expr(0);
      expect(Token::Type::rparen, ")");
      return arg;
    };
    if (t.text == "exp") return Expr::call(Expr::Fn::exp, parse_arg());
    if (t.text == "sin") return Expr::call(Expr::Fn::sin, parse_arg());
    if (t.text == "cos") return Expr::call(Expr::Fn::cos, parse_arg());
    if (t.text == "sqrt") return Expr::call(Expr::Fn::sqrt, parse_arg());
    if (t.text == "log") return Expr::call(Expr::Fn::log, parse_arg());
    if (t.text == "re") return Expr::unary(Expr::Unary::re, parse_arg());
    if (t.text == "im") return Expr::unary(Expr::Unary::im, parse_arg());
    if (t.text == "conj") return Expr::unary(Expr::Unary::conj, parse_arg());

    throw ParseError(errc::unknown_identifier, "unknown identifier '" + t.text + "'", t.offset,
                     {"u1", "u2", "u3", "i", "pi", "exp", "sin", "cos", "sqrt", "log", "re", "im",
                      "conj"});
  }

  void expect(Token::Type type, const std::string& what) {
    if (cur_.type != type) fail("expected '" + what + "'", {what});
    advance();
  }

  // Accepts integer literals, their negations, and literal^literal towers.
  int extract_int(const ExprPtr& e, std::size_t offset) {
    if (e->kind == Expr::Kind::literal && e->lit_is_int) {
      return static_cast<int>(e->lit);
    }
    if (e->kind == Expr::Kind::unary && e->un == Expr::Unary::neg)
      return -extract_int(e->a, offset);
    if (e->kind == Expr::Kind::binary && e->bin == Expr::Binary::pow) {
      const int base = extract_int(e->a, offset);
      int r = 1;
      for (int n = 0; n < e->exponent; ++n) r *= base;
      if (e->exponent < 0)
        throw ParseError(errc::syntax_error, "negative exponent in integer power tower", offset,
                         {"integer exponent"});
      return r;
    }
    throw ParseError(errc::syntax_error, "exponent must be an integer literal", offset,
                     {"integer exponent"});
  }

  Lexer lex_;
  Token cur_;
};

}  // namespace detail

inline ExprPtr parse(std::string_view src) { return detail::Parser(src).parse(); }

inline Jet eval(const ExprPtr& e, const std::array<double, 3>& point, int order) {
  switch (e->kind) {
    case Expr::Kind::literal:
      return Jet::constant(order, e->lit, point);
    case Expr::Kind::coordinate:
      return Jet::coordinate(order, e->coord, point);
    case Expr::Kind::imaginary:
      return Jet::constant(order, cplx(0, 1), point);
    case Expr::Kind::unary: {
      const Jet a = eval(e->a, point, order);
      switch (e->un) {
        case Expr::Unary::neg: return -a;
        case Expr::Unary::re: return a.real_part();
        case Expr::Unary::im: return a.imag_part();
        case Expr::Unary::conj: return a.conj();
      }
      break;
    }
    case Expr::Kind::binary: {
      if (e->bin == Expr::Binary::pow) {
        const Jet a = eval(e->a, point, order);
        const int n = e->exponent;
        if (n == 0) return Jet::constant(order, 1.0, point);
        Jet base = n > 0 ? a : a.reciprocal();
        Jet r = base;
        for (int m = 1; m < std::abs(n); ++m) r = r * base;
        return r;
      }
      const Jet a = eval(e->a, point, order);
      const Jet b = eval(e->b, point, order);
      switch (e->bin) {
        case Expr::Binary::add: return a + b;
        case Expr::Binary::sub: return a - b;
        case Expr::Binary::mul: return a * b;
        case Expr::Binary::div: return a / b;
        case Expr::Binary::pow: break;
      }
      break;
    }
    case Expr::Kind::call: {
      const Jet a = eval(e->a, point, order);
      switch (e->fn) {
        case Expr::Fn::exp: return exp(a);
        case Expr::Fn::sin: return sin(a);
        case Expr::Fn::cos: return cos(a);
        case Expr::Fn::sqrt: return sqrt(a);
        case Expr::Fn::log: return log(a);
      }
      break;
    }
  }
  throw CalcError(errc::config_error, "malformed expression node");
}

namespace detail {

inline void print_double(std::string& out, double v, bool is_int) {
  if (is_int) {
    out += std::to_string(static_cast<long long>(v));
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

// Precedence-aware printer; parse(print(e)) is structurally equal to e.
inline void print_expr(std::string& out, const ExprPtr& e, int parent_bp) {
  switch (e->kind) {
    case Expr::Kind::literal:
      print_double(out, e->lit, e->lit_is_int);
      return;
    case Expr::Kind::coordinate:
      out += "u";
      out += static_cast<char>('1' + e->coord);
      return;
    case Expr::Kind::imaginary:
      out += "i";
      return;
    case Expr::Kind::unary: {
      switch (e->un) {
        case Expr::Unary::neg: {
          const bool parens = parent_bp > 10;
          if (parens) out += "(";
          out += "-";
          print_expr(out, e->a, 25);
          if (parens) out += ")";
          return;
        }
        case Expr::Unary::re: out += "re("; break;
        case Expr::Unary::im: out += "im("; break;
        case Expr::Unary::conj: out += "conj("; break;
        default: break;
      }
      print_expr(out, e->a, 0);
      out += ")";
      return;
    }
    case Expr::Kind::binary: {
      if (e->bin == Expr::Binary::pow) {
        const bool parens = parent_bp >= 30;
        if (parens) out += "(";
        print_expr(out, e->a, 30);
        out += "^";
        if (e->exponent < 0) {
          out += "(";
          out += std::to_string(e->exponent);
          out += ")";
        } else {
          out += std::to_string(e->exponent);
        }
        if (parens) out += ")";
        return;
      }
      int bp = 0;
      const char* op = "";
      switch (e->bin) {
        case Expr::Binary::add: bp = 10; op = " + "; break;
        case Expr::Binary::sub: bp = 10; op = " - "; break;
        case Expr::Binary::mul: bp = 20; op = "*"; break;
        case Expr::Binary::div: bp = 20; op = "/"; break;
        case Expr::Binary::pow: break;
      }
      const bool parens = parent_bp >= bp;
      if (parens) out += "(";
      print_expr(out, e->a, bp - 1);
      out += op;
      print_expr(out, e->b, bp);
      if (parens) out += ")";
      return;
    }
    case Expr::Kind::call: {
      switch (e->fn) {
        case Expr::Fn::exp: out += "exp("; break;
        case Expr::Fn::sin: out += "sin("; break;
        case Expr::Fn::cos: out += "cos("; break;
        case Expr::Fn::sqrt: out += "sqrt("; break;
        case Expr::Fn::log: out += "log("; break;
      }
      print_expr(out, e->a, 0);
      out += ")";
      return;
    }
  }
}

}  // namespace detail

inline std::string print(const ExprPtr& e) {
  std::string out;
  detail::print_expr(out, e, 0);
  return out;
}

}  // namespace crcx
