// Recursive-descent parser for the smooth-expression grammar:
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' INT)?
//   base   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')' | '-' base
//
// Function heads: exp, log, sin, cos, cut, and cut', cut'', ... for the
// derivatives of cut. Numeric literals are read as exact rationals.

#include <array>
#include <cctype>

#include "cinfty/expr.hpp"

namespace cinfty {

namespace {

constexpr std::array kNonSmooth = {"abs",  "floor", "ceil", "round", "trunc", "sign", "sgn",
                                   "sqrt", "max",   "min",  "mod",   "fmod",  "heaviside",
                                   "step", "frac"};

class Parser {
public:
  Parser(std::string_view src, const VarList& vars) : src_(src), vars_(vars) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  char peek() {
    skip_space();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      Expr t = term();
      terms.push_back(c == '+' ? t : -t);
    }
    return terms.size() == 1 ? terms.front() : sum(std::move(terms));
  }

  Expr term() {
    Expr acc = factor();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      const std::size_t at = pos_++;
      Expr rhs = factor();
      if (c == '*') {
        acc = acc * rhs;
      } else {
        try {
          acc = acc / rhs;
        } catch (const GuardError&) {
          throw ParseError("division by the zero constant", at);
        }
      }
    }
    return acc;
  }

  Expr factor() {
    Expr b = base();
    if (peek() == '^') {
      ++pos_;
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
        fail("non-integer power is not smooth");
      const auto digits = src_.substr(start, pos_ - start);
      if (digits.size() > 6) fail("exponent too large");
      return pow(b, std::stoi(std::string(digits)));
    }
    return b;
  }

  Expr base() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -base();
    }
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    if (c == '\0') fail("unexpected end of input");
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    std::string digits;
    long scale = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) digits += src_[pos_++];
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits += src_[pos_++];
        --scale;
      }
    }
    if (digits.empty()) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      int sign = 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) sign = src_[p++] == '-' ? -1 : 1;
      std::string exp_digits;
      while (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) exp_digits += src_[p++];
      if (exp_digits.empty()) fail("malformed exponent");
      if (exp_digits.size() > 4) fail("exponent too large");
      scale += sign * std::stol(exp_digits);
      pos_ = p;
    }
    Rational q(mpz_class(digits, 10));
    mpz_class ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    if (scale < 0)
      q /= ten_pow;
    else
      q *= ten_pow;
    q.canonicalize();
    return Expr::constant(q);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    std::string name(src_.substr(start, pos_ - start));
    int primes = 0;
    if (name == "cut")
      while (pos_ < src_.size() && src_[pos_] == '\'') {
        ++primes;
        ++pos_;
      }

    if (peek() == '(') {
      const std::size_t head_at = start;
      auto call = [&](auto fn) {
        ++pos_;
        Expr a = expr();
        expect(')');
        try {
          return fn(a);
        } catch (const GuardError& err) {
          throw ParseError(err.what(), head_at);
        }
      };
      if (name == "exp") return call([](const Expr& a) { return exp(a); });
      if (name == "log") return call([](const Expr& a) { return log(a); });
      if (name == "sin") return call([](const Expr& a) { return sin(a); });
      if (name == "cos") return call([](const Expr& a) { return cos(a); });
      if (name == "cut") return call([primes](const Expr& a) { return cut_derivative(a, primes); });
      for (const char* bad : kNonSmooth)
        if (name == bad) throw ParseError("non-smooth construct '" + name + "' rejected", start);
      if (vars_.index_of(name)) throw ParseError("variable '" + name + "' used as a function", start);
      throw ParseError("unknown function '" + name + "'", start);
    }
    if (primes > 0) throw ParseError("expected '(' after cut derivative", pos_);
    if (auto idx = vars_.index_of(name)) return Expr::variable(*idx);
    for (const char* bad : kNonSmooth)
      if (name == bad) throw ParseError("non-smooth construct '" + name + "' rejected", start);
    throw ParseError("unknown identifier '" + name + "'", start);
  }

  std::string_view src_;
  const VarList& vars_;
  std::size_t pos_ = 0;
};

} // namespace

Expr parse_expr(std::string_view src, const VarList& vars) { return Parser(src, vars).parse(); }

} // namespace cinfty
