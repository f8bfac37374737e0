#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "carnot/expr.hpp"

namespace carnot {

namespace {

using Kind = Expr::Kind;

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& coords)
      : text_(text), coords_(coords) {}

  Expr run() {
    Expr e = expression();
    skip_space();
    if (pos_ < text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = Expr::raw(Kind::sum, {e, term()});
      } else if (accept('-')) {
        e = Expr::raw(Kind::sum, {e, Expr::raw(Kind::negate, {term()})});
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e = Expr::raw(Kind::product, {e, unary()});
      } else if (accept('/')) {
        e = Expr::raw(Kind::quotient, {e, unary()});
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::raw(Kind::negate, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return Expr::raw(Kind::power, {base}, exponent());
    return base;
  }

  int exponent() {
    skip_space();
    bool paren = accept('(');
    skip_space();
    std::size_t start = pos_;
    bool negative = false;
    if (accept('-')) {
      negative = true;
    } else {
      accept('+');
    }
    skip_space();
    std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = start;
      if (pos_ >= text_.size()) fail("expected exponent before end of input");
      fail("non-integer exponent");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      pos_ = start;
      fail("non-integer exponent");
    }
    std::string num(text_.substr(digits, pos_ - digits));
    if (num.size() > 9) {
      pos_ = digits;
      fail("exponent too large");
    }
    int k = std::stoi(num);
    if (paren) expect(')');
    return negative ? -k : k;
  }

  Expr primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expression();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expr number() {
    std::size_t start = pos_;
    bool is_real = false;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      is_real = true;
      ++pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      std::size_t digits = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == digits) {
        pos_ = save;
      } else {
        is_real = true;
      }
    }
    std::string s(text_.substr(start, pos_ - start));
    if (s == ".") {
      pos_ = start;
      fail("malformed number");
    }
    if (is_real) return Expr::real(std::strtod(s.c_str(), nullptr));
    return Expr::rational(Rational(s));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    static const std::vector<std::pair<std::string, Kind>> functions = {
        {"sqrt", Kind::sqrt}, {"exp", Kind::exp}, {"log", Kind::log},
        {"sin", Kind::sin},   {"cos", Kind::cos}, {"tan", Kind::tan}};
    for (const auto& [fname, kind] : functions) {
      if (name == fname) {
        expect('(');
        Expr arg = expression();
        expect(')');
        return Expr::raw(kind, {arg});
      }
    }
    if (std::find(coords_.begin(), coords_.end(), name) == coords_.end()) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    return Expr::variable(name);
  }

  std::string_view text_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_raw(std::string_view text, const std::vector<std::string>& coords) {
  return Parser(text, coords).run();
}

Expr parse(std::string_view text, const std::vector<std::string>& coords) {
  return simplify(parse_raw(text, coords));
}

}  // namespace carnot
