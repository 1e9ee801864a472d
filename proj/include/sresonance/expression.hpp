#pragma once

// Minimal arithmetic expressions in one variable, used to define drift and
// diffusion coefficients without recompiling.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//   func    := 'exp' | 'tanh'
//
// '^' is right-associative and binds tighter than unary minus, so -x^2 is
// -(x^2).

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "sresonance/errors.hpp"

namespace sres {

class Expression {
 public:
  static Expression parse(std::string_view text) {
    Parser p{text, 0, {}};
    p.skip_ws();
    if (p.pos >= text.size()) p.fail("empty expression");
    p.expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    Expression e;
    e.source_ = std::string(text);
    e.code_ = std::move(p.code);
    return e;
  }

  double operator()(double x) const {
    // Stack depth is bounded by the program length.
    double stack[64] = {};
    std::vector<double> big;
    double* st = stack;
    if (code_.size() > 64) {
      big.resize(code_.size());
      st = big.data();
    }
    int top = -1;
    for (const auto& ins : code_) {
      switch (ins.op) {
        case Op::push: st[++top] = ins.value; break;
        case Op::var: st[++top] = x; break;
        case Op::neg: st[top] = -st[top]; break;
        case Op::exp: st[top] = std::exp(st[top]); break;
        case Op::tanh: st[top] = std::tanh(st[top]); break;
        case Op::add: st[top - 1] += st[top]; --top; break;
        case Op::sub: st[top - 1] -= st[top]; --top; break;
        case Op::mul: st[top - 1] *= st[top]; --top; break;
        case Op::div: st[top - 1] /= st[top]; --top; break;
        case Op::pow: st[top - 1] = ipow_or_pow(st[top - 1], st[top]); --top; break;
      }
    }
    return st[0];
  }

  const std::string& source() const { return source_; }

 private:
  enum class Op { push, var, neg, exp, tanh, add, sub, mul, div, pow };
  struct Instr {
    Op op;
    double value = 0.0;
  };

  // Integer exponents stay exact for negative bases (x^3 with x < 0).
  static double ipow_or_pow(double b, double e) {
    if (e == std::floor(e) && std::abs(e) <= 64) {
      long n = static_cast<long>(e);
      const bool inv = n < 0;
      if (inv) n = -n;
      double r = 1.0;
      double base = b;
      while (n) {
        if (n & 1) r *= base;
        base *= base;
        n >>= 1;
      }
      return inv ? 1.0 / r : r;
    }
    return std::pow(b, e);
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;
    std::vector<Instr> code;

    [[noreturn]] void fail(const std::string& what) const {
      throw ConfigError("expression '" + std::string(s) + "': " + what + " at column " +
                        std::to_string(pos + 1));
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    void expr() {
      term();
      while (true) {
        if (accept('+')) {
          term();
          code.push_back({Op::add});
        } else if (accept('-')) {
          term();
          code.push_back({Op::sub});
        } else {
          return;
        }
      }
    }
    void term() {
      unary();
      while (true) {
        if (accept('*')) {
          unary();
          code.push_back({Op::mul});
        } else if (accept('/')) {
          unary();
          code.push_back({Op::div});
        } else {
          return;
        }
      }
    }
    void unary() {
      if (accept('-')) {
        unary();
        code.push_back({Op::neg});
      } else if (accept('+')) {
        unary();
      } else {
        power();
      }
    }
    void power() {
      primary();
      if (accept('^')) {
        unary();
        code.push_back({Op::pow});
      }
    }
    void primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        const std::string rest(s.substr(pos));
        char* end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str()) fail("malformed number");
        pos += static_cast<std::size_t>(end - rest.c_str());
        code.push_back({Op::push, v});
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        const std::string_view name = s.substr(start, pos - start);
        if (name == "x") {
          code.push_back({Op::var});
          return;
        }
        Op fn;
        if (name == "exp")
          fn = Op::exp;
        else if (name == "tanh")
          fn = Op::tanh;
        else {
          pos = start;
          fail("unknown identifier '" + std::string(name) + "'");
        }
        expect('(');
        expr();
        expect(')');
        code.push_back({fn});
        return;
      }
      if (accept('(')) {
        expr();
        expect(')');
        return;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  std::string source_;
  std::vector<Instr> code_;
};

}  // namespace sres
