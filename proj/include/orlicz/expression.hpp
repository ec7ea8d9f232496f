#ifndef ORLICZ_EXPRESSION_HPP
#define ORLICZ_EXPRESSION_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "orlicz/errors.hpp"

namespace orlicz {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

// Grammar (standard precedence, ^ right-associative, unary minus binds looser than ^):
//
//   expr    = term { ("+" | "-") term }
//   term    = unary { ("*" | "/") unary }
//   unary   = ("-" | "+") unary | power
//   power   = primary [ "^" unary ]
//   primary = number | "x" | "y" | func "(" expr [ "," expr ] ")" | "(" expr ")"
//   func    = sin | cos | exp | log | abs | min | max      (min/max take two arguments)
class Expression {
 public:
  /// Throws ParseError; line is always 1, column is 1-based within `text`.
  static Expression parse(std::string_view text) {
    Parser p{text, 0, {}};
    p.skip_ws();
    if (p.at_end()) p.fail("empty expression");
    const int root = p.expr();
    p.skip_ws();
    if (!p.at_end()) p.fail(std::string("unexpected '") + p.peek() + "'");
    Expression e;
    e.nodes_ = std::move(p.nodes);
    e.root_ = root;
    e.source_ = std::string(text);
    return e;
  }

  double operator()(Point at) const { return eval(root_, at); }

  const std::string& source() const noexcept { return source_; }

  bool uses_x() const { return uses(Op::VarX); }
  bool uses_y() const { return uses(Op::VarY); }
  bool is_constant() const { return !uses_x() && !uses_y(); }

 private:
  enum class Op { Num, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Abs, Min, Max };

  struct Node {
    Op op;
    double value = 0.0;
    int a = -1;
    int b = -1;
  };

  struct Parser {
    std::string_view src;
    std::size_t pos;
    std::vector<Node> nodes;

    bool at_end() const { return pos >= src.size(); }
    char peek() const { return at_end() ? '\0' : src[pos]; }
    void skip_ws() {
      while (!at_end() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, 1, pos + 1); }

    int push(Node n) {
      nodes.push_back(n);
      return static_cast<int>(nodes.size()) - 1;
    }

    bool accept(char c) {
      skip_ws();
      if (peek() == c) {
        ++pos;
        return true;
      }
      return false;
    }

    void expect(char c) {
      if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    int expr() {
      int lhs = term();
      for (;;) {
        if (accept('+'))
          lhs = push({Op::Add, 0, lhs, term()});
        else if (accept('-'))
          lhs = push({Op::Sub, 0, lhs, term()});
        else
          return lhs;
      }
    }

    int term() {
      int lhs = unary();
      for (;;) {
        if (accept('*'))
          lhs = push({Op::Mul, 0, lhs, unary()});
        else if (accept('/'))
          lhs = push({Op::Div, 0, lhs, unary()});
        else
          return lhs;
      }
    }

    int unary() {
      if (accept('-')) return push({Op::Neg, 0, unary(), -1});
      if (accept('+')) return unary();
      return power();
    }

    int power() {
      const int base = primary();
      if (accept('^')) return push({Op::Pow, 0, base, unary()});
      return base;
    }

    int primary() {
      skip_ws();
      if (at_end()) fail("unexpected end of expression");
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (c == '(') {
        ++pos;
        const int inner = expr();
        expect(')');
        return inner;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        const std::size_t start = pos;
        while (!at_end() && std::isalnum(static_cast<unsigned char>(src[pos]))) ++pos;
        const std::string_view word = src.substr(start, pos - start);
        if (word == "x") return push({Op::VarX});
        if (word == "y") return push({Op::VarY});
        static constexpr std::pair<std::string_view, Op> unary_funcs[] = {
            {"sin", Op::Sin}, {"cos", Op::Cos}, {"exp", Op::Exp}, {"log", Op::Log}, {"abs", Op::Abs}};
        for (auto [name, op] : unary_funcs) {
          if (word == name) {
            expect('(');
            const int arg = expr();
            expect(')');
            return push({op, 0, arg, -1});
          }
        }
        if (word == "min" || word == "max") {
          expect('(');
          const int a = expr();
          expect(',');
          const int b = expr();
          expect(')');
          return push({word == "min" ? Op::Min : Op::Max, 0, a, b});
        }
        pos = start;
        fail("unknown identifier '" + std::string(word) + "'");
      }
      fail(std::string("unexpected '") + c + "'");
    }

    int number() {
      const char* first = src.data() + pos;
      const char* last = src.data() + src.size();
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{}) fail("malformed number");
      pos += static_cast<std::size_t>(ptr - first);
      return push({Op::Num, v});
    }
  };

  double eval(int i, Point at) const {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Num: return n.value;
      case Op::VarX: return at.x;
      case Op::VarY: return at.y;
      case Op::Neg: return -eval(n.a, at);
      case Op::Add: return eval(n.a, at) + eval(n.b, at);
      case Op::Sub: return eval(n.a, at) - eval(n.b, at);
      case Op::Mul: return eval(n.a, at) * eval(n.b, at);
      case Op::Div: return eval(n.a, at) / eval(n.b, at);
      case Op::Pow: return std::pow(eval(n.a, at), eval(n.b, at));
      case Op::Sin: return std::sin(eval(n.a, at));
      case Op::Cos: return std::cos(eval(n.a, at));
      case Op::Exp: return std::exp(eval(n.a, at));
      case Op::Log: return std::log(eval(n.a, at));
      case Op::Abs: return std::abs(eval(n.a, at));
      case Op::Min: return std::min(eval(n.a, at), eval(n.b, at));
      case Op::Max: return std::max(eval(n.a, at), eval(n.b, at));
    }
    return std::nan("");
  }

  bool uses(Op op) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [op](const Node& n) { return n.op == op; });
  }

  std::vector<Node> nodes_;
  int root_ = -1;
  std::string source_;
};

}  // namespace orlicz

#endif  // ORLICZ_EXPRESSION_HPP
