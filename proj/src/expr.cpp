#include "hinfdae/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "hinfdae/error.hpp"

namespace hinfdae {
namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;
using Op = Expression::Op;

NodePtr make(Node node) { return std::make_shared<const Node>(std::move(node)); }

NodePtr binary(Op op, NodePtr lhs, NodePtr rhs) {
  Node node;
  node.op = op;
  node.args = {std::move(lhs), std::move(rhs)};
  return make(std::move(node));
}

class Parser {
 public:
  Parser(const std::string& text, int n, int m) : text_(text), n_(n), m_(m) {}

  NodePtr run() {
    NodePtr e = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, "parse error at position " + std::to_string(pos_) + " in \"" +
                                      text_ + "\": " + msg);
  }

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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) {
        lhs = binary(Op::Mul, lhs, unary());
      } else if (accept('/')) {
        lhs = binary(Op::Div, lhs, unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      Node node;
      node.op = Op::Neg;
      node.args = {unary()};
      return make(std::move(node));
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) return binary(Op::Pow, base, unary());
    return base;
  }

  NodePtr atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = text_.c_str() + pos_;
    char* end = nullptr;
    const double value = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    Node node;
    node.op = Op::Number;
    node.value = value;
    return make(std::move(node));
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name = text_.substr(start, pos_ - start);

    static const std::pair<const char*, Expression::Func> kFuncs[] = {
        {"sin", Expression::Func::Sin},   {"cos", Expression::Func::Cos},
        {"tanh", Expression::Func::Tanh}, {"exp", Expression::Func::Exp},
        {"abs", Expression::Func::Abs}};
    for (const auto& [fname, func] : kFuncs) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after " + name);
        Node node;
        node.op = Op::Call;
        node.func = func;
        node.args = {expr()};
        if (!accept(')')) fail("expected ')' closing " + name);
        return make(std::move(node));
      }
    }

    Node node;
    node.op = Op::Variable;
    if (name == "t") {
      node.var = Expression::VarKind::Time;
      return make(std::move(node));
    }
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'u')) {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      }
      if (digits && name[1] != '0') {
        const int index = std::atoi(name.c_str() + 1);
        const int limit = name[0] == 'x' ? n_ : m_;
        if (index >= 1 && index <= limit) {
          node.var = name[0] == 'x' ? Expression::VarKind::State : Expression::VarKind::Input;
          node.index = index - 1;
          return make(std::move(node));
        }
      }
    }
    throw Error(ErrorKind::Parse, "unknown identifier '" + name + "' in \"" + text_ + "\"");
  }

  const std::string& text_;
  int n_;
  int m_;
  std::size_t pos_ = 0;
};

double eval(const Node& node, std::span<const double> x, std::span<const double> u, double t) {
  switch (node.op) {
    case Op::Number:
      return node.value;
    case Op::Variable:
      switch (node.var) {
        case Expression::VarKind::State: return x[static_cast<std::size_t>(node.index)];
        case Expression::VarKind::Input: return u[static_cast<std::size_t>(node.index)];
        case Expression::VarKind::Time: return t;
      }
      return 0.0;
    case Op::Neg:
      return -eval(*node.args[0], x, u, t);
    case Op::Add:
      return eval(*node.args[0], x, u, t) + eval(*node.args[1], x, u, t);
    case Op::Sub:
      return eval(*node.args[0], x, u, t) - eval(*node.args[1], x, u, t);
    case Op::Mul:
      return eval(*node.args[0], x, u, t) * eval(*node.args[1], x, u, t);
    case Op::Div:
      return eval(*node.args[0], x, u, t) / eval(*node.args[1], x, u, t);
    case Op::Pow:
      return std::pow(eval(*node.args[0], x, u, t), eval(*node.args[1], x, u, t));
    case Op::Call: {
      const double a = eval(*node.args[0], x, u, t);
      switch (node.func) {
        case Expression::Func::Sin: return std::sin(a);
        case Expression::Func::Cos: return std::cos(a);
        case Expression::Func::Tanh: return std::tanh(a);
        case Expression::Func::Exp: return std::exp(a);
        case Expression::Func::Abs: return std::fabs(a);
      }
    }
  }
  return 0.0;
}

const char* func_name(Expression::Func f) {
  switch (f) {
    case Expression::Func::Sin: return "sin";
    case Expression::Func::Cos: return "cos";
    case Expression::Func::Tanh: return "tanh";
    case Expression::Func::Exp: return "exp";
    case Expression::Func::Abs: return "abs";
  }
  return "?";
}

std::string format(const Node& node) {
  switch (node.op) {
    case Op::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", node.value);
      return buf;
    }
    case Op::Variable:
      switch (node.var) {
        case Expression::VarKind::State: return "x" + std::to_string(node.index + 1);
        case Expression::VarKind::Input: return "u" + std::to_string(node.index + 1);
        case Expression::VarKind::Time: return "t";
      }
      return "?";
    case Op::Neg:
      return "(-" + format(*node.args[0]) + ")";
    case Op::Call:
      return std::string(func_name(node.func)) + "(" + format(*node.args[0]) + ")";
    default: {
      static const char kSym[] = {'+', '-', '*', '/', '^'};
      const char sym = kSym[static_cast<int>(node.op) - static_cast<int>(Op::Add)];
      return "(" + format(*node.args[0]) + sym + format(*node.args[1]) + ")";
    }
  }
}

bool equal(const Node& a, const Node& b) {
  if (a.op != b.op || a.args.size() != b.args.size()) return false;
  switch (a.op) {
    case Op::Number:
      if (a.value != b.value) return false;
      break;
    case Op::Variable:
      if (a.var != b.var || a.index != b.index) return false;
      break;
    case Op::Call:
      if (a.func != b.func) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

}  // namespace

Expression Expression::parse(const std::string& text, int n, int m) {
  return Expression(Parser(text, n, m).run());
}

Expression Expression::constant(double value) {
  Node node;
  node.op = Op::Number;
  node.value = value;
  return Expression(make(std::move(node)));
}

double Expression::evaluate(std::span<const double> x, std::span<const double> u,
                            double t) const {
  return eval(*root_, x, u, t);
}

std::string Expression::to_string() const { return format(*root_); }

bool Expression::is_zero_constant() const {
  return root_->op == Op::Number && root_->value == 0.0;
}

bool operator==(const Expression& a, const Expression& b) { return equal(*a.root_, *b.root_); }

}  // namespace hinfdae
