#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hinfdae {

/// Scalar expression over x1..xn, u1..um and t.
///
/// Grammar:
///   expr   := term (('+' | '-') term)*
///   term   := unary (('*' | '/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?          right associative
///   atom   := number | ident | func '(' expr ')' | '(' expr ')'
///   func   := sin | cos | tanh | exp | abs
/// Numbers accept decimal and exponent forms ("2.5e-3"). Unary minus binds
/// looser than '^', so -x^2 is -(x^2).
class Expression {
 public:
  enum class Op { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Func { Sin, Cos, Tanh, Exp, Abs };
  enum class VarKind { State, Input, Time };

  struct Node {
    Op op = Op::Number;
    double value = 0.0;
    VarKind var = VarKind::Time;
    int index = 0;  // zero-based for State / Input
    Func func = Func::Sin;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

  /// Throws Error(Parse) with the offending character position, or naming an
  /// unknown identifier.
  static Expression parse(const std::string& text, int n, int m);
  static Expression constant(double value);

  double evaluate(std::span<const double> x, std::span<const double> u, double t) const;

  /// Fully parenthesized form; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

  bool is_zero_constant() const;
  const Node& root() const { return *root_; }

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  explicit Expression(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

}  // namespace hinfdae
