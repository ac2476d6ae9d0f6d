#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hinfdae/error.hpp"
#include "hinfdae/expr.hpp"

using hinfdae::Error;
using hinfdae::ErrorKind;
using hinfdae::Expression;

namespace {

double eval(const std::string& text, std::vector<double> x = {}, std::vector<double> u = {}, double t = 0.0) {
  return Expression::parse(text, static_cast<int>(x.size()), static_cast<int>(u.size())).evaluate(x, u, t);
}

ErrorKind parse_error_kind(const std::string& text, int n) {
  try {
    Expression::parse(text, n, 0);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Usage;
}

}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("10 - 4 - 3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("2.5e-1 * 4"), 1.0);
}

TEST(Expression, PowerIsRightAssociativeAndBindsTighterThanMinus) {
  EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
}

TEST(Expression, Functions) {
  EXPECT_DOUBLE_EQ(eval("sin(x1)", {0.3}), std::sin(0.3));
  EXPECT_DOUBLE_EQ(eval("cos(x1)", {0.3}), std::cos(0.3));
  EXPECT_DOUBLE_EQ(eval("tanh(x1)", {0.3}), std::tanh(0.3));
  EXPECT_DOUBLE_EQ(eval("exp(x1)", {0.3}), std::exp(0.3));
  EXPECT_DOUBLE_EQ(eval("abs(x1)", {-0.3}), 0.3);
}

TEST(Expression, VariablesInputsAndTime) {
  EXPECT_DOUBLE_EQ(eval("x1 * u1 + t", {2.0}, {3.0}, 0.5), 6.5);
  EXPECT_DOUBLE_EQ(eval("50*exp(-0.2*t)*cos(5*t)", {}, {}, 1.0), 50 * std::exp(-0.2) * std::cos(5.0));
}

TEST(Expression, UnknownIdentifierIsParseError) {
  EXPECT_EQ(parse_error_kind("sin(x3)", 2), ErrorKind::Parse);
  EXPECT_EQ(parse_error_kind("foo(x1)", 2), ErrorKind::Parse);
  EXPECT_EQ(parse_error_kind("y", 2), ErrorKind::Parse);
}

TEST(Expression, SyntaxErrorsReportPosition) {
  try {
    Expression::parse("1 + * 2", 0, 0);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos) << e.what();
  }
  EXPECT_EQ(parse_error_kind("(1 + 2", 0), ErrorKind::Parse);
  EXPECT_EQ(parse_error_kind("", 0), ErrorKind::Parse);
  EXPECT_EQ(parse_error_kind("1 2", 0), ErrorKind::Parse);
}

TEST(Expression, ZeroConstant) {
  EXPECT_TRUE(Expression::parse("0", 2, 0).is_zero_constant());
  EXPECT_FALSE(Expression::parse("x1", 2, 0).is_zero_constant());
}

TEST(Expression, RoundTripReproducesTree) {
  const std::vector<std::string> texts = {"0.5*sin(x2)", "-x1^2 + 3*x2/(1+abs(x1))", "2^3^2",
                                          "exp(-0.2*t)*cos(5*t)", "(t^2+0.1)/(t^2+1)", "-(-x1)",
                                          "tanh(u1) - 1e-3"};
  for (const auto& text : texts) {
    const Expression a = Expression::parse(text, 2, 1);
    const Expression b = Expression::parse(a.to_string(), 2, 1);
    EXPECT_TRUE(a == b) << text << " -> " << a.to_string();
  }
}

TEST(Expression, RoundTripPreservesValuesOnRandomPoints) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const Expression a = Expression::parse("x1*sin(x2) - x2^3/(2 + cos(x1)) + t*u1", 2, 1);
  const Expression b = Expression::parse(a.to_string(), 2, 1);
  for (int i = 0; i < 50; ++i) {
    const std::vector<double> x = {dist(rng), dist(rng)};
    const std::vector<double> u = {dist(rng)};
    const double t = dist(rng);
    EXPECT_EQ(a.evaluate(x, u, t), b.evaluate(x, u, t));
  }
}
