#include <gtest/gtest.h>

#include <cmath>

#include "sresonance/expression.hpp"

using sres::ConfigError;
using sres::Expression;

namespace {
double eval(const char* src, double x) { return Expression::parse(src)(x); }
}  // namespace

TEST(Expression, Arithmetic) {
  EXPECT_EQ(eval("x", 2.5), 2.5);
  EXPECT_EQ(eval("-x", 2.5), -2.5);
  EXPECT_EQ(eval("1 + 2*x", 3.0), 7.0);
  EXPECT_EQ(eval("(1 + 2)*x", 3.0), 9.0);
  EXPECT_EQ(eval("x/4 - 1", 2.0), -0.5);
  EXPECT_EQ(eval("2.5e-1", 0.0), 0.25);
}

TEST(Expression, PowerPrecedence) {
  EXPECT_EQ(eval("-x^2", 3.0), -9.0);
  EXPECT_EQ(eval("-x^3", 2.0), -8.0);
  EXPECT_EQ(eval("(-x)^2", 3.0), 9.0);
  EXPECT_EQ(eval("2^3^2", 0.0), 512.0);
  EXPECT_EQ(eval("2*x^2", 3.0), 18.0);
  EXPECT_EQ(eval("x^-1", 4.0), 0.25);
}

TEST(Expression, IntegerPowersAreExact) {
  for (double x : {-1.7, 0.3, 2.9}) EXPECT_EQ(eval("x^3", x), x * x * x);
  EXPECT_NEAR(eval("x^0.5", 2.0), std::sqrt(2.0), 1e-15);
}

TEST(Expression, Functions) {
  EXPECT_DOUBLE_EQ(eval("exp(x)", 1.0), std::exp(1.0));
  EXPECT_DOUBLE_EQ(eval("tanh(2*x) - x", 0.5), std::tanh(1.0) - 0.5);
  EXPECT_DOUBLE_EQ(eval("1 + 0.5*exp(-x^2)", 1.0), 1.0 + 0.5 * std::exp(-1.0));
}

TEST(Expression, KeepsSource) { EXPECT_EQ(Expression::parse("-x^3").source(), "-x^3"); }

TEST(Expression, DeepNesting) {
  std::string s = "x";
  for (int i = 0; i < 100; ++i) s = "(" + s + "+1)";
  EXPECT_EQ(eval(s.c_str(), 0.0), 100.0);
}

TEST(Expression, Errors) {
  for (const char* bad : {"", "  ", "y", "x +", "(x", "x)", "sin(x)", "exp x", "2 x", "x ^", "1..2"})
    EXPECT_THROW(Expression::parse(bad), ConfigError) << bad;
}

TEST(Expression, ErrorNamesColumn) {
  try {
    Expression::parse("x + * 2");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos);
  }
}
