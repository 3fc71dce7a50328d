#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cis/error.hpp"
#include "cis/expr.hpp"
#include "support.hpp"

namespace cis {
namespace {

using expr::Inclusion;
using expr::parse;

double real(const char* src, std::vector<double> x) { return expr::eval_real(parse(src), x); }

// Random expressions over x1, x2 that are defined everywhere.
std::string random_expr(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  auto sub = [&] { return random_expr(rng, depth - 1); };
  switch (pick(rng)) {
    case 0:
      return "x1";
    case 1:
      return "x2";
    case 2:
      return testing::num(std::round(c(rng) * 100) / 100);
    case 3:
      return "(" + sub() + " + " + sub() + ")";
    case 4:
      return "(" + sub() + " - " + sub() + ")";
    case 5:
      return "(" + sub() + " * " + sub() + ")";
    case 6:
      return "(" + sub() + ") / (2 + (" + sub() + ")^2)";
    case 7:
      return "sin(" + sub() + ")";
    case 8:
      return "cos(" + sub() + ")";
    case 9:
      return "exp(0.3*" + sub() + ")";
    case 10:
      return "log(1 + (" + sub() + ")^2)";
    default:
      return "-(" + sub() + ")^3";
  }
}

TEST(Parse, Examples) {
  EXPECT_EQ(parse("x1"), expr::Expr::variable(0));
  const auto e = parse("sin(x1)*cos(x1)");
  EXPECT_EQ(e.kind(), expr::Kind::Binary);
  EXPECT_EQ(e.op(), expr::Op::Mul);
  EXPECT_EQ(e.lhs().op(), expr::Op::Sin);
  EXPECT_EQ(e.rhs().op(), expr::Op::Cos);
  EXPECT_EQ(e.lhs().arg(), expr::Expr::variable(0));
  const std::vector<double> x{0.3};
  EXPECT_NEAR(expr::eval_real(parse("9.8*0.3*0.2/0.006*sin(x1)"), x), 98.0 * std::sin(0.3), 1e-12);
}

TEST(Parse, Precedence) {
  EXPECT_DOUBLE_EQ(real("2 + 3*4", {}), 14.0);
  EXPECT_DOUBLE_EQ(real("-2^2", {}), -4.0);
  EXPECT_DOUBLE_EQ(real("(1 - 2) - 3", {}), -4.0);
  EXPECT_DOUBLE_EQ(real("1 - 2 - 3", {}), -4.0);
  EXPECT_DOUBLE_EQ(real("8 / 4 / 2", {}), 1.0);
  EXPECT_DOUBLE_EQ(real("2*x1^3", {2.0}), 16.0);
}

TEST(Parse, ErrorsCarryPosition) {
  try {
    parse("x1 + * 2");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_THROW(parse("foo(x1)"), ParseError);
  EXPECT_THROW(parse("sin(x1, x2)"), ParseError);
  EXPECT_THROW(parse("x3", 2), ParseError);
  EXPECT_THROW(parse(""), ParseError);
  EXPECT_THROW(parse("x1^0.5"), ParseError);
}

TEST(Parse, PrintParseRoundTrip) {
  std::mt19937 rng(11);
  for (int t = 0; t < 300; ++t) {
    const auto e = parse(random_expr(rng, 4));
    EXPECT_EQ(parse(e.to_string()), e);
  }
}

TEST(EvalReal, Examples) {
  EXPECT_EQ(real("x1+x2", {1, 2}), 3.0);
  EXPECT_EQ(real("sin(x1)", {0}), 0.0);
  // 98 sin(0.05) - 0.166667 by hand.
  EXPECT_NEAR(real("98*sin(x1) - 16.6667*x2", {0.05, 0.01}), 98 * 0.049979169270678 - 0.166667, 1e-9);
  EXPECT_THROW(real("log(x1)", {-1}), DomainError);
  EXPECT_THROW(real("1/x1", {0}), DomainError);
}

TEST(EvalInterval, Examples) {
  const auto sq = expr::eval_interval(parse("x1*x1"), Box{Interval(-1, 1)});
  EXPECT_TRUE(sq.contains(Interval(0, 1)));
  EXPECT_NEAR(sq.lo(), -1.0, 1e-9);
  const auto s = expr::eval_interval(parse("sin(x1)"), Box{Interval(0, std::numbers::pi / 2)});
  EXPECT_NEAR(s.lo(), 0.0, 1e-9);
  EXPECT_NEAR(s.hi(), 1.0, 1e-9);
  const auto sum = expr::eval_interval(parse("x1+x2"), Box{Interval(0, 1), Interval(2, 3)});
  EXPECT_NEAR(sum.lo(), 2.0, 1e-9);
  EXPECT_NEAR(sum.hi(), 4.0, 1e-9);
  EXPECT_THROW(expr::eval_interval(parse("1/x1"), Box{Interval(-1, 1)}), DomainError);
}

TEST(EvalInterval, MeanValueTightensDependency) {
  const Box b{Interval(0.9, 1.1)};
  const auto e = parse("x1*x1 - x1");
  const auto nat = expr::eval_interval(e, b, Inclusion::natural);
  const auto mv = expr::eval_interval(e, b, Inclusion::mean_value);
  const auto best = expr::eval_interval(e, b, Inclusion::best);
  EXPECT_LT(mv.width(), nat.width());
  EXPECT_LE(best.width(), std::min(mv.width(), nat.width()) * (1 + 1e-9));
}

class Soundness : public ::testing::TestWithParam<Inclusion> {};

TEST_P(Soundness, RandomExpressionsEncloseSamples) {
  std::mt19937 rng(7);
  const Box frame{Interval(-2, 2), Interval(-2, 2)};
  for (int t = 0; t < 1000; ++t) {
    const auto e = parse(random_expr(rng, 4));
    const Box b = testing::random_sub_box(frame, rng);
    const Interval enc = expr::eval_interval(e, b, GetParam());
    for (int s = 0; s < 100; ++s) {
      const auto p = testing::sample_in(b, rng);
      const double v = expr::eval_real(e, p);
      ASSERT_TRUE(enc.contains(v)) << e.to_string() << " on " << b << " at (" << p[0] << ", " << p[1]
                                   << ") gives " << v << " outside " << enc;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllModes, Soundness,
                         ::testing::Values(Inclusion::natural, Inclusion::mean_value, Inclusion::best));

TEST(Gradient, Examples) {
  EXPECT_EQ(expr::eval_gradient(parse("x1*x2"), std::vector<double>{2, 3}), (std::vector<double>{3, 2}));
  EXPECT_EQ(expr::eval_gradient(parse("sin(x1)"), std::vector<double>{0}), std::vector<double>{1});
  const auto g = expr::eval_gradient(parse("cos(x1)*x2"), std::vector<double>{0.1, 2});
  EXPECT_NEAR(g[0], -2 * std::sin(0.1), 1e-15);
  EXPECT_NEAR(g[1], std::cos(0.1), 1e-15);
  EXPECT_THROW(expr::eval_gradient(parse("abs(x1)"), std::vector<double>{0}), DomainError);
}

TEST(Gradient, MatchesCentralDifferences) {
  std::mt19937 rng(8);
  const double h = 1e-6;
  for (int t = 0; t < 500; ++t) {
    const auto e = parse(random_expr(rng, 3));
    const auto p = testing::sample_in(Box{Interval(-1.5, 1.5), Interval(-1.5, 1.5)}, rng);
    const auto g = expr::eval_gradient(e, p);
    for (std::size_t j = 0; j < 2; ++j) {
      auto a = p, b = p;
      a[j] += h;
      b[j] -= h;
      const double fd = (expr::eval_real(e, a) - expr::eval_real(e, b)) / (2 * h);
      EXPECT_NEAR(g[j], fd, 1e-5 * std::max(1.0, std::abs(g[j]))) << e.to_string();
    }
  }
}

TEST(GradientInterval, Examples) {
  const Box g1 = expr::eval_gradient_interval(parse("x1^2"), Box{Interval(1, 2)});
  EXPECT_TRUE(g1[0].contains(Interval(2, 4)));
  const Box g2 = expr::eval_gradient_interval(parse("sin(x1)"), Box{Interval(0, std::numbers::pi)});
  EXPECT_TRUE(g2[0].contains(Interval(-1, 1)));
  const Box g3 = expr::eval_gradient_interval(parse("98*sin(x1)"), Box{Interval(-0.05, 0.05)});
  EXPECT_NEAR(g3[0].lo(), 98 * std::cos(0.05), 1e-9);
  EXPECT_NEAR(g3[0].hi(), 98.0, 1e-9);
}

TEST(GradientInterval, EnclosesSampledGradients) {
  std::mt19937 rng(9);
  const Box frame{Interval(-2, 2), Interval(-2, 2)};
  for (int t = 0; t < 500; ++t) {
    const auto e = parse(random_expr(rng, 3));
    const Box b = testing::random_sub_box(frame, rng);
    const Box enc = expr::eval_gradient_interval(e, b);
    for (int s = 0; s < 50; ++s) {
      const auto p = testing::sample_in(b, rng);
      const auto g = expr::eval_gradient(e, p);
      for (std::size_t j = 0; j < 2; ++j) ASSERT_TRUE(enc[j].contains(g[j])) << e.to_string();
    }
  }
}

}  // namespace
}  // namespace cis
