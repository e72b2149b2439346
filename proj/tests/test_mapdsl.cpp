#include <gtest/gtest.h>

#include <cmath>

#include "pjinv/mapdsl.hpp"
#include "pjinv/random.hpp"
#include "pjinv/registry.hpp"

using namespace pjinv;
using namespace pjinv::dsl;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

ErrorKind kind_of(const std::string& src) {
  try {
    parse_mapping(src);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::usage;  // sentinel: no error
}

}  // namespace

TEST(Parse, SpecExamples) {
  const MappingExpr a = parse_mapping("(x - y, x + 3*cbrt(y))");
  EXPECT_EQ(a.arity(), 2);
  EXPECT_EQ(a.variables(), (std::vector<std::string>{"x", "y"}));
  const MappingExpr b = parse_mapping("(abs(x), abs(y))");
  EXPECT_EQ(b.arity(), 2);
}

TEST(Parse, UnclosedParenReportsColumnThree) {
  try {
    parse_mapping("(x");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 3);
    const auto& ex = e.expected();
    EXPECT_NE(std::find(ex.begin(), ex.end(), ")"), ex.end());
    EXPECT_NE(std::find(ex.begin(), ex.end(), "+"), ex.end());
    EXPECT_EQ(e.kind(), ErrorKind::syntax);
  }
}

TEST(Parse, LineAndColumnAcrossNewlines) {
  try {
    parse_mapping("vars a,b;\n(a + , b)");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 6);
  }
}

TEST(Parse, ErrorKinds) {
  EXPECT_EQ(kind_of("(x, q)"), ErrorKind::unknown_identifier);
  EXPECT_EQ(kind_of("(x, foo(y))"), ErrorKind::unknown_identifier);
  EXPECT_EQ(kind_of("vars x,y; (x)"), ErrorKind::arity_mismatch);
  EXPECT_EQ(kind_of("(x, y, z"), ErrorKind::syntax);
  EXPECT_EQ(kind_of("(x ^ 1.5, y)"), ErrorKind::syntax);
  EXPECT_EQ(kind_of("   "), ErrorKind::invalid_input);
}

TEST(Parse, PrecedenceAndAssociativity) {
  const MappingExpr m = parse_mapping("vars a,b; (a - b - 1, 2*a^2/4*b)");
  const Vector r = m.evaluate(v2(3, 5));
  EXPECT_DOUBLE_EQ(r(0), 3.0 - 5.0 - 1.0);
  EXPECT_DOUBLE_EQ(r(1), 2.0 * 9.0 / 4.0 * 5.0);
  const Vector n = parse_mapping("(-x^2, -(-y))").evaluate(v2(3, 2));
  EXPECT_DOUBLE_EQ(n(0), -9.0);
  EXPECT_DOUBLE_EQ(n(1), 2.0);
}

TEST(Parse, DefaultVariableNames) {
  EXPECT_EQ(parse_mapping("(x, y, z)").variables(), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(parse_mapping("(x1, x2, x3, x4, x5)").variables().back(), "x5");
}

TEST(Eval, SpecExamples) {
  const MappingExpr m = parse_mapping("(x - y, x + 3*cbrt(y))");
  EXPECT_EQ(eval_mapping(m, v2(1, 8)), v2(-7, 7));
  EXPECT_EQ(eval_mapping(m, v2(1, 1)), v2(0, 4));
  EXPECT_EQ(eval_mapping(parse_mapping("(abs(x), abs(y))"), v2(-2, 3)), v2(2, 3));
  EXPECT_DOUBLE_EQ(eval_mapping(parse_mapping("(cbrt(x), y)"), v2(-8, 0))(0), -2.0);
}

TEST(Eval, DomainFaultsAreErrors) {
  auto kind = [](const std::string& src, Vector x) {
    try {
      eval_mapping(parse_mapping(src), x);
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find("component"), std::string::npos) << e.what();
      return e.kind();
    }
    return ErrorKind::usage;
  };
  EXPECT_EQ(kind("(x / y, y)", v2(1, 0)), ErrorKind::evaluation);
  EXPECT_EQ(kind("(x, sqrt(y))", v2(1, -1)), ErrorKind::evaluation);
  EXPECT_EQ(kind("(exp(x), y)", v2(1000, 0)), ErrorKind::evaluation);
  try {
    eval_mapping(parse_mapping("(x, y)"), Vector::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(Eval, FunctionsMatchLibm) {
  const MappingExpr m = parse_mapping("vars a; (sin(a) + cos(a) * exp(a) - sign(a) + sqrt(abs(a)))");
  for (double a : {-2.5, -0.1, 0.0, 0.7, 3.0}) {
    const double want = std::sin(a) + std::cos(a) * std::exp(a) - (a > 0 ? 1.0 : a < 0 ? -1.0 : 0.0) +
                        std::sqrt(std::abs(a));
    EXPECT_DOUBLE_EQ(m.evaluate(Vector::Constant(1, a))(0), want);
  }
}

TEST(Print, ParsePrintParseIdempotent) {
  const char* sources[] = {"(x - y, x + 3*cbrt(y))", "(abs(x), abs(y))", "vars p,q; (-(p - q) - -q, p^3/(q*2+1))",
                           "(x - (y - 1), (x/y)/2)", "(1.5e-7*x + 0.1, y^2^2)", "(-x^2, (-x)^2)"};
  for (const char* src : sources) {
    const MappingExpr a = parse_mapping(src);
    const MappingExpr b = parse_mapping(a.print());
    EXPECT_TRUE(a.structurally_equal(b)) << src << " -> " << a.print();
    EXPECT_EQ(a.print(), b.print());
    const Vector x = v2(0.3, -1.7);
    EXPECT_EQ(a.evaluate(x), b.evaluate(x)) << src;
  }
}

TEST(Eval, MatchesExample4NativeBitwise) {
  const Builtin ex = builtin("example4");
  const MappingExpr m = parse_mapping(ex.source);
  Rng rng(2024);
  for (int k = 0; k < 1000; ++k) {
    const Vector x = v2(rng.uniform(-10, 10), rng.uniform(-10, 10));
    const Vector a = eval_mapping(m, x), b = ex.map(x);
    EXPECT_EQ(a(0), b(0));
    EXPECT_EQ(a(1), b(1));
  }
}

TEST(JacobianSample, LinearIsExact) {
  const JacobianSample s = jacobian_sample(parse_mapping("(2*x + y, 3*y)"), v2(0.4, -2.0));
  Matrix want(2, 2);
  want << 2, 1, 0, 3;
  EXPECT_LE((s.jacobian - want).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_TRUE(s.near_singular.empty());
}

TEST(JacobianSample, Example4) {
  const MappingExpr m = parse_mapping("(x - y, x + 3*cbrt(y))");
  Matrix want(2, 2);
  want << 1, -1, 1, 1;
  const JacobianSample s = jacobian_sample(m, v2(0, 1));
  EXPECT_LE((s.jacobian - want).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_TRUE(s.near_singular.empty());
  const JacobianSample t = jacobian_sample(m, v2(0, 1e-9));
  ASSERT_FALSE(t.near_singular.empty());
  EXPECT_EQ(t.near_singular.front(), std::make_pair(1, 1));
}

TEST(JacobianSample, FirstOrderConvergence) {
  const MappingExpr m = parse_mapping("(x^2 + sin(y), exp(x)*y)");
  const Vector x = v2(0.7, 0.3);
  Matrix exact(2, 2);
  exact << 2 * 0.7, std::cos(0.3), std::exp(0.7) * 0.3, std::exp(0.7);
  std::vector<double> lh, le;
  for (double h : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
    lh.push_back(std::log10(h));
    le.push_back(std::log10((jacobian_sample(m, x, h).jacobian - exact).cwiseAbs().maxCoeff()));
  }
  // least-squares slope
  const double n = static_cast<double>(lh.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lh.size(); ++i) {
    sx += lh[i];
    sy += le[i];
    sxx += lh[i] * lh[i];
    sxy += lh[i] * le[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  EXPECT_GE(slope, 0.9);
}
