#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pjinv/dini.hpp"
#include "pjinv/registry.hpp"

using namespace pjinv;

namespace {

Vector v2(double a, double b) { return Vector{{a, b}}; }

MappingSpec scalar(std::function<double(double)> g) {
  MappingSpec m;
  m.dim = 1;
  m.label = "scalar";
  m.evaluate = [g](const Vector& x) { return Vector::Constant(1, g(x(0))); };
  return m;
}

}  // namespace

TEST(Dini, Identity) {
  const Builtin id = builtin("identity");
  const DiniEstimate e = dini_lower(id.map, v2(0.3, -2));
  EXPECT_NEAR(e.lower, 1.0, 1e-7);  // rounding at r = 1e-7
  EXPECT_NEAR(e.upper, 1.0, 1e-7);
  EXPECT_EQ(e.directions_used, 128);
  EXPECT_EQ(e.radii_used.size(), 2u);
}

TEST(Dini, LinearSingularValues) {
  Rng rng(41);
  for (int k = 0; k < 20; ++k) {
    const Matrix a = Matrix::NullaryExpr(2, 2, [&] { return rng.normal(); });
    const MappingSpec f{[a](const Vector& x) -> Vector { return a * x; }, 2, {}, "lin"};
    const DiniEstimate e = dini_lower(f, v2(rng.normal(), rng.normal()));
    EXPECT_NEAR(e.lower, oracle::conorm_eig(a), 1e-4) << k;
    EXPECT_NEAR(dini_upper(f, v2(0, 0)).upper, oracle::spectral_norm_eig(a), 1e-4) << k;
    EXPECT_LE(e.lower, e.upper);
  }
  const Matrix b3 = Matrix::NullaryExpr(3, 3, [&] { return rng.normal(); });
  const MappingSpec f3{[b3](const Vector& x) -> Vector { return b3 * x; }, 3, {}, "lin3"};
  const DiniEstimate e3 = dini_lower(f3, Vector::Zero(3));
  EXPECT_NEAR(e3.lower, oracle::conorm_eig(b3), 1e-4);
  EXPECT_NEAR(e3.upper, oracle::spectral_norm_eig(b3), 1e-4);
}

TEST(Dini, ScalarExamples) {
  EXPECT_NEAR(dini_lower(scalar([](double t) { return std::abs(t); }), Vector::Zero(1)).lower, 1.0, 1e-12);
  EXPECT_LE(dini_upper(scalar([](double t) { return t * t; }), Vector::Zero(1)).upper, 1e-5);
}

TEST(Dini, BadConfig) {
  const Builtin id = builtin("identity");
  DiniConfig c;
  c.directions = 10;
  EXPECT_THROW(dini_lower(id.map, v2(0, 0), c), Error);
  c = {};
  c.radii = {1e-3, 1e-2};
  EXPECT_THROW(dini_lower(id.map, v2(0, 0), c), Error);
}

TEST(PathLength, SpecExamples) {
  const Builtin id = builtin("identity");
  EXPECT_NEAR(path_length(straight_path(id.map, v2(1, 2), v2(4, 6), 17)), 5.0, 1e-12);
  PathSample two;
  two.parameter_grid = {0, 1, 2};
  two.points = two.image_points = {v2(0, 0), v2(1, 0), v2(1, 1)};
  EXPECT_DOUBLE_EQ(path_length(two), 2.0);
  const PathSample arc = sample_path(
      id.map, [](double t) { return v2(std::cos(t), std::sin(t)); }, 0.0, std::numbers::pi / 2, 1024);
  EXPECT_NEAR(path_length(arc), std::numbers::pi / 2, 1e-4);
}

TEST(PathLength, RefinementAndConcatenation) {
  const Builtin rot = builtin("rotation");
  auto q = [](double t) { return v2(std::cos(3 * t) * (1 + t), t * t - 1); };
  double prev = 0.0;
  for (int n : {3, 5, 9, 17, 33, 65}) {  // nested grids
    const double len = path_length(sample_path(rot.map, q, 0.0, 2.0, n));
    EXPECT_GE(len, prev - 1e-12);
    prev = len;
  }
  const PathSample a = sample_path(rot.map, q, 0.0, 1.0, 33), b = sample_path(rot.map, q, 1.0, 2.0, 33);
  PathSample ab = a;
  ab.parameter_grid.insert(ab.parameter_grid.end(), b.parameter_grid.begin() + 1, b.parameter_grid.end());
  ab.points.insert(ab.points.end(), b.points.begin() + 1, b.points.end());
  ab.image_points.insert(ab.image_points.end(), b.image_points.begin() + 1, b.image_points.end());
  EXPECT_NEAR(path_length(ab), path_length(a) + path_length(b), 1e-12);
}

TEST(PathLength, RefinedAcrossFold) {
  const Builtin b = builtin("absabs");
  const PathSample p = straight_path(b.map, v2(0.561, -0.243), v2(-2.859, -0.106), 17);
  const double exact = (p.points.back() - p.points.front()).norm();
  EXPECT_LT(path_length(p), exact - 1e-4);
  EXPECT_NEAR(curve_length(b.map, p), exact, 1e-8 * exact);
  PathSample bare = p;
  bare.curve = nullptr;
  EXPECT_DOUBLE_EQ(curve_length(b.map, bare), path_length(p));
}

TEST(Mvi, SpecExamples) {
  const Builtin id = builtin("identity");
  const PathSample q = sample_path(id.map, [](double t) { return v2(t, std::sin(5 * t)); }, 0.0, 1.0, 33);
  const MviReport r = mvi_audit(id.map, q);
  EXPECT_TRUE(r.passes);
  EXPECT_GE(r.lhs, (q.points.back() - q.points.front()).norm());

  const Builtin d = builtin("linear:[[2,0],[0,3]]");
  const MviReport s = mvi_audit(d.map, straight_path(d.map, v2(-1, 0), v2(2, 1), 33));
  EXPECT_TRUE(s.passes);
  EXPECT_NEAR(s.min_dini, 2.0, 1e-4);

  const Builtin ex = builtin("example4");
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Vector a = v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), b = v2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    EXPECT_TRUE(mvi_audit(ex.map, straight_path(ex.map, a, b, 33)).passes) << k;
  }
  PathSample loop = straight_path(id.map, v2(0, 0), v2(1, 0), 5);
  loop.points.back() = loop.points.front();
  EXPECT_THROW(mvi_audit(id.map, loop), Error);
}
