#include "swstab/polytope_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "swstab/errors.hpp"

namespace swstab {
namespace {

Eigen::VectorXd v2(double x, double y) { return Eigen::Vector2d(x, y); }

BalancedPolytopeNorm cross_polytope() { return BalancedPolytopeNorm(2, {v2(1, 0), v2(0, 1)}); }
BalancedPolytopeNorm square() { return BalancedPolytopeNorm(2, {v2(1, 1), v2(1, -1)}); }

// Symmetric hexagon with one representative per antipodal pair, angles
// spread enough that every point is extreme.
BalancedPolytopeNorm random_hexagon(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::uniform_real_distribution<double> radius(0.85, 1.15);
  std::vector<Eigen::VectorXd> reps;
  for (int j = 0; j < 3; ++j) {
    const double a = std::numbers::pi * (j + 0.5 + jitter(rng)) / 3.0;
    const double r = radius(rng);
    reps.push_back(v2(r * std::cos(a), r * std::sin(a)));
  }
  return BalancedPolytopeNorm(2, reps);
}

// Convex hull (Andrew's monotone chain), counter-clockwise, no collinear points.
std::vector<Eigen::Vector2d> hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
  };
  std::vector<Eigen::Vector2d> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

bool inside(const std::vector<Eigen::Vector2d>& h, const Eigen::Vector2d& x) {
  for (std::size_t j = 0; j < h.size(); ++j) {
    const Eigen::Vector2d a = h[j];
    const Eigen::Vector2d b = h[(j + 1) % h.size()];
    if ((b - a).x() * (x - a).y() - (b - a).y() * (x - a).x() < 0.0) return false;
  }
  return true;
}

// Gauge by bisection on t: smallest t with x / t inside the hull.
double ray_search(const BalancedPolytopeNorm& norm, const Eigen::Vector2d& x) {
  std::vector<Eigen::Vector2d> pts;
  for (const auto& p : norm.vertices()) {
    pts.emplace_back(p[0], p[1]);
    pts.emplace_back(-p[0], -p[1]);
  }
  const auto h = hull(pts);
  double lo = 0.0, hi = 1.0;
  while (!inside(h, x / hi)) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(h, x / mid) ? hi : lo) = mid;
  }
  return hi;
}

bool contains_direction(const std::vector<Eigen::Vector2d>& set, const Eigen::Vector2d& v) {
  return std::any_of(set.begin(), set.end(), [&](const auto& w) { return (w - v).norm() < 1e-12; });
}

TEST(GaugeEvaluate, CrossPolytopeIsOneNorm) {
  EXPECT_NEAR(gauge_evaluate(cross_polytope(), v2(1, 1)), 2.0, 1e-12);
  EXPECT_NEAR(gauge_evaluate(cross_polytope(), v2(-3, 0.5)), 3.5, 1e-12);
}

TEST(GaugeEvaluate, SquareIsInfinityNorm) {
  EXPECT_NEAR(gauge_evaluate(square(), v2(1, 1)), 1.0, 1e-12);
  EXPECT_NEAR(gauge_evaluate(square(), v2(0.2, -0.7)), 0.7, 1e-12);
}

TEST(GaugeEvaluate, ZeroIsExactlyZero) {
  EXPECT_EQ(gauge_evaluate(square(), v2(0, 0)), 0.0);
  EXPECT_EQ(square()(v2(0, 0)), 0.0);
}

TEST(GaugeEvaluate, DimensionMismatchThrows) {
  EXPECT_THROW(gauge_evaluate(square(), Eigen::Vector3d(1, 0, 0)), ValidationError);
}

TEST(GaugeEvaluate, MatchesRaySearchOnRandomHexagons) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const BalancedPolytopeNorm norm = random_hexagon(rng);
    for (int s = 0; s < 10; ++s) {
      const Eigen::Vector2d x(g(rng), g(rng));
      const double oracle = ray_search(norm, x);
      EXPECT_NEAR(gauge_evaluate(norm, x), oracle, 1e-7 * std::max(1.0, oracle));
      EXPECT_NEAR(norm(x), oracle, 1e-7 * std::max(1.0, oracle));
    }
  }
}

TEST(GaugeEvaluate, AbsoluteHomogeneityAndSubadditivity) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  const double lambdas[] = {-2.0, -1.0, 0.5, 3.0, -1e3};
  for (int trial = 0; trial < 20; ++trial) {
    const BalancedPolytopeNorm norm = random_hexagon(rng);
    for (int s = 0; s < 10; ++s) {
      const Eigen::Vector2d x(g(rng), g(rng));
      const Eigen::Vector2d y(g(rng), g(rng));
      const double vx = gauge_evaluate(norm, x);
      for (double l : lambdas) {
        EXPECT_NEAR(gauge_evaluate(norm, l * x), std::abs(l) * vx, 1e-12 * std::abs(l) * vx);
      }
      EXPECT_LE(gauge_evaluate(norm, x + y), vx + gauge_evaluate(norm, y) + 1e-9);
    }
  }
}

TEST(GaugeEvaluate, StoredVerticesHaveUnitValue) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const BalancedPolytopeNorm norm = random_hexagon(rng);
    for (const auto& p : norm.vertices()) {
      EXPECT_NEAR(gauge_evaluate(norm, p), 1.0, 1e-9);
      EXPECT_NEAR(norm(p), 1.0, 1e-9);
    }
  }
}

TEST(GaugeEvaluate, WorksInThreeDimensions) {
  // Octahedron: the 1-norm in R^3.
  BalancedPolytopeNorm oct(3, {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)});
  EXPECT_NEAR(oct(Eigen::Vector3d(1, -2, 0.5)), 3.5, 1e-12);
  // Cube: the infinity norm.
  std::vector<Eigen::VectorXd> cube;
  for (int a : {-1, 1}) {
    for (int b : {-1, 1}) cube.push_back(Eigen::Vector3d(1, a, b));
  }
  BalancedPolytopeNorm c(3, cube);
  EXPECT_NEAR(c(Eigen::Vector3d(0.3, -0.9, 0.1)), 0.9, 1e-12);
}

TEST(GaugeFacets2d, CrossPolytopeDualIsSquare) {
  const auto facets = gauge_facets_2d(cross_polytope());
  ASSERT_EQ(facets.size(), 4u);
  for (const Eigen::Vector2d l : {Eigen::Vector2d(1, 1), Eigen::Vector2d(1, -1), Eigen::Vector2d(-1, -1),
                                  Eigen::Vector2d(-1, 1)}) {
    EXPECT_TRUE(contains_direction(facets, l)) << l.transpose();
  }
}

TEST(GaugeFacets2d, SquareDualIsCrossPolytope) {
  const auto facets = gauge_facets_2d(square());
  ASSERT_EQ(facets.size(), 4u);
  for (const Eigen::Vector2d l : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(-1, 0),
                                  Eigen::Vector2d(0, -1)}) {
    EXPECT_TRUE(contains_direction(facets, l)) << l.transpose();
  }
}

TEST(GaugeFacets2d, PrimalDualAgreementOnRandomHexagons) {
  std::mt19937_64 rng(14);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const BalancedPolytopeNorm norm = random_hexagon(rng);
    const auto facets = gauge_facets_2d(norm);
    for (int s = 0; s < 100; ++s) {
      const Eigen::Vector2d x(g(rng), g(rng));
      double dual = -std::numeric_limits<double>::infinity();
      for (const auto& l : facets) dual = std::max(dual, l.dot(x));
      EXPECT_NEAR(dual, gauge_evaluate(norm, x), 1e-9);
    }
  }
}

TEST(GaugeFacets2d, RejectsWrongDimension) {
  BalancedPolytopeNorm line(1, {Eigen::VectorXd::Constant(1, 2.0)});
  EXPECT_THROW(gauge_facets_2d(line), ValidationError);
}

TEST(BalancedPolytopeNorm, ConstructorValidates) {
  EXPECT_THROW(BalancedPolytopeNorm(2, {v2(1, 0), v2(0, 0)}), ValidationError);
  EXPECT_THROW(BalancedPolytopeNorm(2, {v2(1, 1), v2(-2, -2)}), ValidationError);
  EXPECT_THROW(BalancedPolytopeNorm(2, {Eigen::Vector3d(1, 0, 0), v2(0, 1)}), ValidationError);
  EXPECT_THROW(BalancedPolytopeNorm(2, {}), ValidationError);
}

TEST(BalancedPolytopeNorm, PlanarRepresentativesInUpperHalfPlaneSorted) {
  BalancedPolytopeNorm norm(2, {v2(0, -1), v2(1, 0), v2(-1, -1)});
  const auto& vs = norm.vertices();
  ASSERT_EQ(vs.size(), 3u);
  double prev = -1.0;
  for (const auto& p : vs) {
    const double a = polar_angle(p[0], p[1]);
    EXPECT_GE(a, 0.0);
    EXPECT_LT(a, std::numbers::pi);
    EXPECT_GT(a, prev);
    prev = a;
  }
}

TEST(Polygon2d, IsCounterClockwiseAndAntipodallySymmetric) {
  std::mt19937_64 rng(15);
  const BalancedPolytopeNorm norm = random_hexagon(rng);
  const auto poly = polygon_2d(norm);
  ASSERT_EQ(poly.size(), 6u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(poly[j + 3], -poly[j]);
  for (std::size_t j = 0; j < poly.size(); ++j) {
    const Eigen::Vector2d a = poly[j];
    const Eigen::Vector2d b = poly[(j + 1) % poly.size()];
    EXPECT_GT(a.x() * b.y() - a.y() * b.x(), 0.0);
  }
  EXPECT_TRUE(norm.is_convex_polygon());
}

TEST(PolarAngle, MapsToZeroTwoPi) {
  EXPECT_DOUBLE_EQ(polar_angle(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(polar_angle(0, 1), std::numbers::pi / 2);
  EXPECT_DOUBLE_EQ(polar_angle(-1, 0), std::numbers::pi);
  EXPECT_DOUBLE_EQ(polar_angle(0, -1), 1.5 * std::numbers::pi);
}

TEST(RebuildNorm, PrunesInteriorPoint) {
  const std::vector<Eigen::VectorXd> pts = {v2(1, 0), v2(0, 1), v2(0.5, 0.5)};
  const BalancedPolytopeNorm norm = rebuild_norm(pts);
  ASSERT_EQ(norm.size(), 2u);
  EXPECT_EQ(norm.vertices()[0], v2(1, 0));
  EXPECT_EQ(norm.vertices()[1], v2(0, 1));
}

TEST(RebuildNorm, PrunesAntipodalDuplicates) {
  const std::vector<Eigen::VectorXd> pts = {v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -2)};
  const BalancedPolytopeNorm norm = rebuild_norm(pts);
  ASSERT_EQ(norm.size(), 2u);
  EXPECT_NEAR(norm(v2(0, 2)), 1.0, 1e-15);
}

TEST(RebuildNorm, CircleSamplesApproachEuclideanNorm) {
  const int N = 360;
  std::vector<Eigen::VectorXd> pts;
  for (int j = 0; j < N; ++j) {
    const double a = 2.0 * std::numbers::pi * j / N;
    pts.push_back(v2(std::cos(a), std::sin(a)));
  }
  const BalancedPolytopeNorm norm = rebuild_norm(pts);
  EXPECT_EQ(norm.size(), static_cast<std::size_t>(N / 2));
  // Inscribed regular N-gon: 1 <= V(x) <= 1 / cos(pi / N) ~ 1 + pi^2 / (2 N^2).
  const double bound = std::numbers::pi * std::numbers::pi / (2.0 * N * N);
  std::mt19937_64 rng(16);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int s = 0; s < 2000; ++s) {
    const double a = ang(rng);
    const double v = norm(v2(std::cos(a), std::sin(a)));
    EXPECT_GE(v, 1.0 - 1e-12);
    worst = std::max(worst, v - 1.0);
  }
  EXPECT_LE(worst, bound * (1.0 + 1e-3));
  EXPECT_LE(worst, 1e-3);
}

TEST(RebuildNorm, CollinearPointsAreRejected) {
  const std::vector<Eigen::VectorXd> pts = {v2(1, 1), v2(-2, -2), v2(3, 3)};
  EXPECT_THROW(rebuild_norm(pts), ValidationError);
  EXPECT_THROW(rebuild_norm(std::vector<Eigen::VectorXd>{}), ValidationError);
}

TEST(RebuildNorm, ScalarKeepsFarthestPoint) {
  const std::vector<Eigen::VectorXd> pts = {Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, -2.0)};
  const BalancedPolytopeNorm norm = rebuild_norm(pts);
  ASSERT_EQ(norm.size(), 1u);
  EXPECT_NEAR(norm(Eigen::VectorXd::Constant(1, 1.0)), 0.5, 1e-15);
}

TEST(RebuildNorm, HigherDimensionKeepsEveryPoint) {
  std::vector<Eigen::VectorXd> pts = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1),
                                      Eigen::Vector3d(0.1, 0.1, 0.1)};
  EXPECT_EQ(rebuild_norm(pts).size(), 4u);
  pts = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(1, 1, 0)};
  EXPECT_THROW(rebuild_norm(pts), ValidationError);
}

}  // namespace
}  // namespace swstab
