#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixture_cache.hpp"
#include "pshlab/disc.hpp"

using namespace pshlab;
using pshtest::node_at;
using pshtest::setup;

namespace {

AnalyticDisc coordinate_disc(std::vector<cplx> first, int n) {
  AnalyticDisc f;
  f.coefficients.push_back(std::move(first));
  if (n == 2) f.coefficients.push_back({0.0});
  return f;
}

}  // namespace

TEST(AnalyticDisc, EvaluatesAndReportsDegree) {
  AnalyticDisc f;
  f.coefficients = {{1.0, 0.0, cplx(0, 2)}, {0.5}};
  EXPECT_EQ(f.degree(), 2);
  const ComplexPoint p = f(cplx(0, 1));
  EXPECT_NEAR(std::abs(p[0] - cplx(1.0, -2.0)), 0.0, 1e-15);
  EXPECT_EQ(p[1], cplx(0.5));
}

TEST(Mobius, SeriesMatchesTheClosedFormWithinItsBound) {
  for (cplx a : {cplx(0.5, 0), cplx(-0.3, 0.4), cplx(0.0, 0.0)}) {
    const MobiusSeries m = mobius_series(a, 12);
    for (int k = 0; k < 64; ++k) {
      const cplx zeta = std::polar(1.0, 2.0 * std::numbers::pi * k / 64);
      const cplx exact = (zeta + a) / (1.0 + std::conj(a) * zeta);
      EXPECT_LE(std::abs(AnalyticDisc::horner(m.coefficients, zeta) - exact), m.sup_error + 1e-12);
    }
  }
  EXPECT_THROW(mobius_series(cplx(1.0, 0.0)), ConfigError);
}

TEST(Pushforward, ConstantDiscIsADirac) {
  const auto& s = setup("two_disks");
  const std::size_t z = node_at(s.grid, cplx(0.25, 0.25));
  const auto mu = pushforward(constant_disc(s.grid.points[z], 2), s.grid, 256);
  EXPECT_DOUBLE_EQ(mu.weights[z], 1.0);
  EXPECT_EQ(mu.barycenter, z);
}

TEST(Pushforward, CoordinateCircleGivesUniformWeights) {
  const auto& s = setup("two_disks");
  const auto mu = pushforward(coordinate_disc({0.0, 1.0}, 2), s.grid, 4096);
  std::size_t support = 0;
  for (std::size_t i = 0; i < s.grid.size(); ++i)
    if (mu.weights[i] > 0) {
      ++support;
      EXPECT_NEAR(std::abs(s.grid.points[i][0]), 1.0, 1e-12);
      EXPECT_EQ(s.grid.points[i][1], cplx(0.0));
      EXPECT_NEAR(mu.weights[i], 1.0 / 24.0, 1.0 / 4096.0 + 1e-12);
    }
  EXPECT_EQ(support, 24u);
  const ComplexPoint b = barycenter_point(s.grid, mu);
  EXPECT_LT(std::sqrt(squared_norm(b)), 24.0 / 4096.0);
}

TEST(Pushforward, MobiusDiscCarriesPoissonKernelWeights) {
  const auto& s = setup("two_disks");
  const MobiusSeries m = mobius_series(0.5, 12);
  const auto mu = pushforward(coordinate_disc(m.coefficients, 2), s.grid, 4096);
  // Oracle: the exact Mobius boundary map sends arclength to the harmonic
  // measure of 1/2; integrate it over the arc nearest to each circle node.
  const int fine = 1 << 16;
  std::vector<double> expect(s.grid.size(), 0.0);
  for (int k = 0; k < fine; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + 0.5) / fine;
    const cplx w = std::polar(1.0, t);
    const double density = (1.0 - 0.25) / std::norm(w - 0.5);
    expect[s.grid.closest(ComplexPoint{{w, 0.0}})] += density / fine;
  }
  double worst = 0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) worst = std::max(worst, std::abs(mu.weights[i] - expect[i]));
  EXPECT_LT(worst, 0.01);
  const ComplexPoint b = barycenter_point(s.grid, mu);
  EXPECT_NEAR(b[0].real(), 0.5, 0.02);
  EXPECT_NEAR(b[0].imag(), 0.0, 0.02);
}

TEST(Pushforward, ValidatesSampleCountsAndRange) {
  const auto& s = setup("disk1d");
  EXPECT_THROW(pushforward(coordinate_disc({0.0, 1.0}, 1), s.grid, 300), ConfigError);
  EXPECT_THROW(pushforward(coordinate_disc({0.0, 1.0}, 1), s.grid, 128), ConfigError);
  EXPECT_THROW(pushforward(coordinate_disc({0.0, 2.0}, 1), s.grid, 256), DiscretizationError);
  EXPECT_THROW(pushforward(coordinate_disc({0.0, 1.0}, 2), s.grid, 256), ConfigError);
  EXPECT_FALSE(disc_within(coordinate_disc({0.0, 2.0}, 1), s.grid));
  EXPECT_TRUE(disc_within(coordinate_disc({0.0, 1.0}, 1), s.grid));
}

TEST(JensenCheck, SubMeanHoldsForRandomDiscsAndConstantsAreEqualities) {
  const auto& s = setup("disk_x_segment");
  const auto c = jensen_check(constant_disc(s.grid.points[3], 2), s.grid, s.cone, 256, 0.0);
  for (std::size_t r = 0; r < c.lhs.size(); ++r) EXPECT_NEAR(c.lhs[r], c.rhs[r], 1e-12);
  Rng rng(17);
  int checked = 0;
  for (int t = 0; t < 30; ++t) {
    AnalyticDisc f = random_disc(1, 3, rng);
    f.coefficients.push_back({cplx(rng.uniform(-1, 1), 0.0)});
    if (!disc_within(f, s.grid)) continue;
    ++checked;
    const auto j = jensen_check(f, s.grid, s.cone, 4096, 5.0 / 64.0);
    EXPECT_TRUE(j.ok) << "disc " << t << " member " << j.worst_member;
  }
  EXPECT_GT(checked, 10);
}

TEST(JensenCheck, CircleDiscIntegratesSquaredModulusToOne) {
  const auto& s = setup("disk1d");
  const auto mu = pushforward(coordinate_disc({0.0, 1.0}, 1), s.grid, 1024);
  std::vector<double> sq(s.grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(s.grid.points[i][0]);
  EXPECT_NEAR(mu.integrate(sq), 1.0, 1e-12);
  EXPECT_TRUE(jensen_check(coordinate_disc({0.0, 1.0}, 1), s.grid, s.cone, 1024, 0.0).ok);
}

TEST(Littlewood, IdentityHalfAndSquareMaps) {
  const AnalyticDisc f = coordinate_disc({0.0, 1.0}, 1);
  TestFunction sq;  // |z|^2
  const auto id = littlewood_check(f, coordinate_disc({0.0, 1.0}, 1), sq, 4096);
  EXPECT_DOUBLE_EQ(id.outer, id.composed);
  const auto half = littlewood_check(f, coordinate_disc({0.0, 0.5}, 1), sq, 4096);
  EXPECT_NEAR(half.outer, 1.0, 1e-12);
  EXPECT_NEAR(half.composed, 0.25, 1e-12);
  EXPECT_TRUE(half.verdict);
  Rng rng(2);
  const AnalyticDisc g2 = coordinate_disc({0.0, 0.0, 1.0}, 1);
  for (int t = 0; t < 10; ++t) {
    const AnalyticDisc h = random_disc(2, 3, rng);
    TestFunction u;
    u.kind = TestFunction::Kind::log_abs_poly;
    u.shift = 1e-3;
    u.poly.terms = {{Exponent{1, 1}, cplx(1, 0)}, {Exponent{0, 0}, cplx(0.1, 0)}};
    const auto r = littlewood_check(h, g2, u, 4096);
    EXPECT_NEAR(r.outer, r.composed, 1e-7);
  }
}

TEST(Littlewood, RandomTriplesSatisfySubordination) {
  const auto& s = setup("bidisk");
  Rng rng(123);
  for (int t = 0; t < 100; ++t) {
    const AnalyticDisc f = random_disc(2, 3, rng);
    const AnalyticDisc g = random_self_map(3, rng);
    const auto& u = s.cone.functions[static_cast<std::size_t>(rng.integer(0, static_cast<int>(s.cone.size()) - 1))];
    EXPECT_TRUE(littlewood_check(f, g, u, 4096).verdict) << t;
  }
}

TEST(Littlewood, GridFunctionVariantSnapsToNodes) {
  const auto& s = setup("disk1d");
  std::vector<double> sq(s.grid.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(s.grid.points[i][0]);
  const auto r = littlewood_check(coordinate_disc({0.0, 1.0}, 1), coordinate_disc({0.0, 0.0, 1.0}, 1), s.grid, sq, 1024);
  EXPECT_NEAR(r.outer, 1.0, 1e-12);
  EXPECT_NEAR(r.composed, 1.0, 1e-12);
}

TEST(Littlewood, RejectsInvalidInnerMaps) {
  const AnalyticDisc f = coordinate_disc({0.0, 1.0}, 1);
  TestFunction sq;
  EXPECT_THROW(littlewood_check(f, coordinate_disc({0.1, 0.5}, 1), sq, 256), ConfigError);
  EXPECT_THROW(littlewood_check(f, coordinate_disc({0.0, 0.7, 0.7}, 1), sq, 256), ConfigError);
}

TEST(RandomMaps, StayInsideTheirTargets) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const AnalyticDisc f = random_disc(2, 4, rng);
    const AnalyticDisc g = random_self_map(4, rng);
    EXPECT_EQ(g.center()[0], cplx(0.0));
    for (const cplx& e : circle_samples(256)) {
      EXPECT_LE(std::abs(f(e)[0]), 1.0 + 1e-12);
      EXPECT_LE(std::abs(f(e)[1]), 1.0 + 1e-12);
      EXPECT_LE(std::abs(g(e)[0]), 1.0 + 1e-12);
    }
  }
}

TEST(Cluster, IdenticalCirclesGiveTheCircleNodes) {
  const auto& s = setup("two_disks");
  const AnalyticDisc f = coordinate_disc({0.0, 1.0}, 2);
  const auto c = cluster_estimate({f, f, f}, s.grid, s.grid.spacing, 4096);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    const bool circle = std::abs(std::abs(s.grid.points[i][0]) - 1) < 1e-12;
    EXPECT_EQ(bool(c.nodes[i]), circle) << i;
  }
  EXPECT_TRUE(c.heuristic);
}

TEST(Cluster, DisjointFamiliesHaveEmptyFloor) {
  const auto& s = setup("two_disks");
  AnalyticDisc a = coordinate_disc({0.0, 1.0}, 2);
  AnalyticDisc b;
  b.coefficients = {{0.0}, {0.0, 1.0}};
  EXPECT_EQ(count(cluster_estimate({a, b}, s.grid, s.grid.spacing, 1024).nodes), 0u);
  const auto& x = setup("disk_x_segment");
  std::vector<AnalyticDisc> slices;
  for (int j = 1; j <= 5; ++j) {
    AnalyticDisc d;
    d.coefficients = {{0.0, 1.0}, {1.0 / j}};
    slices.push_back(d);
  }
  EXPECT_EQ(count(cluster_estimate(slices, x.grid, x.grid.spacing / 4, 1024).nodes), 0u);
  EXPECT_THROW(cluster_estimate({a}, s.grid, 0.1, 1024), ConfigError);
}
