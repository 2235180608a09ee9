#include <gtest/gtest.h>

#include <limits>

#include "pshlab/random.hpp"
#include "pshlab/simplex.hpp"

using namespace pshlab;
using namespace pshlab::lp;

namespace {

// Oracle: the optimum of a bounded LP is attained at a basic feasible
// solution, so enumerate every column subset of size rank(A).
double vertex_minimum(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  Eigen::FullPivLU<Eigen::MatrixXd> full(a);
  const Eigen::Index rank = full.rank();
  const Eigen::Index n = a.cols();
  // Independent rows chosen greedily.
  std::vector<Eigen::Index> rows;
  Eigen::MatrixXd acc(0, n);
  for (Eigen::Index i = 0; i < a.rows() && static_cast<Eigen::Index>(rows.size()) < rank; ++i) {
    Eigen::MatrixXd t(acc.rows() + 1, n);
    t << acc, a.row(i);
    if (Eigen::FullPivLU<Eigen::MatrixXd>(t).rank() == t.rows()) {
      acc = t;
      rows.push_back(i);
    }
  }
  Eigen::VectorXd bk(rank);
  for (Eigen::Index i = 0; i < rank; ++i) bk(i) = b(rows[static_cast<std::size_t>(i)]);
  double best = std::numeric_limits<double>::infinity();
  for (long mask = 0; mask < (1L << n); ++mask) {
    if (__builtin_popcountl(static_cast<unsigned long>(mask)) != rank) continue;
    Eigen::MatrixXd basis(rank, rank);
    std::vector<Eigen::Index> cols;
    for (Eigen::Index j = 0; j < n; ++j)
      if (mask >> j & 1) cols.push_back(j);
    for (Eigen::Index k = 0; k < rank; ++k) basis.col(k) = acc.col(cols[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(basis);
    if (lu.rank() < rank) continue;
    const Eigen::VectorXd xb = lu.solve(bk);
    if (xb.minCoeff() < -1e-12) continue;
    double v = 0;
    for (Eigen::Index k = 0; k < rank; ++k) v += c(cols[static_cast<std::size_t>(k)]) * xb(k);
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

TEST(DenseSimplex, MatchesVertexEnumerationOnRandomBoundedPrograms) {
  Rng rng(1);
  for (int t = 0; t < 600; ++t) {
    const int m = 1 + rng.integer(0, 2), n = m + 1 + rng.integer(0, 3);
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
    if (t % 3 == 0) a.row(m - 1) = 2.0 * a.row(0);
    Eigen::VectorXd x0(n), c(n);
    for (int j = 0; j < n; ++j) {
      x0(j) = rng.uniform();
      c(j) = rng.uniform() + 0.1;
    }
    const Eigen::VectorXd b = a * x0;
    DenseSimplex s(a);
    const Result r = s.solve(b, c);
    ASSERT_EQ(r.status, Status::optimal) << t;
    EXPECT_NEAR(r.objective, vertex_minimum(a, b, c), 1e-8) << t;
    EXPECT_GE(r.x.minCoeff(), -1e-9);
    EXPECT_LT((a * r.x - b).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(DenseSimplex, WarmStartAgreesWithColdStart) {
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const int m = 3, n = 7;
    Eigen::MatrixXd a(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1, 1);
    a.row(0).setOnes();
    Eigen::VectorXd c(n), x1(n), x2(n);
    for (int j = 0; j < n; ++j) {
      c(j) = rng.uniform(-1, 1);
      x1(j) = rng.uniform();
      x2(j) = rng.uniform();
    }
    DenseSimplex warm(a);
    ASSERT_EQ(warm.solve(a * x1, c).status, Status::optimal);
    const Result w = warm.solve(a * x2, c);
    DenseSimplex cold(a);
    const Result k = cold.solve(a * x2, c);
    ASSERT_EQ(w.status, Status::optimal);
    ASSERT_EQ(k.status, Status::optimal);
    EXPECT_NEAR(w.objective, k.objective, 1e-9);
  }
}

TEST(DenseSimplex, ReportsInfeasibleAndUnbounded) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1, 1, 1;
  Eigen::VectorXd b(2), c(2);
  b << 1, 2;  // inconsistent dependent rows
  c << 1, 1;
  EXPECT_EQ(DenseSimplex(a).solve(b, c).status, Status::infeasible);

  Eigen::MatrixXd a1(1, 2);
  a1 << 1, -1;
  Eigen::VectorXd b1(1), c1(2);
  b1 << 1;
  c1 << -1, 0;
  EXPECT_EQ(DenseSimplex(a1).solve(b1, c1).status, Status::unbounded);

  Eigen::VectorXd bneg(1);
  bneg << -1;
  Eigen::MatrixXd a2(1, 2);
  a2 << 1, 1;
  EXPECT_EQ(DenseSimplex(a2).solve(bneg, c).status, Status::infeasible);
}

TEST(DenseSimplex, IsDeterministic) {
  Rng rng(4);
  Eigen::MatrixXd a(4, 12);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 12; ++j) a(i, j) = std::round(rng.uniform(-3, 3));
  Eigen::VectorXd x(12), c(12);
  for (int j = 0; j < 12; ++j) {
    x(j) = 1.0;
    c(j) = std::round(rng.uniform(0, 3));
  }
  const Result r1 = DenseSimplex(a).solve(a * x, c);
  const Result r2 = DenseSimplex(a).solve(a * x, c);
  ASSERT_EQ(r1.status, Status::optimal);
  EXPECT_TRUE(r1.x == r2.x);
  EXPECT_EQ(r1.iterations, r2.iterations);
}
