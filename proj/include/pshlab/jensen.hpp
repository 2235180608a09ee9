#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/parallel.hpp"
#include "pshlab/simplex.hpp"
#include "pshlab/test_cone.hpp"

namespace pshlab {

/// Nonnegative node weights summing to one.
struct DiscreteMeasure {
  std::vector<double> weights;
  std::size_t barycenter = 0;

  // Probability measures only. Sums run over differences from the barycenter
  // value unless that value is a clamped log.
  static double reference(double v) { return v > kFloor / 2 ? v : 0.0; }
  double integrate(const std::vector<double>& g) const {
    const double base = reference(g[barycenter]);
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] != 0.0) s += weights[i] * (g[i] - base);
    return base + s;
  }
  template <class Row>
  double integrate_row(const Row& g) const {
    const double base = reference(g(static_cast<Eigen::Index>(barycenter)));
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] != 0.0) s += weights[i] * (g(static_cast<Eigen::Index>(i)) - base);
    return base + s;
  }
  double mass() const {
    double s = 0;
    for (double w : weights) s += w;
    return s;
  }
  double mass_on(const NodeSubset& set) const {
    double s = 0;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (set[i]) s += weights[i];
    return s;
  }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < weights.size(); ++i)
      if (weights[i] > 0.0) out.push_back(i);
    return out;
  }
};

inline DiscreteMeasure dirac(std::size_t nodes, std::size_t at) {
  DiscreteMeasure m;
  m.weights.assign(nodes, 0.0);
  m.weights[at] = 1.0;
  m.barycenter = at;
  return m;
}

/// The set of measures on `support` with barycenter `barycenter` that dominate
/// every cone member: mu >= 0, sum mu = 1, mu(u) >= u(z).
struct JensenPolytope {
  const GridSet* grid = nullptr;
  const TestCone* cone = nullptr;
  std::size_t barycenter = 0;
  NodeSubset support;
};

inline JensenPolytope build_polytope(const GridSet& g, const TestCone& cone, std::size_t z, NodeSubset support) {
  if (z >= g.size()) throw ConfigError("barycenter index out of range");
  if (support.size() != g.size()) throw ConfigError("support mask length does not match node count");
  if (count(support) == 0) throw ConfigError("support is empty");
  if (cone.values.cols() != static_cast<Eigen::Index>(g.size())) throw ConfigError("cone was evaluated on a different grid");
  return JensenPolytope{&g, &cone, z, std::move(support)};
}

struct LpValue {
  double value = 0;
  DiscreteMeasure measure;
  long iterations = 0;
};

/// LP machinery shared by all polytopes with one cone and one support mask.
///
/// Pluriharmonic members that come with their negation enter as equality
/// rows; every other member is an inequality row with a surplus column. Rows
/// are scaled to unit max-norm over the support. Consecutive solves warm start
/// from the previous optimal basis.
class JensenSystem {
 public:
  static constexpr double kRoundoff = 1e-12;

  JensenSystem(const GridSet& g, const TestCone& cone, const NodeSubset& support, lp::Options opt = {})
      : grid_(&g), cone_(&cone), support_mask_(support) {
    if (support.size() != g.size()) throw ConfigError("support mask length does not match node count");
    support_ = indices_of(support);
    if (support_.empty()) throw ConfigError("support is empty");
    const auto& fns = cone.functions;
    rows_.push_back(-1);  // mass row
    for (std::size_t r = 0; r < fns.size(); ++r) {
      const bool paired = fns[r].pluriharmonic() && fns[r].mirror >= 0;
      if (paired && fns[r].mirror > static_cast<long>(r)) rows_.push_back(static_cast<long>(r));
    }
    equalities_ = rows_.size();
    for (std::size_t r = 0; r < fns.size(); ++r) {
      const bool paired = fns[r].pluriharmonic() && fns[r].mirror >= 0;
      if (!paired) rows_.push_back(static_cast<long>(r));
    }
    const auto m = static_cast<Eigen::Index>(rows_.size());
    const auto s = static_cast<Eigen::Index>(support_.size());
    const auto ineq = static_cast<Eigen::Index>(rows_.size() - equalities_);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, s + ineq);
    scale_.assign(rows_.size(), 1.0);
    for (Eigen::Index i = 0; i < m; ++i) {
      const long r = rows_[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < s; ++j) {
        const double v = r < 0 ? 1.0 : cone.values(r, static_cast<Eigen::Index>(support_[static_cast<std::size_t>(j)]));
        a(i, j) = std::abs(v) <= kRoundoff ? 0.0 : v;  // e.g. log|z| on the unit circle
      }
      const double mx = a.row(i).head(s).cwiseAbs().maxCoeff();
      if (mx > 0) {
        scale_[static_cast<std::size_t>(i)] = 1.0 / mx;
        a.row(i).head(s) *= 1.0 / mx;
      } else if (r >= 0) {
        const double whole = cone.values.row(r).cwiseAbs().maxCoeff();
        if (whole > 0) scale_[static_cast<std::size_t>(i)] = 1.0 / whole;
      }
      if (i >= static_cast<Eigen::Index>(equalities_)) a(i, s + i - static_cast<Eigen::Index>(equalities_)) = -1.0;
    }
    solver_ = lp::DenseSimplex(a, opt);
  }

  const GridSet& grid() const { return *grid_; }
  const TestCone& cone() const { return *cone_; }
  const NodeSubset& support_mask() const { return support_mask_; }
  const std::vector<std::size_t>& support_nodes() const { return support_; }
  void reset() { solver_.reset(); }

  /// min over the polytope at z of sum mu(w) g(w). Throws InfeasibleError.
  LpValue minimize(std::size_t z, const std::vector<double>& g) { return run(z, g, 1.0); }
  LpValue maximize(std::size_t z, const std::vector<double>& g) {
    LpValue v = run(z, g, -1.0);
    return v;
  }

  /// True when the polytope at z is nonempty.
  bool feasible(std::size_t z) {
    const std::vector<double> zero(grid_->size(), 0.0);
    try {
      run(z, zero, 1.0);
      return true;
    } catch (const InfeasibleError&) {
      return false;
    }
  }

 private:
  LpValue run(std::size_t z, const std::vector<double>& g, double sense) {
    if (z >= grid_->size()) throw ConfigError("barycenter index out of range");
    if (g.size() != grid_->size()) throw ConfigError("objective length does not match node count");
    const auto m = static_cast<Eigen::Index>(rows_.size());
    const auto s = static_cast<Eigen::Index>(support_.size());
    Eigen::VectorXd b(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const long r = rows_[static_cast<std::size_t>(i)];
      b(i) = (r < 0 ? 1.0 : cone_->values(r, static_cast<Eigen::Index>(z))) * scale_[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(solver_.cols());
    for (Eigen::Index j = 0; j < s; ++j) c(j) = sense * g[support_[static_cast<std::size_t>(j)]];
    const lp::Result res = solver_.solve(b, c);
    if (res.status != lp::Status::optimal)
      throw InfeasibleError(std::string("Jensen polytope LP ") + lp::status_name(res.status) + " at node " + std::to_string(z), z);
    LpValue out;
    out.iterations = res.iterations;
    out.measure.barycenter = z;
    out.measure.weights.assign(grid_->size(), 0.0);
    for (Eigen::Index j = 0; j < s; ++j) {
      const double w = res.x(j);
      if (w > 1e-12) out.measure.weights[support_[static_cast<std::size_t>(j)]] = w;
    }
    out.value = out.measure.integrate(g);
    return out;
  }

  const GridSet* grid_;
  const TestCone* cone_;
  NodeSubset support_mask_;
  std::vector<std::size_t> support_;
  std::vector<long> rows_;  // -1 = mass row, otherwise cone member index
  std::size_t equalities_ = 0;
  std::vector<double> scale_;
  lp::DenseSimplex solver_;
};

inline LpValue minimize(const JensenPolytope& p, const std::vector<double>& g) {
  JensenSystem sys(*p.grid, *p.cone, p.support);
  return sys.minimize(p.barycenter, g);
}

inline LpValue maximize(const JensenPolytope& p, const std::vector<double>& g) {
  JensenSystem sys(*p.grid, *p.cone, p.support);
  return sys.maximize(p.barycenter, g);
}

/// Solves one LP per listed node with a fixed objective, in blocks of `block`
/// nodes. Each block starts cold and warm starts within itself, so the result
/// is independent of the number of workers.
template <class Solve>
std::vector<LpValue> solve_nodes(const JensenSystem& proto, const std::vector<std::size_t>& nodes, unsigned workers,
                                 Solve&& solve, std::size_t block = 64) {
  std::vector<LpValue> out(nodes.size());
  const unsigned w = std::max(1u, workers);
  std::vector<std::unique_ptr<JensenSystem>> local(w);
  for_blocks(nodes.size(), block, w, [&](std::size_t b, std::size_t e, unsigned k) {
    if (!local[k]) local[k] = std::make_unique<JensenSystem>(proto);
    local[k]->reset();
    for (std::size_t i = b; i < e; ++i) out[i] = solve(*local[k], nodes[i]);
  });
  return out;
}

inline std::vector<double> squared_norms(const GridSet& g) {
  std::vector<double> q(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) q[i] = squared_norm(g.points[i]);
  return q;
}

/// Second moment about z of the measure: sum mu(w) |w - z|^2.
inline double spread(const GridSet& g, const DiscreteMeasure& m, std::size_t z) {
  double s = 0;
  for (std::size_t i = 0; i < m.weights.size(); ++i)
    if (m.weights[i] != 0.0) s += m.weights[i] * squared_distance(g.points[i], g.points[z]);
  return s;
}

struct PeakResult {
  bool peak = false;
  double score = 0;  // max over the polytope of mu(|w - z|^2)
  DiscreteMeasure measure;
};

/// Peak score at z over an existing system. Because every Jensen measure has
/// barycenter z, maximizing mu(|w - z|^2) is the same LP as maximizing mu(|w|^2),
/// whose objective does not depend on z (so warm starts stay dual feasible).
inline PeakResult peak_score(JensenSystem& sys, std::size_t z, const std::vector<double>& sq, double tol_peak) {
  PeakResult r;
  LpValue v = sys.maximize(z, sq);
  r.score = spread(sys.grid(), v.measure, z);
  r.peak = r.score <= tol_peak;
  r.measure = std::move(v.measure);
  return r;
}

inline bool peak_point_test(const GridSet& g, const TestCone& cone, std::size_t z, double tol_peak) {
  JensenSystem sys(g, cone, make_subset(g, true));
  return peak_score(sys, z, squared_norms(g), tol_peak).peak;
}

/// mu(u) >= nu(u) - tol for every cone member. Only a necessary condition for
/// subordination, since the cone is finite.
inline bool subordination_ge(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const TestCone& cone, double tol,
                             long* witness = nullptr) {
  if (mu.weights.size() != nu.weights.size() || mu.weights.size() != static_cast<std::size_t>(cone.values.cols()))
    throw ConfigError("measures and cone live on different grids");
  for (Eigen::Index r = 0; r < cone.values.rows(); ++r) {
    const auto row = cone.values.row(r);
    if (mu.integrate_row(row) < nu.integrate_row(row) - tol) {
      if (witness) *witness = static_cast<long>(r);
      return false;
    }
  }
  return true;
}

/// Measure in the polytope maximizing the |z|^2 moment. No feasible measure can
/// strictly dominate it in the subordination order, since |z|^2 is strictly
/// plurisubharmonic.
inline DiscreteMeasure maximal_measure(const JensenPolytope& p) {
  return maximize(p, squared_norms(*p.grid)).measure;
}

}  // namespace pshlab
