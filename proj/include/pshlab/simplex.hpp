#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace pshlab::lp {

enum class Status { optimal, infeasible, unbounded, iteration_limit, numerical };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::iteration_limit: return "iteration_limit";
    case Status::numerical: return "numerical";
  }
  return "?";
}

struct Options {
  double feas_tol = 1e-9;
  double opt_tol = 1e-9;
  double pivot_tol = 1e-7;
  double rank_tol = 1e-10;
  int refactor_every = 64;
  long max_iterations = 200000;
  int stall_limit = 40;  // consecutive degenerate pivots before Bland's rule
};

struct Result {
  Status status = Status::infeasible;
  double objective = 0;
  Eigen::VectorXd x;
  long iterations = 0;
  bool warm = false;  // started from a previous basis
};

/// Dense revised simplex for   min c^T x  s.t.  A x = b,  x >= 0.
///
/// A is fixed at construction; b and c change between solves. Linearly
/// dependent rows are removed once up front (their right-hand sides are
/// checked for consistency on every solve). The explicit basis inverse is
/// updated by elementary row operations and refactorized periodically.
///
/// Successive solves reuse the last optimal basis: a changed b with unchanged c
/// keeps the basis dual feasible and is finished by dual simplex; a changed c
/// with a still primal feasible basis continues with primal simplex. Otherwise
/// the solve starts from scratch with a two-phase method.
///
/// Pivoting is deterministic: Dantzig pricing with lowest-index ties, falling
/// back to Bland's rule after a run of degenerate pivots; ratio-test ties go to
/// the larger pivot magnitude and then the lower variable index.
class DenseSimplex {
 public:
  DenseSimplex() = default;

  explicit DenseSimplex(const Eigen::MatrixXd& a, Options opt = {}) : opt_(opt) {
    n_ = a.cols();
    reduce_rows(a);
  }

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  const std::vector<Eigen::Index>& kept_rows() const { return kept_; }

  /// Forgets the stored basis so the next solve starts cold.
  void reset() { have_basis_ = false; }

  /// Basis of the last optimal solve (empty when none).
  std::vector<Eigen::Index> basis() const { return have_basis_ ? basis_ : std::vector<Eigen::Index>{}; }
  void set_basis(const std::vector<Eigen::Index>& b) {
    if (static_cast<Eigen::Index>(b.size()) == m_ && !b.empty()) {
      basis_ = b;
      have_basis_ = true;
    } else {
      have_basis_ = false;
    }
  }

  Result solve(const Eigen::VectorXd& b_full, const Eigen::VectorXd& c) {
    Result res;
    res.x = Eigen::VectorXd::Zero(n_);
    // Consistency of dropped rows.
    for (std::size_t k = 0; k < dropped_.size(); ++k) {
      double pred = 0;
      for (Eigen::Index i = 0; i < m_; ++i) pred += dep_(static_cast<Eigen::Index>(k), i) * b_full(kept_[static_cast<std::size_t>(i)]);
      const double bd = b_full(dropped_[k]);
      if (std::abs(bd - pred) > 1e-7 * (1.0 + std::abs(bd))) {
        res.status = Status::infeasible;
        have_basis_ = false;
        return res;
      }
    }
    b_.resize(m_);
    for (Eigen::Index i = 0; i < m_; ++i) b_(i) = b_full(kept_[static_cast<std::size_t>(i)]);
    c_ = c;
    iters_ = 0;

    bool solved = false;
    if (have_basis_ && m_ > 0) {
      res.warm = true;
      refactor();
      compute_duals();
      const bool pfeas = xb_.size() == 0 || xb_.minCoeff() >= -opt_.feas_tol;
      const bool dfeas = min_reduced_cost() >= -opt_.opt_tol;
      Status st = Status::iteration_limit;
      if (pfeas) {
        st = primal(false);
      } else if (dfeas) {
        st = dual();
        if (st == Status::optimal) st = primal(false);
      }
      // A warm start only settles optimality; infeasibility is confirmed cold.
      if (st == Status::optimal) {
        solved = true;
        res.status = st;
      }
    }
    if (solved && !accurate()) solved = false;
    if (!solved) {
      res.warm = false;
      res.status = cold();
      if (res.status == Status::optimal && !accurate()) res.status = Status::numerical;
    }
    res.iterations = iters_;
    if (res.status != Status::optimal) {
      have_basis_ = false;
      return res;
    }
    have_basis_ = true;
    for (Eigen::Index i = 0; i < m_; ++i) {
      const Eigen::Index j = basis_[static_cast<std::size_t>(i)];
      if (j < n_) res.x(j) = std::max(xb_(i), 0.0);
    }
    res.objective = c_.dot(res.x);
    return res;
  }

 private:
  // Keeps a maximal independent set of rows (after dropping all-zero rows)
  // and records how each dropped row depends on the kept ones.
  void reduce_rows(const Eigen::MatrixXd& a) {
    std::vector<Eigen::Index> nonzero;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (a.row(i).cwiseAbs().maxCoeff() > 1e-14) nonzero.push_back(i);
    std::vector<Eigen::Index> keep;
    if (!nonzero.empty()) {
      Eigen::MatrixXd at(a.cols(), static_cast<Eigen::Index>(nonzero.size()));
      for (std::size_t k = 0; k < nonzero.size(); ++k) at.col(static_cast<Eigen::Index>(k)) = a.row(nonzero[k]).transpose();
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(at);
      qr.setThreshold(opt_.rank_tol);
      const Eigen::Index r = qr.rank();
      for (Eigen::Index k = 0; k < r; ++k) keep.push_back(nonzero[static_cast<std::size_t>(qr.colsPermutation().indices()(k))]);
      std::sort(keep.begin(), keep.end());
    }
    kept_ = keep;
    m_ = static_cast<Eigen::Index>(kept_.size());
    a_.resize(m_, n_);
    for (Eigen::Index i = 0; i < m_; ++i) a_.row(i) = a.row(kept_[static_cast<std::size_t>(i)]);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!std::binary_search(kept_.begin(), kept_.end(), i)) dropped_.push_back(i);
    dep_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dropped_.size()), m_);
    if (!dropped_.empty() && m_ > 0) {
      Eigen::MatrixXd rhs(n_, static_cast<Eigen::Index>(dropped_.size()));
      for (std::size_t k = 0; k < dropped_.size(); ++k) rhs.col(static_cast<Eigen::Index>(k)) = a.row(dropped_[k]).transpose();
      const Eigen::MatrixXd y = a_.transpose().colPivHouseholderQr().solve(rhs);
      dep_ = y.transpose();
    }
    col_nnz_row_.assign(static_cast<std::size_t>(n_), -1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      Eigen::Index nz = 0, at_row = -1;
      for (Eigen::Index i = 0; i < m_; ++i)
        if (a_(i, j) != 0.0) {
          ++nz;
          at_row = i;
        }
      if (nz == 1) col_nnz_row_[static_cast<std::size_t>(j)] = at_row;
    }
  }

  bool is_artificial(Eigen::Index j) const { return j >= n_; }

  // Column j of [A | artificials].
  Eigen::VectorXd column(Eigen::Index j) const {
    if (j < n_) return a_.col(j);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
    e(j - n_) = art_sign_[static_cast<std::size_t>(j - n_)];
    return e;
  }

  double cost(Eigen::Index j) const {
    if (phase1_) return is_artificial(j) ? 1.0 : 0.0;
    return is_artificial(j) ? 0.0 : c_(j);
  }

  void refactor() {
    Eigen::MatrixXd bm(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) bm.col(i) = column(basis_[static_cast<std::size_t>(i)]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bm);
    binv_ = lu.inverse();
    xb_ = binv_ * b_;
    since_refactor_ = 0;
    rebuild_flags();
  }

  void rebuild_flags() {
    in_basis_.assign(static_cast<std::size_t>(n_ + m_), 0);
    for (Eigen::Index j : basis_) in_basis_[static_cast<std::size_t>(j)] = 1;
  }

  void compute_duals() {
    Eigen::VectorXd cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb(i) = cost(basis_[static_cast<std::size_t>(i)]);
    y_ = binv_.transpose() * cb;
    d_.resize(n_ + m_);
    d_.head(n_) = (phase1_ ? Eigen::VectorXd::Zero(n_) : c_) - a_.transpose() * y_;
    for (Eigen::Index i = 0; i < m_; ++i)
      d_(n_ + i) = art_sign_.empty() ? 0.0 : cost(n_ + i) - art_sign_[static_cast<std::size_t>(i)] * y_(i);
  }

  // Refactorizes and checks that the basic solution is feasible within
  // tolerance.
  bool accurate() {
    refactor();
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (is_artificial(basis_[static_cast<std::size_t>(i)]) && std::abs(xb_(i)) > opt_.feas_tol * 10) return false;
      if (xb_(i) < -opt_.feas_tol * 10) return false;
    }
    return true;
  }

  double artificial_level() const {
    double s = 0;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (is_artificial(basis_[static_cast<std::size_t>(i)])) s += std::max(xb_(i), 0.0);
    return s;
  }

  bool enterable(Eigen::Index j) const {
    if (in_basis_[static_cast<std::size_t>(j)]) return false;
    if (is_artificial(j)) return false;  // artificials never re-enter
    return true;
  }

  double min_reduced_cost() const {
    double mn = 0;
    for (Eigen::Index j = 0; j < n_; ++j)
      if (enterable(j)) mn = std::min(mn, d_(j));
    return mn;
  }

  void pivot(Eigen::Index r, Eigen::Index q, const Eigen::VectorXd& alpha) {
    const double piv = alpha(r);
    binv_.row(r) /= piv;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (i != r && alpha(i) != 0.0) binv_.row(i) -= alpha(i) * binv_.row(r);
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    basis_[static_cast<std::size_t>(r)] = q;
    in_basis_[static_cast<std::size_t>(q)] = 1;
    ++iters_;
    if (++since_refactor_ >= opt_.refactor_every) {
      refactor();
    }
  }

  // Primal simplex from a primal feasible basis.
  Status primal(bool phase1) {
    phase1_ = phase1;
    int degenerate_run = 0;
    for (;;) {
      if (iters_ > opt_.max_iterations) return Status::iteration_limit;
      if (phase1 && artificial_level() <= opt_.feas_tol) return Status::optimal;
      compute_duals();
      const bool bland = degenerate_run >= opt_.stall_limit;
      Eigen::Index q = -1;
      double best = -opt_.opt_tol;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!enterable(j)) continue;
        if (d_(j) < best) {
          q = j;
          if (bland) break;
          best = d_(j);
        }
      }
      if (q < 0) return Status::optimal;
      const Eigen::VectorXd alpha = binv_ * a_.col(q);
      Eigen::Index r = -1;
      double theta = std::numeric_limits<double>::infinity();
      double best_alpha = 0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (alpha(i) <= opt_.pivot_tol) continue;
        const double t = std::max(xb_(i), 0.0) / alpha(i);
        bool take = false;
        if (t < theta - 1e-12) {
          take = true;
        } else if (t <= theta + 1e-12) {
          if (bland) {
            take = basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)];
          } else if (alpha(i) > best_alpha * (1 + 1e-12)) {
            take = true;
          } else if (alpha(i) >= best_alpha * (1 - 1e-12) && basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)]) {
            take = true;
          }
        }
        // Prefer removing artificials on ties.
        if (!take && r >= 0 && t <= theta + 1e-12 && is_artificial(basis_[static_cast<std::size_t>(i)]) &&
            !is_artificial(basis_[static_cast<std::size_t>(r)]))
          take = true;
        if (take) {
          r = i;
          theta = std::min(theta, t);
          best_alpha = alpha(i);
        }
      }
      if (r < 0) return Status::unbounded;
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
      xb_ -= theta * alpha;
      xb_(r) = theta;
      for (Eigen::Index i = 0; i < m_; ++i)
        if (xb_(i) < 0.0 && xb_(i) > -opt_.feas_tol) xb_(i) = 0.0;
      pivot(r, q, alpha);
    }
  }

  // Dual simplex from a dual feasible basis.
  Status dual() {
    phase1_ = false;
    for (;;) {
      if (iters_ > opt_.max_iterations) return Status::iteration_limit;
      Eigen::Index r = -1;
      double worst = -opt_.feas_tol;
      for (Eigen::Index i = 0; i < m_; ++i)
        if (xb_(i) < worst) {
          worst = xb_(i);
          r = i;
        }
      if (r < 0) return Status::optimal;
      compute_duals();
      const Eigen::VectorXd rho = binv_.row(r).transpose();
      const Eigen::VectorXd alpha_r = a_.transpose() * rho;
      Eigen::Index q = -1;
      double best = std::numeric_limits<double>::infinity();
      double best_mag = 0;
      for (Eigen::Index j = 0; j < n_; ++j) {
        if (!enterable(j) || alpha_r(j) >= -opt_.pivot_tol) continue;
        const double t = std::max(d_(j), 0.0) / -alpha_r(j);
        const double mag = -alpha_r(j);
        if (t < best - 1e-12 || (t <= best + 1e-12 && mag > best_mag * (1 + 1e-12))) {
          best = std::min(best, t);
          best_mag = mag;
          q = j;
        }
      }
      if (q < 0) return Status::infeasible;
      const Eigen::VectorXd alpha = binv_ * a_.col(q);
      const double theta = xb_(r) / alpha(r);
      xb_ -= theta * alpha;
      xb_(r) = theta;
      pivot(r, q, alpha);
    }
  }

  // Two-phase solve from a crash basis of unit columns and artificials.
  Status cold() {
    art_sign_.assign(static_cast<std::size_t>(m_), 1.0);
    for (Eigen::Index i = 0; i < m_; ++i) art_sign_[static_cast<std::size_t>(i)] = b_(i) >= 0 ? 1.0 : -1.0;
    basis_.assign(static_cast<std::size_t>(m_), -1);
    for (Eigen::Index j = 0; j < n_; ++j) {
      const Eigen::Index i = col_nnz_row_[static_cast<std::size_t>(j)];
      if (i < 0 || basis_[static_cast<std::size_t>(i)] >= 0) continue;
      const double v = a_(i, j);
      if (b_(i) / v >= 0.0) basis_[static_cast<std::size_t>(i)] = j;
    }
    bool any_art = false;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (basis_[static_cast<std::size_t>(i)] < 0) {
        basis_[static_cast<std::size_t>(i)] = n_ + i;
        any_art = true;
      }
    refactor();
    if (any_art) {
      Status st = primal(true);
      if (st != Status::optimal) return st;
      if (artificial_level() > opt_.feas_tol * std::max<double>(1.0, static_cast<double>(m_))) return Status::infeasible;
      // Drive remaining zero-level artificials out of the basis.
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (!is_artificial(basis_[static_cast<std::size_t>(i)])) continue;
        const Eigen::VectorXd row = a_.transpose() * binv_.row(i).transpose();
        Eigen::Index q = -1;
        double mag = opt_.pivot_tol;
        for (Eigen::Index j = 0; j < n_; ++j)
          if (!in_basis_[static_cast<std::size_t>(j)] && std::abs(row(j)) > mag) {
            mag = std::abs(row(j));
            q = j;
          }
        if (q < 0) return Status::infeasible;  // cannot happen with full row rank
        const Eigen::VectorXd alpha = binv_ * a_.col(q);
        const double theta = xb_(i) / alpha(i);
        xb_ -= theta * alpha;
        xb_(i) = theta;
        pivot(i, q, alpha);
      }
    }
    refactor();
    return primal(false);
  }

  Options opt_;
  Eigen::Index m_ = 0, n_ = 0;
  Eigen::MatrixXd a_;
  std::vector<Eigen::Index> kept_, dropped_;
  Eigen::MatrixXd dep_;
  std::vector<Eigen::Index> col_nnz_row_;

  Eigen::VectorXd b_, c_, xb_, y_, d_;
  Eigen::MatrixXd binv_;
  std::vector<Eigen::Index> basis_;
  std::vector<std::uint8_t> in_basis_;
  std::vector<double> art_sign_;
  bool have_basis_ = false;
  bool phase1_ = false;
  long iters_ = 0;
  int since_refactor_ = 0;
};

}  // namespace pshlab::lp
