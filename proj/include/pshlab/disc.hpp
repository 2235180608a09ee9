#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "pshlab/envelope.hpp"
#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/jensen.hpp"
#include "pshlab/random.hpp"
#include "pshlab/test_cone.hpp"

namespace pshlab {

/// Polynomial map from the unit disc into C^n; coefficients[k][j] multiplies
/// zeta^j in coordinate k.
struct AnalyticDisc {
  std::vector<std::vector<cplx>> coefficients;

  int dims() const { return static_cast<int>(coefficients.size()); }
  int degree() const {
    int d = 0;
    for (const auto& c : coefficients)
      for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != cplx(0, 0)) d = std::max(d, static_cast<int>(j));
    return d;
  }

  static cplx horner(const std::vector<cplx>& c, cplx zeta) {
    cplx v(0, 0);
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * zeta + *it;
    return v;
  }

  ComplexPoint operator()(cplx zeta) const {
    ComplexPoint p{};
    for (std::size_t k = 0; k < coefficients.size() && k < 2; ++k) p[k] = horner(coefficients[k], zeta);
    return p;
  }
  ComplexPoint center() const { return (*this)(cplx(0, 0)); }
};

inline AnalyticDisc constant_disc(const ComplexPoint& z, int n) {
  AnalyticDisc f;
  for (int k = 0; k < n; ++k) f.coefficients.push_back({z[static_cast<std::size_t>(k)]});
  return f;
}

/// Taylor truncation of the disc automorphism zeta -> (zeta + a) / (1 + conj(a) zeta).
struct MobiusSeries {
  std::vector<cplx> coefficients;
  double sup_error = 0;  // bound on the truncation error over the closed disc
};

inline MobiusSeries mobius_series(cplx a, int degree = 12) {
  const double r = std::abs(a);
  if (!(r < 1.0)) throw ConfigError("Mobius parameter must lie in the open unit disc");
  if (degree < 1) throw ConfigError("Mobius truncation degree must be positive");
  MobiusSeries m;
  m.coefficients.assign(static_cast<std::size_t>(degree) + 1, cplx(0, 0));
  m.coefficients[0] = a;
  cplx power(1, 0);
  for (int k = 1; k <= degree; ++k) {
    m.coefficients[static_cast<std::size_t>(k)] = (1.0 - r * r) * power;
    power *= -std::conj(a);
  }
  m.sup_error = (1.0 + r) * std::pow(r, degree);
  return m;
}

/// Equispaced points e^{i theta_k} of the unit circle.
inline std::vector<cplx> circle_samples(int n) {
  std::vector<cplx> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
  return out;
}

inline void require_sample_count(int n) {
  if (n < 256 || (n & (n - 1)) != 0) throw ConfigError("sample count must be a power of two of at least 256");
}

/// Checks that the image of the closed disc stays within the grid spacing of
/// the grid, sampling a polar mesh.
inline bool disc_within(const AnalyticDisc& f, const GridSet& g, int rings = 8, int angles = 4096) {
  const auto& idx = g.index();
  for (int i = 0; i <= rings; ++i) {
    const double rad = static_cast<double>(i) / rings;
    for (int k = 0; k < angles; ++k) {
      const ComplexPoint p = f(std::polar(rad, 2.0 * std::numbers::pi * k / angles));
      if (idx.nearest(p, g.spacing) < 0) return false;
      if (i == 0) break;
    }
  }
  return true;
}

/// mu_f: each of N boundary samples moves to its nearest node with weight 1/N.
inline DiscreteMeasure pushforward(const AnalyticDisc& f, const GridSet& g, int n_samples) {
  require_sample_count(n_samples);
  if (f.dims() != g.n) throw ConfigError("disc dimension does not match the grid");
  const auto& idx = g.index();
  DiscreteMeasure m;
  m.weights.assign(g.size(), 0.0);
  for (const cplx& e : circle_samples(n_samples)) {
    const ComplexPoint p = f(e);
    const long j = idx.nearest(p, g.spacing);
    if (j < 0) throw DiscretizationError("disc boundary leaves the grid", g.closest(p));
    m.weights[static_cast<std::size_t>(j)] += 1.0 / n_samples;
  }
  m.barycenter = g.closest(f.center());
  return m;
}

/// Euclidean barycenter of a measure, for comparison with f(0).
inline ComplexPoint barycenter_point(const GridSet& g, const DiscreteMeasure& m) {
  ComplexPoint b{};
  for (std::size_t i = 0; i < m.weights.size(); ++i)
    if (m.weights[i] != 0.0) {
      b[0] += m.weights[i] * g.points[i][0];
      b[1] += m.weights[i] * g.points[i][1];
    }
  return b;
}

struct JensenCheck {
  bool ok = true;
  long worst_member = -1;
  double worst_excess = 0;  // max of u(f(0)) - mu_f(u) - tol_member
  std::vector<double> lhs, rhs, tolerance;
};

/// Sub-mean inequality u(f(0)) <= mu_f(u) + tol for every cone member, with the
/// member tolerance tol + 2 h Lip(u) absorbing snapping error.
inline JensenCheck jensen_check(const AnalyticDisc& f, const GridSet& g, const TestCone& cone, int n_samples,
                                double tol) {
  const DiscreteMeasure mu = pushforward(f, g, n_samples);
  const ComplexPoint z0 = f.center();
  JensenCheck out;
  const auto rows = static_cast<std::size_t>(cone.values.rows());
  out.lhs.resize(rows);
  out.rhs.resize(rows);
  out.tolerance.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = cone.values.row(static_cast<Eigen::Index>(r));
    std::vector<double> vals(row.data(), row.data() + row.size());
    out.lhs[r] = cone.functions[r](z0);
    out.rhs[r] = mu.integrate(vals);
    out.tolerance[r] = tol + 2.0 * g.spacing * lipschitz_estimate(g, vals);
    const double excess = out.lhs[r] - out.rhs[r] - out.tolerance[r];
    if (excess > 0.0) out.ok = false;
    if (out.worst_member < 0 || excess > out.worst_excess) {
      out.worst_excess = excess;
      out.worst_member = static_cast<long>(r);
    }
  }
  return out;
}

struct LittlewoodResult {
  double outer = 0;     // mu_f(u)
  double composed = 0;  // mu_{f o g}(u)
  double tolerance = 0;
  bool verdict = true;
};

/// g must be a one-variable polynomial self-map of the disc fixing 0.
inline void validate_self_map(const AnalyticDisc& gmap, int n_samples) {
  if (gmap.dims() != 1) throw ConfigError("inner map must be one-dimensional");
  if (std::abs(gmap.center()[0]) > 1e-12) throw ConfigError("inner map must send 0 to 0");
  for (const cplx& e : circle_samples(8 * n_samples))
    if (std::abs(gmap(e)[0]) > 1.0 + 1e-9) throw ConfigError("inner map leaves the closed unit disc");
}

/// Compares mu_f(u) with mu_{f o g}(u) by boundary quadrature, with u
/// evaluated pointwise. The verdict allows 5 osc(u) / sqrt(N).
template <class Fn>
LittlewoodResult littlewood_check(const AnalyticDisc& f, const AnalyticDisc& gmap, Fn&& u, int n_samples) {
  require_sample_count(n_samples);
  validate_self_map(gmap, n_samples);
  LittlewoodResult r;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const cplx& e : circle_samples(n_samples)) {
    const double a = u(f(e));
    const double b = u(f(gmap(e)[0]));
    r.outer += a;
    r.composed += b;
    lo = std::min({lo, a, b});
    hi = std::max({hi, a, b});
  }
  r.outer /= n_samples;
  r.composed /= n_samples;
  r.tolerance = 5.0 * (hi - lo) / std::sqrt(static_cast<double>(n_samples));
  r.verdict = r.composed <= r.outer + r.tolerance;
  return r;
}

/// Grid-function variant: sample points are snapped to their nearest node.
inline LittlewoodResult littlewood_check(const AnalyticDisc& f, const AnalyticDisc& gmap, const GridSet& g,
                                         const GridFunction& u, int n_samples) {
  if (u.size() != g.size()) throw ConfigError("function length does not match node count");
  const auto& idx = g.index();
  return littlewood_check(
      f, gmap,
      [&](const ComplexPoint& p) {
        const long j = idx.nearest(p, g.spacing);
        if (j < 0) throw DiscretizationError("disc leaves the grid", g.closest(p));
        return u[static_cast<std::size_t>(j)];
      },
      n_samples);
}

/// Random polynomial disc with sum |c_j| <= 1 in every coordinate, so that it
/// maps the closed disc into the closed polydisc.
inline AnalyticDisc random_disc(int n, int degree, Rng& rng) {
  AnalyticDisc f;
  for (int k = 0; k < n; ++k) {
    std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
    double total = 0;
    for (auto& v : c) {
      v = std::polar(rng.uniform(), 2.0 * std::numbers::pi * rng.uniform());
      total += std::abs(v);
    }
    const double budget = rng.uniform(0.5, 1.0);
    for (auto& v : c) v *= budget / total;
    f.coefficients.push_back(std::move(c));
  }
  return f;
}

/// Random polynomial self-map of the disc with g(0) = 0.
inline AnalyticDisc random_self_map(int degree, Rng& rng) {
  AnalyticDisc g = random_disc(1, degree, rng);
  auto& c = g.coefficients[0];
  const double lost = std::abs(c[0]);
  c[0] = cplx(0, 0);
  if (degree >= 1) c[1] += std::polar(lost, std::arg(c[1]));
  return g;
}

struct ClusterEstimate {
  NodeSubset nodes;           // nodes with positive frequency floor
  std::vector<double> floor;  // min over discs of the sample fraction per node
  bool heuristic = true;      // a finite-family proxy, never a limit statement
};

/// Each boundary sample is charged to its nearest node within `cell`; a node's
/// floor is the smallest fraction it receives across the family.
inline ClusterEstimate cluster_estimate(const std::vector<AnalyticDisc>& discs, const GridSet& g, double cell,
                                        int n_samples) {
  if (discs.size() < 2) throw ConfigError("cluster_estimate needs at least two discs");
  if (!(cell > 0)) throw ConfigError("cell size must be positive");
  require_sample_count(n_samples);
  const auto& idx = g.index();
  const auto samples = circle_samples(n_samples);
  ClusterEstimate out;
  out.floor.assign(g.size(), std::numeric_limits<double>::infinity());
  std::vector<double> freq(g.size());
  for (const auto& f : discs) {
    std::fill(freq.begin(), freq.end(), 0.0);
    for (const cplx& e : samples) {
      const long j = idx.nearest(f(e), cell);
      if (j >= 0) freq[static_cast<std::size_t>(j)] += 1.0 / n_samples;
    }
    for (std::size_t i = 0; i < g.size(); ++i) out.floor[i] = std::min(out.floor[i], freq[i]);
  }
  out.nodes = make_subset(g);
  for (std::size_t i = 0; i < g.size(); ++i) out.nodes[i] = out.floor[i] > 0.0 ? 1 : 0;
  return out;
}

}  // namespace pshlab
