#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pshlab/boundary.hpp"
#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/jensen.hpp"
#include "pshlab/random.hpp"
#include "pshlab/test_cone.hpp"

namespace pshlab {

/// Real value per node; values at or below kFloor stand for minus infinity.
using GridFunction = std::vector<double>;

inline double oscillation(const GridFunction& f, const NodeSubset* on = nullptr) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (on && !(*on)[i]) continue;
    lo = std::min(lo, f[i]);
    hi = std::max(hi, f[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

inline std::vector<std::size_t> all_nodes(const GridSet& g) {
  std::vector<std::size_t> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return v;
}

inline std::vector<std::size_t> nodes_outside(const NodeSubset& s) {
  std::vector<std::size_t> v;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!s[i]) v.push_back(i);
  return v;
}

/// Largest difference quotient between nodes at most 1.5 spacings apart.
inline double lipschitz_estimate(const GridSet& g, const GridFunction& u) {
  double lip = 0;
  const auto& idx = g.index();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j : idx.within(g.points[i], 1.5 * g.spacing + 1e-12))
      if (j > i) lip = std::max(lip, std::abs(u[i] - u[j]) / std::sqrt(squared_distance(g.points[i], g.points[j])));
  return lip;
}

// ---------------------------------------------------------------------------
// Envelopes

struct LpEnvelope {
  GridFunction values;
  std::vector<DiscreteMeasure> witnesses;
  long iterations = 0;
};

/// Per node, the least phi-integral over the Jensen polytope on `support`.
inline LpEnvelope edwards_envelope_lp(const GridSet& g, const TestCone& cone, const GridFunction& phi,
                                      const NodeSubset& support, unsigned workers = 1) {
  if (phi.size() != g.size()) throw ConfigError("phi length does not match node count");
  JensenSystem sys(g, cone, support);
  const auto nodes = all_nodes(g);
  auto sol = solve_nodes(sys, nodes, workers, [&](JensenSystem& s, std::size_t z) { return s.minimize(z, phi); });
  LpEnvelope out;
  out.values.resize(g.size());
  out.witnesses.reserve(g.size());
  for (std::size_t z = 0; z < g.size(); ++z) {
    out.values[z] = sol[z].value;
    out.iterations += sol[z].iterations;
    out.witnesses.push_back(std::move(sol[z].measure));
  }
  return out;
}

struct SweepResult {
  GridFunction values;
  long iterations = 0;
  bool converged = false;
};

/// Largest grid function below phi that satisfies every stencil sub-mean
/// inequality, computed by the synchronous iteration
///   u <- min(phi, min over stencils at z of the stencil average of u).
inline SweepResult perron_sweep_envelope(const GridSet& g, const std::vector<DiscStencil>& stencils,
                                         const GridFunction& phi, long max_iters = 100000, double tol = 1e-12) {
  if (phi.size() != g.size()) throw ConfigError("phi length does not match node count");
  SweepResult r;
  GridFunction u = phi, next(g.size());
  for (r.iterations = 1; r.iterations <= max_iters; ++r.iterations) {
    next = phi;
    for (const auto& st : stencils) {
      const double avg = st.average(u);
      if (avg < next[st.center]) next[st.center] = avg;
    }
    double change = 0;
    for (std::size_t i = 0; i < u.size(); ++i) change = std::max(change, std::abs(next[i] - u[i]));
    u.swap(next);
    if (change <= tol) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, max_iters);
  r.values = std::move(u);
  return r;
}

struct EnvelopeResult {
  GridFunction lp_values;
  GridFunction sweep_values;
  std::vector<DiscreteMeasure> witnesses;
  double duality_gap = 0;
  long iterations = 0;  // sweep iterations
  long lp_iterations = 0;
  bool sweep_converged = false;
};

/// Both envelope computations and their sup-distance.
inline EnvelopeResult edwards_envelope(const GridSet& g, const TestCone& cone, const std::vector<DiscStencil>& stencils,
                                       const GridFunction& phi, unsigned workers = 1, long max_iters = 100000,
                                       double sweep_tol = 1e-12) {
  EnvelopeResult r;
  auto lp = edwards_envelope_lp(g, cone, phi, make_subset(g, true), workers);
  auto sw = perron_sweep_envelope(g, stencils, phi, max_iters, sweep_tol);
  r.lp_values = std::move(lp.values);
  r.witnesses = std::move(lp.witnesses);
  r.lp_iterations = lp.iterations;
  r.sweep_values = std::move(sw.values);
  r.iterations = sw.iterations;
  r.sweep_converged = sw.converged;
  for (std::size_t i = 0; i < g.size(); ++i) r.duality_gap = std::max(r.duality_gap, std::abs(r.lp_values[i] - r.sweep_values[i]));
  return r;
}

// ---------------------------------------------------------------------------
// Dirichlet problem on O-regular sets

/// Cusp -min(1, |z - w| / r0): zero at w, -1 outside the ball of radius r0.
inline GridFunction cusp(const GridSet& g, std::size_t w, double r0) {
  GridFunction f(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = -std::min(1.0, std::sqrt(squared_distance(g.points[i], g.points[w])) / r0);
  return f;
}

struct DirichletOptions {
  int rounds = 8;
  double cusp_radius = 0;  // 0 selects 4 * spacing
  long sweep_max_iters = 100000;
  double sweep_tol = 1e-12;
};

struct DirichletResult {
  GridFunction u;
  std::vector<double> residuals;      // sup over B of phi_b - u after each round
  std::vector<double> bounds;         // 2^-k osc(phi_b)
  std::vector<std::size_t> cover_sizes;
  double slack_constant = 0;          // max_k (residual_k - bound_k) / spacing, clipped at 0
};

/// Continuous psh extension of boundary data by successive approximation.
///
/// Round j approximates the current residual phi on B from below within
/// eps_j = 2^-j osc(phi_b): every boundary node w yields the minorant
///   v_w = phi(w) + c_w u_w - eps_j / 2,
/// where u_w is the sweep envelope of a cusp peaking at w and c_w >= 0 is the
/// smallest constant keeping v_w <= phi on B. A greedy cover of B by the sets
/// {v_w > phi - eps_j} gives u_j = max(min_B phi, v_w over the cover). The
/// extension is the sum of the u_j and the residual after round j lies in
/// [0, eps_j).
inline DirichletResult dirichlet_extend(const GridSet& g, const std::vector<DiscStencil>& stencils,
                                        const BoundaryReport& rep, const GridFunction& phi_b,
                                        const DirichletOptions& opt = {}) {
  if (!rep.o_regular()) throw ConfigError("dirichlet_extend requires an O-regular set");
  if (phi_b.size() != g.size()) throw ConfigError("boundary data length does not match node count");
  const auto bnodes = indices_of(rep.b_mask);
  for (std::size_t b : bnodes)
    if (!std::isfinite(phi_b[b])) throw ConfigError("boundary data must be finite");
  const double osc = oscillation(phi_b, &rep.b_mask);
  const double r0 = opt.cusp_radius > 0 ? opt.cusp_radius : 4.0 * g.spacing;

  DirichletResult res;
  res.u.assign(g.size(), 0.0);
  GridFunction resid(g.size(), 0.0);
  for (std::size_t b : bnodes) resid[b] = phi_b[b];

  std::vector<GridFunction> peak;  // filled on first use
  auto peaks = [&]() -> const std::vector<GridFunction>& {
    if (peak.empty()) {
      peak.reserve(bnodes.size());
      for (std::size_t w : bnodes)
        peak.push_back(perron_sweep_envelope(g, stencils, cusp(g, w, r0), opt.sweep_max_iters, opt.sweep_tol).values);
    }
    return peak;
  };

  for (int j = 1; j <= opt.rounds; ++j) {
    const double eps = std::ldexp(osc, -j);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t b : bnodes) {
      lo = std::min(lo, resid[b]);
      hi = std::max(hi, resid[b]);
    }
    GridFunction uj(g.size(), lo);
    std::size_t cover_size = 0;
    if (hi - lo > eps) {
      const auto& pk = peaks();
      struct Candidate {
        std::size_t k;
        double c;
        std::size_t reach;
      };
      std::vector<Candidate> cands;
      std::vector<std::vector<std::uint8_t>> covers(bnodes.size());
      for (std::size_t k = 0; k < bnodes.size(); ++k) {
        const std::size_t w = bnodes[k];
        const auto& uw = pk[k];
        double c = 0;
        bool ok = true;
        for (std::size_t b : bnodes) {
          const double need = resid[w] - resid[b] - eps / 2;
          if (uw[b] < -1e-12) {
            c = std::max(c, need / -uw[b]);
          } else if (need > 1e-12) {
            ok = false;
            break;
          }
        }
        if (!ok) continue;
        auto& cov = covers[k];
        cov.assign(bnodes.size(), 0);
        std::size_t reach = 0;
        for (std::size_t t = 0; t < bnodes.size(); ++t) {
          const std::size_t b = bnodes[t];
          if (resid[w] + c * uw[b] - eps / 2 > resid[b] - eps) {
            cov[t] = 1;
            ++reach;
          }
        }
        cands.push_back({k, c, reach});
      }
      std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.reach > b.reach; });
      std::vector<std::uint8_t> covered(bnodes.size(), 0);
      std::size_t left = bnodes.size();
      for (const auto& cd : cands) {
        if (left == 0) break;
        const auto& cov = covers[cd.k];
        bool useful = false;
        for (std::size_t t = 0; t < bnodes.size(); ++t)
          if (cov[t] && !covered[t]) {
            covered[t] = 1;
            --left;
            useful = true;
          }
        if (!useful) continue;
        ++cover_size;
        const std::size_t w = bnodes[cd.k];
        const auto& uw = pk[cd.k];
        for (std::size_t i = 0; i < g.size(); ++i) uj[i] = std::max(uj[i], resid[w] + cd.c * uw[i] - eps / 2);
      }
      if (left > 0) {
        std::size_t bad = 0;
        for (std::size_t t = 0; t < bnodes.size(); ++t)
          if (!covered[t]) {
            bad = bnodes[t];
            break;
          }
        throw DiscretizationError("peak minorants fail to cover boundary node " + std::to_string(bad), bad);
      }
    }
    for (std::size_t i = 0; i < g.size(); ++i) res.u[i] += uj[i];
    double sup = 0;
    for (std::size_t b : bnodes) {
      resid[b] -= uj[b];
      sup = std::max(sup, std::abs(resid[b]));
    }
    res.residuals.push_back(sup);
    res.bounds.push_back(eps);
    res.cover_sizes.push_back(cover_size);
    res.slack_constant = std::max(res.slack_constant, (sup - eps) / g.spacing);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Maximal solutions and certificates

struct MaximalSolution {
  GridFunction u;
  std::vector<DiscreteMeasure> witnesses;
};

/// u(z) = min over J^b_z of mu(phi_b), with u = phi_b on the boundary.
inline MaximalSolution maximal_solution(const GridSet& g, const TestCone& cone, const BoundaryReport& rep,
                                        const GridFunction& phi_b, unsigned workers = 1) {
  if (phi_b.size() != g.size()) throw ConfigError("boundary data length does not match node count");
  MaximalSolution out;
  out.u.assign(g.size(), 0.0);
  out.witnesses.resize(g.size());
  const auto interior = nodes_outside(rep.b_mask);
  for (std::size_t z = 0; z < g.size(); ++z)
    if (rep.b_mask[z]) {
      out.u[z] = phi_b[z];
      out.witnesses[z] = dirac(g.size(), z);
    }
  if (!interior.empty()) {
    JensenSystem sys(g, cone, rep.b_mask);
    std::vector<LpValue> sol;
    try {
      sol = solve_nodes(sys, interior, workers, [&](JensenSystem& s, std::size_t z) { return s.minimize(z, phi_b); });
    } catch (const InfeasibleError& e) {
      throw DiscretizationError(std::string("boundary polytope: ") + e.what(), e.node());
    }
    for (std::size_t k = 0; k < interior.size(); ++k) {
      out.u[interior[k]] = sol[k].value;
      out.witnesses[interior[k]] = std::move(sol[k].measure);
    }
  }
  return out;
}

struct MaximalityCertificate {
  std::size_t node = 0;
  DiscreteMeasure measure;
  double value = 0;  // mu(u)
  double gap = 0;    // |mu(u) - u(z)|
  bool support_ok = true;
  bool certified = false;
};

struct CertificationResult {
  std::vector<MaximalityCertificate> certificates;
  bool certified = true;
  double worst_gap = 0;
  long worst_node = -1;
  double tol = 0;
};

/// For every node outside Z, the least mu(u) over Jensen measures supported in
/// Z. u is certified maximal off Z when each such minimum matches u(z) within tol.
inline CertificationResult certify_maximal(const GridSet& g, const TestCone& cone, const GridFunction& u,
                                           const NodeSubset& z_mask, double tol, unsigned workers = 1) {
  if (u.size() != g.size() || z_mask.size() != g.size()) throw ConfigError("length mismatch in certify_maximal");
  CertificationResult out;
  out.tol = tol;
  const auto nodes = nodes_outside(z_mask);
  if (nodes.empty()) return out;
  JensenSystem sys(g, cone, z_mask);
  auto sol = solve_nodes(sys, nodes, workers, [&](JensenSystem& s, std::size_t z) { return s.minimize(z, u); });
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    MaximalityCertificate c;
    c.node = nodes[k];
    c.value = sol[k].value;
    c.gap = std::abs(c.value - u[c.node]);
    for (std::size_t i : sol[k].measure.support())
      if (!z_mask[i]) c.support_ok = false;
    c.measure = std::move(sol[k].measure);
    c.certified = c.gap <= tol && c.support_ok;
    if (!c.certified) out.certified = false;
    if (out.worst_node < 0 || c.gap > out.worst_gap) {
      out.worst_gap = c.gap;
      out.worst_node = static_cast<long>(c.node);
    }
    out.certificates.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson and harmonicity tests

struct Probe {
  std::string name;
  GridFunction values;
};

/// Real moments of degree at most two, then `random_count` smooth random
/// functions (sums of three plane waves in the real coordinates).
inline std::vector<Probe> poisson_probes(const GridSet& g, int random_count, std::uint64_t seed) {
  std::vector<Probe> out;
  auto add = [&](std::string name, auto f) {
    Probe p{std::move(name), GridFunction(g.size())};
    for (std::size_t i = 0; i < g.size(); ++i) p.values[i] = f(g.points[i]);
    out.push_back(std::move(p));
  };
  for (int k = 0; k < g.n; ++k) {
    const std::string zk = "z" + std::to_string(k + 1);
    add("Re " + zk, [k](const ComplexPoint& p) { return p[static_cast<std::size_t>(k)].real(); });
    add("Im " + zk, [k](const ComplexPoint& p) { return p[static_cast<std::size_t>(k)].imag(); });
  }
  for (int k = 0; k < g.n; ++k)
    for (int l = k; l < g.n; ++l) {
      const std::string m = "z" + std::to_string(k + 1) + "z" + std::to_string(l + 1);
      add("Re " + m, [k, l](const ComplexPoint& p) { return (p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(l)]).real(); });
      add("Im " + m, [k, l](const ComplexPoint& p) { return (p[static_cast<std::size_t>(k)] * p[static_cast<std::size_t>(l)]).imag(); });
    }
  for (int k = 0; k < g.n; ++k)
    add("|z" + std::to_string(k + 1) + "|^2", [k](const ComplexPoint& p) { return std::norm(p[static_cast<std::size_t>(k)]); });
  if (g.n == 2) {
    add("Re z1 conj(z2)", [](const ComplexPoint& p) { return (p[0] * std::conj(p[1])).real(); });
    add("Im z1 conj(z2)", [](const ComplexPoint& p) { return (p[0] * std::conj(p[1])).imag(); });
    add("|z1-z2|^2", [](const ComplexPoint& p) { return std::norm(p[0] - p[1]); });
  }
  Rng rng(seed);
  for (int r = 0; r < random_count; ++r) {
    std::array<std::array<double, 4>, 3> freq{};
    std::array<double, 3> phase{}, amp{};
    for (int t = 0; t < 3; ++t) {
      for (int d = 0; d < 4; ++d) freq[t][d] = rng.uniform(-3.0, 3.0);
      phase[t] = rng.uniform(0.0, 2.0 * std::numbers::pi);
      amp[t] = rng.uniform(-1.0, 1.0);
    }
    add("random:" + std::to_string(r), [=](const ComplexPoint& p) {
      const std::array<double, 4> x{p[0].real(), p[0].imag(), p[1].real(), p[1].imag()};
      double v = 0;
      for (int t = 0; t < 3; ++t) {
        double arg = phase[t];
        for (int d = 0; d < 4; ++d) arg += freq[t][d] * x[d];
        v += amp[t] * std::cos(arg);
      }
      return v;
    });
  }
  return out;
}

struct PoissonOptions {
  int random_probes = 16;
  std::uint64_t seed = 0;
  double tol = 0;                        // 0 selects 10 * spacing
  std::vector<std::size_t> nodes;        // empty = every node
  unsigned workers = 1;
};

struct PoissonResult {
  bool poisson = true;  // "not refuted" when true
  double worst_gap = 0;
  long worst_node = -1;
  std::string worst_probe;
  double tol = 0;
  std::vector<std::pair<std::string, double>> probe_gaps;  // worst gap per probe
};

/// For each node and probe, the spread max - min of the probe integral over
/// J^b_z. Any spread above tol proves J^b_z has more than one measure.
inline PoissonResult poisson_test(const GridSet& g, const TestCone& cone, const BoundaryReport& rep,
                                  const PoissonOptions& opt = {}) {
  PoissonResult out;
  out.tol = opt.tol > 0 ? opt.tol : 10.0 * g.spacing;
  const auto nodes = opt.nodes.empty() ? all_nodes(g) : opt.nodes;
  const auto probes = poisson_probes(g, opt.random_probes, opt.seed);
  JensenSystem sys(g, cone, rep.b_mask);
  for (const auto& pr : probes) {
    std::vector<LpValue> lo, hi;
    try {
      lo = solve_nodes(sys, nodes, opt.workers, [&](JensenSystem& s, std::size_t z) { return s.minimize(z, pr.values); });
      hi = solve_nodes(sys, nodes, opt.workers, [&](JensenSystem& s, std::size_t z) { return s.maximize(z, pr.values); });
    } catch (const InfeasibleError& e) {
      throw DiscretizationError(std::string("boundary polytope: ") + e.what(), e.node());
    }
    double worst = 0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double gap = hi[k].value - lo[k].value;
      worst = std::max(worst, gap);
      if (out.worst_node < 0 || gap > out.worst_gap) {
        out.worst_gap = gap;
        out.worst_node = static_cast<long>(nodes[k]);
        out.worst_probe = pr.name;
      }
    }
    out.probe_gaps.emplace_back(pr.name, worst);
  }
  out.poisson = out.worst_gap <= out.tol;
  return out;
}

struct HarmonicResult {
  bool harmonic = true;
  double worst_deviation = 0;
  long worst_node = -1;
  GridFunction min_values, max_values;
  double tol = 0;
};

/// u is harmonic when every Jensen measure at every node integrates u to u(z).
inline HarmonicResult harmonic_test(const GridSet& g, const TestCone& cone, const GridFunction& u, double tol,
                                    unsigned workers = 1, std::vector<std::size_t> nodes = {}) {
  if (u.size() != g.size()) throw ConfigError("function length does not match node count");
  if (nodes.empty()) nodes = all_nodes(g);
  HarmonicResult out;
  out.tol = tol;
  JensenSystem sys(g, cone, make_subset(g, true));
  auto lo = solve_nodes(sys, nodes, workers, [&](JensenSystem& s, std::size_t z) { return s.minimize(z, u); });
  auto hi = solve_nodes(sys, nodes, workers, [&](JensenSystem& s, std::size_t z) { return s.maximize(z, u); });
  out.min_values.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
  out.max_values = out.min_values;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const std::size_t z = nodes[k];
    out.min_values[z] = lo[k].value;
    out.max_values[z] = hi[k].value;
    const double dev = std::max(std::abs(lo[k].value - u[z]), std::abs(hi[k].value - u[z]));
    if (out.worst_node < 0 || dev > out.worst_deviation) {
      out.worst_deviation = dev;
      out.worst_node = static_cast<long>(z);
    }
  }
  out.harmonic = out.worst_deviation <= tol;
  return out;
}

}  // namespace pshlab
