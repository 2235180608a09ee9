#pragma once

#include <vector>

#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/jensen.hpp"

namespace pshlab {

struct BoundaryReport {
  NodeSubset o_mask;                // peak points
  NodeSubset b_mask;                // discrete closure of o_mask
  std::vector<double> peak_scores;  // max over J_z of mu(|w - z|^2)
  double tol_peak = 0;
  double closure_radius = 0;
  /// Measures attaining the peak score; these maximize the |z|^2 moment and
  /// so double as maximal Jensen measures.
  std::vector<DiscreteMeasure> maximal_measures;

  bool o_regular() const { return o_mask == b_mask; }
};

struct BoundaryOptions {
  /// Nodes within this distance of a peak node join the closure. Zero keeps
  /// the closure equal to the peak set.
  double closure_radius = 0;
  unsigned workers = 1;
  bool keep_measures = true;
};

inline double default_tol_peak(const GridSet& g) { return 4.0 * g.spacing * g.spacing; }

/// Runs the peak test at every node.
inline BoundaryReport compute_boundary(const GridSet& g, const TestCone& cone, double tol_peak,
                                       const BoundaryOptions& opt = {}) {
  if (!(tol_peak > 0)) throw ConfigError("tol_peak must be positive");
  BoundaryReport rep;
  rep.tol_peak = tol_peak;
  rep.closure_radius = opt.closure_radius;
  JensenSystem sys(g, cone, make_subset(g, true));
  const auto sq = squared_norms(g);
  std::vector<std::size_t> nodes(g.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = i;
  auto sol = solve_nodes(sys, nodes, opt.workers, [&](JensenSystem& s, std::size_t z) { return s.maximize(z, sq); });
  rep.o_mask = make_subset(g);
  rep.peak_scores.resize(g.size());
  for (std::size_t z = 0; z < g.size(); ++z) {
    rep.peak_scores[z] = spread(g, sol[z].measure, z);
    rep.o_mask[z] = rep.peak_scores[z] <= tol_peak ? 1 : 0;
  }
  if (count(rep.o_mask) == 0) throw DiscretizationError("no peak points detected", 0);
  rep.b_mask = rep.o_mask;
  if (opt.closure_radius > 0) {
    const auto& idx = g.index();
    for (std::size_t z = 0; z < g.size(); ++z)
      if (rep.o_mask[z])
        for (std::size_t j : idx.within(g.points[z], opt.closure_radius)) rep.b_mask[j] = 1;
  }
  if (opt.keep_measures) {
    rep.maximal_measures.reserve(g.size());
    for (auto& s : sol) rep.maximal_measures.push_back(std::move(s.measure));
  }
  return rep;
}

/// J^b_z: the Jensen polytope at z restricted to measures on the detected
/// boundary. Infeasibility means the grid or cone is too coarse.
inline JensenPolytope boundary_polytope(const GridSet& g, const TestCone& cone, std::size_t z,
                                        const BoundaryReport& rep) {
  JensenPolytope p = build_polytope(g, cone, z, rep.b_mask);
  JensenSystem sys(g, cone, rep.b_mask);
  if (!sys.feasible(z)) throw DiscretizationError("boundary polytope is empty at node " + std::to_string(z), z);
  return p;
}

}  // namespace pshlab
