#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pshlab/boundary.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/test_cone.hpp"

namespace pshtest {

/// Grid, stencils, cone and boundary for one fixture, built once per process.
struct Setup {
  pshlab::GridSet grid;
  std::vector<pshlab::DiscStencil> stencils;
  pshlab::TestCone cone;

  /// Peak-test boundary, computed on first use.
  const pshlab::BoundaryReport& boundary() const {
    if (!boundary_) {
      pshlab::BoundaryOptions bo;
      bo.workers = pshlab::default_workers();
      boundary_ = pshlab::compute_boundary(grid, cone, pshlab::default_tol_peak(grid), bo);
    }
    return *boundary_;
  }

 private:
  mutable std::optional<pshlab::BoundaryReport> boundary_;
};

inline const Setup& setup(const std::string& name, double resolution = 0.25, int degree = 3, int count = 64,
                          std::uint64_t seed = 7) {
  static std::map<std::string, std::unique_ptr<Setup>> cache;
  const std::string key = name + "/" + std::to_string(resolution) + "/" + std::to_string(degree) + "/" +
                          std::to_string(count) + "/" + std::to_string(seed);
  auto& slot = cache[key];
  if (!slot) {
    auto s = std::make_unique<Setup>();
    s->grid = pshlab::build_fixture(name, resolution);
    s->stencils = pshlab::build_stencils(s->grid);
    s->cone = pshlab::generate_cone(s->grid, s->stencils, degree, count, seed);
    slot = std::move(s);
  }
  return *slot;
}

inline std::size_t node_at(const pshlab::GridSet& g, pshlab::cplx a, pshlab::cplx b = 0.0) {
  return g.closest(pshlab::ComplexPoint{{a, b}});
}

}  // namespace pshtest
