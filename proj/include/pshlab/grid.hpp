#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <string>
#include <unordered_map>
#include <vector>

#include "pshlab/errors.hpp"

namespace pshlab {

using cplx = std::complex<double>;

/// A point of C^n for n <= 2. Unused trailing coordinates stay zero.
struct ComplexPoint {
  std::array<cplx, 2> z{};

  cplx& operator[](std::size_t k) { return z[k]; }
  const cplx& operator[](std::size_t k) const { return z[k]; }
};

inline double squared_distance(const ComplexPoint& a, const ComplexPoint& b) {
  return std::norm(a[0] - b[0]) + std::norm(a[1] - b[1]);
}

inline double squared_norm(const ComplexPoint& a) { return std::norm(a[0]) + std::norm(a[1]); }

/// Bitmask over the nodes of a GridSet.
using NodeSubset = std::vector<std::uint8_t>;

inline std::size_t count(const NodeSubset& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](std::uint8_t b) { return b != 0; }));
}

inline std::vector<std::size_t> indices_of(const NodeSubset& s) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i]) out.push_back(i);
  return out;
}

/// Uniform hashing of points into cubes of a fixed side, used for nearest-node
/// snapping and radius queries.
class SpatialIndex {
 public:
  SpatialIndex() = default;
  SpatialIndex(const std::vector<ComplexPoint>& pts, double cell) : pts_(pts), cell_(cell) {
    cells_.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      cells_.push_back(cell_of(pts[i]));
      buckets_[key(cells_.back())].push_back(i);
    }
  }

  /// Nearest node within `tol`, or -1. Ties go to the lower index.
  long nearest(const ComplexPoint& p, double tol) const {
    long best = -1;
    double best_d = tol * tol;
    visit(p, tol, [&](std::size_t i) {
      const double d = squared_distance(pts_[i], p);
      if (d < best_d || (d == best_d && (best < 0 || static_cast<long>(i) < best))) {
        best_d = d;
        best = static_cast<long>(i);
      }
    });
    return best;
  }

  /// All nodes within distance `radius` of p, ascending.
  std::vector<std::size_t> within(const ComplexPoint& p, double radius) const {
    std::vector<std::size_t> out;
    const double r2 = radius * radius;
    visit(p, radius, [&](std::size_t i) {
      if (squared_distance(pts_[i], p) <= r2) out.push_back(i);
    });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  using Cell = std::array<long, 4>;

  static std::array<double, 4> reals(const ComplexPoint& p) {
    return {p[0].real(), p[0].imag(), p[1].real(), p[1].imag()};
  }

  Cell cell_of(const ComplexPoint& p) const {
    const auto r = reals(p);
    Cell c{};
    for (int k = 0; k < 4; ++k) c[k] = static_cast<long>(std::floor(r[k] / cell_));
    return c;
  }

  static std::uint64_t key(const Cell& c) {
    std::uint64_t k = 1469598103934665603ULL;
    for (long v : c) {
      k ^= static_cast<std::uint64_t>(v + (1L << 20));
      k *= 1099511628211ULL;
    }
    return k;
  }

  // Calls f on every node whose cell meets the box of half-width r around p.
  template <class F>
  void visit(const ComplexPoint& p, double r, F&& f) const {
    const auto x = reals(p);
    Cell lo{}, hi{};
    for (int k = 0; k < 4; ++k) {
      lo[k] = static_cast<long>(std::floor((x[k] - r) / cell_));
      hi[k] = static_cast<long>(std::floor((x[k] + r) / cell_));
    }
    Cell c{};
    for (c[0] = lo[0]; c[0] <= hi[0]; ++c[0])
      for (c[1] = lo[1]; c[1] <= hi[1]; ++c[1])
        for (c[2] = lo[2]; c[2] <= hi[2]; ++c[2])
          for (c[3] = lo[3]; c[3] <= hi[3]; ++c[3]) {
            auto it = buckets_.find(key(c));
            if (it == buckets_.end()) continue;
            for (std::size_t i : it->second)
              if (cells_[i] == c) f(i);
          }
  }

  std::vector<ComplexPoint> pts_;
  double cell_ = 1.0;
  std::vector<Cell> cells_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

/// Finite point cloud standing in for a compact set X in C^n.
///
/// `component` tags which piece of a union a node belongs to (0 when shared or
/// when the set is connected). `analytic_boundary` marks nodes that lie on the
/// boundary known in closed form for built-in fixtures; user point sets leave it
/// all zero.
struct GridSet {
  std::string name;
  int n = 1;
  double spacing = 0.25;
  std::vector<ComplexPoint> points;
  std::vector<int> component;
  NodeSubset analytic_boundary;

  std::size_t size() const { return points.size(); }

  /// Spatial index over `points`. Built by the constructors below; call
  /// reindex() after editing `points` by hand.
  const SpatialIndex& index() const {
    if (!index_) throw ConfigError("grid has no spatial index; call reindex()");
    return *index_;
  }
  void reindex() { index_ = std::make_shared<const SpatialIndex>(points, spacing); }

  /// Index of the node closest to p (no tolerance), ties to lower index.
  std::size_t closest(const ComplexPoint& p) const {
    std::size_t best = 0;
    double bd = squared_distance(points[0], p);
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double d = squared_distance(points[i], p);
      if (d < bd) {
        bd = d;
        best = i;
      }
    }
    return best;
  }

 private:
  std::shared_ptr<const SpatialIndex> index_;
};

namespace detail {

/// Nodes of the closed unit disk at spacing h: the square lattice strictly
/// inside the circle of radius 1-h, then M equispaced nodes on the unit circle.
/// Returns the lattice part and the circle part separately.
inline std::pair<std::vector<cplx>, std::vector<cplx>> disk_factor(double h) {
  std::vector<cplx> lattice, ring;
  const int k_max = static_cast<int>(std::floor(1.0 / h + 1e-9));
  for (int i = -k_max; i <= k_max; ++i)
    for (int j = -k_max; j <= k_max; ++j) {
      const cplx c(i * h, j * h);
      if (std::abs(c) <= 1.0 - h + 1e-12) lattice.push_back(c);
    }
  const int m = 8 * std::max(1, static_cast<int>(std::lround(std::numbers::pi / (4.0 * h))));
  for (int k = 0; k < m; ++k) ring.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / m));
  return {lattice, ring};
}

inline void add_node(GridSet& g, cplx a, cplx b, int comp, bool on_boundary) {
  g.points.push_back(ComplexPoint{{a, b}});
  g.component.push_back(comp);
  g.analytic_boundary.push_back(on_boundary ? 1 : 0);
}

}  // namespace detail

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"disk1d", "bidisk", "disk_x_segment", "two_disks"};
  return names;
}

/// Builds one of the built-in compact sets at nominal spacing `resolution`.
///
/// Disk factors combine an interior square lattice with a circle of nodes at
/// modulus exactly one, so every analytically known boundary point is a node.
inline GridSet build_fixture(const std::string& name, double resolution) {
  if (!(resolution > 0.0 && resolution <= 0.5))
    throw ConfigError("resolution must lie in (0, 0.5], got " + std::to_string(resolution));
  GridSet g;
  g.name = name;
  g.spacing = resolution;
  const auto [lattice, ring] = detail::disk_factor(resolution);
  std::vector<std::pair<cplx, bool>> factor;
  for (cplx c : lattice) factor.emplace_back(c, false);
  for (cplx c : ring) factor.emplace_back(c, true);

  if (name == "disk1d") {
    g.n = 1;
    for (auto [c, on] : factor) detail::add_node(g, c, 0.0, 0, on);
  } else if (name == "bidisk") {
    g.n = 2;
    for (auto [a, ona] : factor)
      for (auto [b, onb] : factor) detail::add_node(g, a, b, 0, ona && onb);
  } else if (name == "disk_x_segment") {
    g.n = 2;
    const int slices = static_cast<int>(std::lround(2.0 / resolution));
    const double dt = 2.0 / slices;
    for (int k = 0; k <= slices; ++k) {
      const double t = -1.0 + k * dt;
      for (auto [a, on] : factor) detail::add_node(g, a, cplx(t, 0.0), 0, on);
    }
  } else if (name == "two_disks") {
    g.n = 2;
    // X1 = disk x {0} (component 1), X2 = {0} x disk (component 2); the origin
    // appears once and carries component 0.
    for (cplx c : lattice) detail::add_node(g, c, 0.0, c == cplx(0.0) ? 0 : 1, false);
    for (cplx c : lattice)
      if (c != cplx(0.0)) detail::add_node(g, 0.0, c, 2, false);
    for (cplx c : ring) detail::add_node(g, c, 0.0, 1, true);
    for (cplx c : ring) detail::add_node(g, 0.0, c, 2, true);
  } else {
    throw ConfigError("unknown fixture '" + name + "'");
  }
  g.reindex();
  return g;
}

/// Builds a GridSet from explicit points. Rejects non-finite coordinates and
/// pairs of nodes closer than spacing/10.
inline GridSet from_points(const std::vector<ComplexPoint>& pts, int n, double spacing, std::string name = "points") {
  if (n != 1 && n != 2) throw ConfigError("complex dimension must be 1 or 2");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw ConfigError("spacing must be positive");
  if (pts.empty()) throw ConfigError("point list is empty");
  GridSet g;
  g.name = std::move(name);
  g.n = n;
  g.spacing = spacing;
  for (const auto& p : pts) {
    for (int k = 0; k < 2; ++k)
      if (!std::isfinite(p[k].real()) || !std::isfinite(p[k].imag())) throw ConfigError("non-finite coordinate");
    if (n == 1 && p[1] != cplx(0.0)) throw ConfigError("second coordinate given for a set in C^1");
    detail::add_node(g, p[0], p[1], 0, false);
  }
  g.reindex();
  const auto& idx = g.index();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto near = idx.within(g.points[i], spacing / 10.0);
    if (near.size() > 1) throw ConfigError("nodes " + std::to_string(near[0]) + " and " + std::to_string(near[1]) + " coincide");
  }
  return g;
}

inline NodeSubset make_subset(const GridSet& g, bool value = false) { return NodeSubset(g.size(), value ? 1 : 0); }

/// Nodes outside V adjacent to V, together with nodes of V adjacent to the
/// complement. Adjacency means distance at most 1.5 * spacing.
inline NodeSubset relative_boundary(const GridSet& g, const NodeSubset& v) {
  if (v.size() != g.size()) throw ConfigError("mask length does not match node count");
  NodeSubset out(g.size(), 0);
  const auto& idx = g.index();
  const double radius = 1.5 * g.spacing + 1e-12;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j : idx.within(g.points[i], radius)) {
      if (j != i && (v[j] != 0) != (v[i] != 0)) {
        out[i] = 1;
        break;
      }
    }
  }
  return out;
}

}  // namespace pshlab
