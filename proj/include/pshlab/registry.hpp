#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pshlab/envelope.hpp"
#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"

namespace pshlab {

inline const std::vector<std::string>& registry_ids() {
  static const std::vector<std::string> ids{"const:<c>",       "re_z1",          "im_z1",        "re_z2",
                                            "abs_z1_sq",       "sq_z1_minus_1",  "one_minus_t2", "paper-two-disk",
                                            "indicator-smoothed", "cusp:<node>"};
  return ids;
}

inline bool is_registry_id(const std::string& id) {
  if (id.rfind("const:", 0) == 0 || id.rfind("cusp:", 0) == 0) return true;
  const auto& ids = registry_ids();
  return std::find(ids.begin(), ids.end(), id) != ids.end();
}

namespace detail {

inline double parse_number(const std::string& text, const std::string& id) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("cannot parse a number in '" + id + "'");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError("cannot parse a number in '" + id + "'");
  return v;
}

}  // namespace detail

/// Closed-form grid functions by name.
///
///   const:c             the constant c
///   re_z1, im_z1, re_z2 coordinate parts
///   abs_z1_sq           |z1|^2
///   sq_z1_minus_1       |z1|^2 - 1
///   one_minus_t2        1 - (Re z2)^2, the segment profile
///   paper-two-disk      clamp(|z1| - |z2|, 0, 1): one on the first disk's circle, zero on the second
///   indicator-smoothed  ramp of width 4h across Re z1 = 0
///   cusp:k              -min(1, |z - node_k| / 4h)
inline GridFunction registry_function(const std::string& id, const GridSet& g) {
  GridFunction f(g.size());
  auto fill = [&](auto&& fn) {
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = fn(g.points[i]);
  };
  if (id.rfind("const:", 0) == 0) {
    const double c = detail::parse_number(id.substr(6), id);
    std::fill(f.begin(), f.end(), c);
  } else if (id.rfind("cusp:", 0) == 0) {
    const double k = detail::parse_number(id.substr(5), id);
    if (k < 0 || k != std::floor(k) || k >= static_cast<double>(g.size())) throw ConfigError("cusp node out of range in '" + id + "'");
    f = cusp(g, static_cast<std::size_t>(k), 4.0 * g.spacing);
  } else if (id == "re_z1") {
    fill([](const ComplexPoint& p) { return p[0].real(); });
  } else if (id == "im_z1") {
    fill([](const ComplexPoint& p) { return p[0].imag(); });
  } else if (id == "re_z2") {
    fill([](const ComplexPoint& p) { return p[1].real(); });
  } else if (id == "abs_z1_sq") {
    fill([](const ComplexPoint& p) { return std::norm(p[0]); });
  } else if (id == "sq_z1_minus_1") {
    fill([](const ComplexPoint& p) { return std::norm(p[0]) - 1.0; });
  } else if (id == "one_minus_t2") {
    fill([](const ComplexPoint& p) { return 1.0 - p[1].real() * p[1].real(); });
  } else if (id == "paper-two-disk") {
    fill([](const ComplexPoint& p) { return std::clamp(std::abs(p[0]) - std::abs(p[1]), 0.0, 1.0); });
  } else if (id == "indicator-smoothed") {
    const double w = 4.0 * g.spacing;
    fill([w](const ComplexPoint& p) { return std::clamp(0.5 + p[0].real() / w, 0.0, 1.0); });
  } else {
    throw ConfigError("unknown function id '" + id + "'");
  }
  return f;
}

}  // namespace pshlab
