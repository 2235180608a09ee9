#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "pshlab/boundary.hpp"
#include "pshlab/disc.hpp"
#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/jensen.hpp"
#include "pshlab/test_cone.hpp"

namespace pshlab {

using json = nlohmann::json;

/// Shortest round-trip decimal form, independent of locale and stream state.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int p = 15; p <= 17; ++p) {
    std::snprintf(buf, sizeof buf, "%.*g", p, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot open '" + path + "' for writing");
  }
  template <class... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return fmt(v); }
  template <class Int, class = std::enable_if_t<std::is_integral_v<Int>>>
  static std::string cell(Int v) {
    return std::to_string(v);
  }
  std::ofstream out_;
};

inline std::vector<std::string> coordinate_header(const GridSet& g) {
  if (g.n == 1) return {"re_z1", "im_z1"};
  return {"re_z1", "im_z1", "re_z2", "im_z2"};
}

inline std::vector<std::string> coordinate_cells(const GridSet& g, std::size_t i) {
  std::vector<std::string> c{fmt(g.points[i][0].real()), fmt(g.points[i][0].imag())};
  if (g.n == 2) {
    c.push_back(fmt(g.points[i][1].real()));
    c.push_back(fmt(g.points[i][1].imag()));
  }
  return c;
}

inline void write_nodes_csv(const std::string& path, const GridSet& g) {
  CsvWriter w(path);
  auto head = coordinate_header(g);
  head.insert(head.begin(), "index");
  head.push_back("component");
  head.push_back("analytic_boundary");
  w.row(head);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto r = coordinate_cells(g, i);
    r.insert(r.begin(), std::to_string(i));
    r.push_back(std::to_string(g.component.empty() ? 0 : g.component[i]));
    r.push_back(std::to_string(g.analytic_boundary.empty() ? 0 : int(g.analytic_boundary[i])));
    w.row(r);
  }
}

inline void write_boundary_csv(const std::string& path, const BoundaryReport& rep) {
  CsvWriter w(path);
  w.row("node", "peak_score", "in_O", "in_B");
  for (std::size_t i = 0; i < rep.o_mask.size(); ++i)
    w.row(i, rep.peak_scores[i], int(rep.o_mask[i]), int(rep.b_mask[i]));
}

/// Grid functions side by side: index, coordinates, one column per function.
inline void write_functions_csv(const std::string& path, const GridSet& g, const std::vector<std::string>& names,
                                const std::vector<const GridFunction*>& cols) {
  CsvWriter w(path);
  auto head = coordinate_header(g);
  head.insert(head.begin(), "index");
  head.insert(head.end(), names.begin(), names.end());
  w.row(head);
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto r = coordinate_cells(g, i);
    r.insert(r.begin(), std::to_string(i));
    for (const auto* c : cols) r.push_back(fmt((*c)[i]));
    w.row(r);
  }
}

/// One line per (barycenter node, support node) pair.
inline void write_measures_csv(const std::string& path, const std::vector<DiscreteMeasure>& measures,
                               const std::vector<std::size_t>& nodes) {
  CsvWriter w(path);
  w.row("node", "support_node", "weight");
  for (std::size_t z : nodes)
    for (std::size_t j : measures[z].support()) w.row(z, j, measures[z].weights[j]);
}

inline void write_stencils_csv(const std::string& path, const std::vector<DiscStencil>& stencils) {
  CsvWriter w(path);
  w.row("center", "radius", "dir_re_1", "dir_im_1", "dir_re_2", "dir_im_2", "samples", "support_size");
  for (const auto& s : stencils)
    w.row(s.center, s.radius, s.direction[0].real(), s.direction[0].imag(), s.direction[1].real(),
          s.direction[1].imag(), s.samples, s.support.size());
}

inline json cone_to_json(const TestCone& cone) {
  json j;
  j["seed"] = cone.seed;
  j["degree_cap"] = cone.degree_cap;
  j["mandatory"] = cone.mandatory;
  j["rejected"] = cone.rejected;
  json fns = json::array();
  for (const auto& f : cone.functions) {
    json m;
    m["kind"] = kind_name(f.kind);
    json terms = json::array();
    for (const auto& [e, c] : f.poly.terms) terms.push_back({e[0], e[1], c.real(), c.imag()});
    m["terms"] = terms;
    if (f.kind == TestFunction::Kind::affine_combo) m["sq_weight"] = f.sq_weight;
    if (f.kind == TestFunction::Kind::log_abs_poly) {
      m["shift"] = f.shift;
      m["floor"] = f.floor;
    }
    if (f.mirror >= 0) m["mirror"] = f.mirror;
    fns.push_back(m);
  }
  j["functions"] = fns;
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

/// Set definition: {"fixture": name, "resolution": r} or
/// {"points": [[re, im, ...], ...], "n": k, "spacing": h}.
inline GridSet grid_from_json(const json& j) {
  try {
    if (j.contains("fixture")) return build_fixture(j.at("fixture").get<std::string>(), j.value("resolution", 0.25));
    const int n = j.at("n").get<int>();
    const double h = j.at("spacing").get<double>();
    std::vector<ComplexPoint> pts;
    for (const auto& row : j.at("points")) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != static_cast<std::size_t>(2 * n)) throw ConfigError("each point needs 2n real coordinates");
      ComplexPoint p{};
      for (int k = 0; k < n; ++k) p[static_cast<std::size_t>(k)] = cplx(v[2 * static_cast<std::size_t>(k)], v[2 * static_cast<std::size_t>(k) + 1]);
      pts.push_back(p);
    }
    return from_points(pts, n, h, j.value("name", std::string("points")));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad set definition: ") + e.what());
  }
}

/// Disc specification: {"coefficients": [[[re, im], ...] per coordinate]}.
inline AnalyticDisc disc_from_json(const json& j) {
  try {
    AnalyticDisc f;
    for (const auto& coord : j.at("coefficients")) {
      std::vector<cplx> c;
      for (const auto& v : coord) {
        const auto pair = v.get<std::vector<double>>();
        if (pair.size() != 2) throw ConfigError("disc coefficients are [re, im] pairs");
        c.emplace_back(pair[0], pair[1]);
      }
      f.coefficients.push_back(std::move(c));
    }
    if (f.coefficients.empty() || f.coefficients.size() > 2) throw ConfigError("a disc has one or two coordinates");
    return f;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad disc definition: ") + e.what());
  }
}

struct LoadedFunction {
  GridFunction values;  // NaN where the file gave no value
  NodeSubset given;
};

/// Reads "index,value" rows or "coords...,value" rows (2n coordinates, each
/// snapped to a node within spacing/2). A non-numeric first line is a header.
inline LoadedFunction read_function_csv(const std::string& path, const GridSet& g) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  LoadedFunction out;
  out.values.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
  out.given = make_subset(g);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> cells;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) numeric = false;
      cells.push_back(v);
    }
    if (!numeric) {
      if (lineno == 1) continue;
      throw ConfigError(path + ":" + std::to_string(lineno) + ": non-numeric cell");
    }
    std::size_t node = 0;
    if (cells.size() == 2) {
      if (cells[0] < 0 || cells[0] != std::floor(cells[0]) || cells[0] >= static_cast<double>(g.size()))
        throw ConfigError(path + ":" + std::to_string(lineno) + ": node index out of range");
      node = static_cast<std::size_t>(cells[0]);
    } else if (cells.size() == static_cast<std::size_t>(2 * g.n + 1)) {
      ComplexPoint p{};
      for (int k = 0; k < g.n; ++k) p[static_cast<std::size_t>(k)] = cplx(cells[2 * static_cast<std::size_t>(k)], cells[2 * static_cast<std::size_t>(k) + 1]);
      const long j = g.index().nearest(p, g.spacing / 2);
      if (j < 0) throw ConfigError(path + ":" + std::to_string(lineno) + ": coordinates match no node");
      node = static_cast<std::size_t>(j);
    } else {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected index,value or coordinates,value");
    }
    out.values[node] = cells.back();
    out.given[node] = 1;
  }
  return out;
}

}  // namespace pshlab
