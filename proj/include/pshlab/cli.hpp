#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pshlab/boundary.hpp"
#include "pshlab/disc.hpp"
#include "pshlab/envelope.hpp"
#include "pshlab/errors.hpp"
#include "pshlab/grid.hpp"
#include "pshlab/io.hpp"
#include "pshlab/registry.hpp"
#include "pshlab/test_cone.hpp"

namespace pshlab {

inline constexpr int kReportSchema = 1;

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"boundary", "envelope", "dirichlet", "maximal-solution",
                                              "certify",  "poisson",  "harmonic",  "disc-mc"};
  return names;
}

/// Everything one CLI run needs. Optional tolerances fall back to
/// spacing-dependent defaults.
struct RunConfig {
  std::string command;
  std::string fixture = "disk1d";
  std::string set_file;  // JSON set definition; overrides fixture when set
  double resolution = 0.25;
  int cone_degree = 3;
  int cone_count = 64;
  std::uint64_t seed = 7;
  std::vector<double> radii;  // stencil radii in units of spacing; empty = defaults
  std::optional<double> tol_peak, tol_sweep, tol_maximality, tol_poisson, tol_harmonic;
  std::string phi;
  std::string expect;
  std::string out = "out";
  unsigned workers = 0;  // 0 = all hardware threads
  int rounds = 8;
  int probes = 16;
  std::vector<std::size_t> nodes;  // restricts poisson and harmonic
  int disc_samples = 4096;
  int disc_count = 100;
  int disc_degree = 3;
};

namespace detail {

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}
template <class T>
void take(const json& j, const char* key, std::optional<T>& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

}  // namespace detail

inline RunConfig config_from_json(const json& j, RunConfig cfg = {}) {
  static const std::vector<std::string> known{
      "command", "fixture", "set_file", "resolution", "cone_degree", "cone_count", "seed", "radii",
      "tol_peak", "tol_sweep", "tol_maximality", "tol_poisson", "tol_harmonic", "phi", "expect", "out",
      "workers", "rounds", "probes", "nodes", "disc_samples", "disc_count", "disc_degree"};
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown config key '" + k + "'");
  try {
    detail::take(j, "command", cfg.command);
    detail::take(j, "fixture", cfg.fixture);
    detail::take(j, "set_file", cfg.set_file);
    detail::take(j, "resolution", cfg.resolution);
    detail::take(j, "cone_degree", cfg.cone_degree);
    detail::take(j, "cone_count", cfg.cone_count);
    detail::take(j, "seed", cfg.seed);
    detail::take(j, "radii", cfg.radii);
    detail::take(j, "tol_peak", cfg.tol_peak);
    detail::take(j, "tol_sweep", cfg.tol_sweep);
    detail::take(j, "tol_maximality", cfg.tol_maximality);
    detail::take(j, "tol_poisson", cfg.tol_poisson);
    detail::take(j, "tol_harmonic", cfg.tol_harmonic);
    detail::take(j, "phi", cfg.phi);
    detail::take(j, "expect", cfg.expect);
    detail::take(j, "out", cfg.out);
    detail::take(j, "workers", cfg.workers);
    detail::take(j, "rounds", cfg.rounds);
    detail::take(j, "probes", cfg.probes);
    detail::take(j, "nodes", cfg.nodes);
    detail::take(j, "disc_samples", cfg.disc_samples);
    detail::take(j, "disc_count", cfg.disc_count);
    detail::take(j, "disc_degree", cfg.disc_degree);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return cfg;
}

inline json config_to_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  if (c.set_file.empty()) {
    j["fixture"] = c.fixture;
    j["resolution"] = c.resolution;
  } else {
    j["set_file"] = c.set_file;
  }
  j["cone_degree"] = c.cone_degree;
  j["cone_count"] = c.cone_count;
  j["seed"] = c.seed;
  if (!c.radii.empty()) j["radii"] = c.radii;
  auto opt = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = *v;
  };
  opt("tol_peak", c.tol_peak);
  opt("tol_sweep", c.tol_sweep);
  opt("tol_maximality", c.tol_maximality);
  opt("tol_poisson", c.tol_poisson);
  opt("tol_harmonic", c.tol_harmonic);
  if (!c.phi.empty()) j["phi"] = c.phi;
  if (!c.expect.empty()) j["expect"] = c.expect;
  j["rounds"] = c.rounds;
  j["probes"] = c.probes;
  if (!c.nodes.empty()) j["nodes"] = c.nodes;
  if (c.command == "disc-mc") {
    j["disc_samples"] = c.disc_samples;
    j["disc_count"] = c.disc_count;
    j["disc_degree"] = c.disc_degree;
  }
  return j;
}

inline void validate(const RunConfig& c) {
  const auto& cmds = command_names();
  if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end())
    throw ConfigError("unknown command '" + c.command + "'");
  for (const auto* t : {&c.tol_peak, &c.tol_sweep, &c.tol_maximality, &c.tol_poisson, &c.tol_harmonic})
    if (*t && !(**t > 0)) throw ConfigError("tolerances must be positive");
  if (c.rounds < 1) throw ConfigError("rounds must be at least 1");
  if (c.probes < 0) throw ConfigError("probes must be nonnegative");
  if (c.disc_count < 1 || c.disc_degree < 1) throw ConfigError("disc_count and disc_degree must be positive");
  const bool needs_phi = c.command == "envelope" || c.command == "dirichlet" || c.command == "maximal-solution" ||
                         c.command == "certify" || c.command == "harmonic";
  if (needs_phi && c.phi.empty()) throw ConfigError("command '" + c.command + "' needs --phi");
}

/// Function from a registry id or a CSV file of node values.
inline GridFunction load_phi(const std::string& spec, const GridSet& g, const NodeSubset* required) {
  if (is_registry_id(spec)) return registry_function(spec, g);
  const auto loaded = read_function_csv(spec, g);
  const NodeSubset all = make_subset(g, true);
  const NodeSubset& need = required ? *required : all;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (need[i] && !loaded.given[i]) throw ConfigError("'" + spec + "' gives no value at node " + std::to_string(i));
  GridFunction f = loaded.values;
  for (double& v : f)
    if (std::isnan(v)) v = 0.0;
  return f;
}

inline json boundary_summary(const GridSet& g, const BoundaryReport& rep) {
  json b;
  b["o_count"] = count(rep.o_mask);
  b["b_count"] = count(rep.b_mask);
  b["o_regular"] = rep.o_regular();
  b["tol_peak"] = rep.tol_peak;
  std::size_t known = count(g.analytic_boundary);
  if (known > 0) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < g.size(); ++i) wrong += (rep.b_mask[i] != 0) != (g.analytic_boundary[i] != 0);
    b["misclassified_vs_analytic"] = wrong;
  }
  return b;
}

struct RunOutput {
  int exit_code = 0;
  std::string verdict;
  json report;
};

/// Executes one command and writes its artifacts under cfg.out.
///
/// Exit codes: 0 success, 1 verdict differs from the expected one, 2 invalid
/// configuration or an infeasible discretization. Commands with a natural
/// claim (dirichlet, certify, harmonic, disc-mc) expect a positive verdict unless
/// --expect says otherwise.
inline RunOutput run(const RunConfig& cfg, std::ostream& log) {
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  json timing;
  auto lap = [&](const char* name, clock::time_point t0) {
    timing[name] = std::chrono::duration<double>(clock::now() - t0).count();
  };

  validate(cfg);
  const unsigned workers = cfg.workers == 0 ? default_workers() : cfg.workers;
  std::filesystem::create_directories(cfg.out);
  const auto path = [&](const char* f) { return (std::filesystem::path(cfg.out) / f).string(); };

  RunOutput res;
  json& report = res.report;
  report["schema_version"] = kReportSchema;
  report["config"] = config_to_json(cfg);

  auto t0 = clock::now();
  GridSet g = cfg.set_file.empty() ? build_fixture(cfg.fixture, cfg.resolution) : grid_from_json(read_json_file(cfg.set_file));
  StencilOptions so;
  if (!cfg.radii.empty()) so.radii = cfg.radii;
  const auto stencils = build_stencils(g, so);
  const TestCone cone = generate_cone(g, stencils, cfg.cone_degree, cfg.cone_count, cfg.seed);
  lap("setup", t0);
  report["grid"] = {{"name", g.name}, {"n", g.n}, {"spacing", g.spacing}, {"nodes", g.size()}};
  report["cone"] = {{"size", cone.size()}, {"mandatory", cone.mandatory}, {"rejected", cone.rejected}};
  report["stencils"] = stencils.size();
  write_nodes_csv(path("nodes.csv"), g);
  write_json_file(path("cone.json"), cone_to_json(cone));
  log << g.name << ": " << g.size() << " nodes, " << stencils.size() << " stencils, " << cone.size()
      << " cone members\n";

  const double h = g.spacing;
  std::optional<BoundaryReport> rep;
  auto need_boundary = [&]() -> const BoundaryReport& {
    if (!rep) {
      const auto tb = clock::now();
      BoundaryOptions bo;
      bo.workers = workers;
      rep = compute_boundary(g, cone, cfg.tol_peak.value_or(default_tol_peak(g)), bo);
      lap("boundary", tb);
      report["boundary"] = boundary_summary(g, *rep);
      write_boundary_csv(path("boundary.csv"), *rep);
      log << "boundary: " << count(rep->b_mask) << " nodes, O-regular " << (rep->o_regular() ? "yes" : "no") << "\n";
    }
    return *rep;
  };

  std::string default_expect;
  json results;
  t0 = clock::now();
  const std::string& cmd = cfg.command;

  if (cmd == "boundary") {
    const auto& b = need_boundary();
    res.verdict = b.o_regular() ? "o-regular" : "not-o-regular";
  } else if (cmd == "envelope") {
    const GridFunction phi = load_phi(cfg.phi, g, nullptr);
    const auto env = edwards_envelope(g, cone, stencils, phi, workers, 100000, cfg.tol_sweep.value_or(1e-12));
    const double osc = oscillation(phi);
    results["duality_gap"] = env.duality_gap;
    results["oscillation"] = osc;
    results["gap_ratio"] = osc > 0 ? env.duality_gap / osc : 0.0;
    results["sweep_iterations"] = env.iterations;
    results["sweep_converged"] = env.sweep_converged;
    results["lp_iterations"] = env.lp_iterations;
    write_functions_csv(path("envelope.csv"), g, {"phi", "lp", "sweep"}, {&phi, &env.lp_values, &env.sweep_values});
    write_measures_csv(path("witnesses.csv"), env.witnesses, all_nodes(g));
    res.verdict = env.duality_gap <= 0.05 * osc + 1e-9 ? "dual" : "gap-exceeded";
  } else if (cmd == "dirichlet") {
    const auto& b = need_boundary();
    const GridFunction phi = load_phi(cfg.phi, g, &b.b_mask);
    DirichletOptions opt;
    opt.rounds = cfg.rounds;
    if (cfg.tol_sweep) opt.sweep_tol = *cfg.tol_sweep;
    const auto d = dirichlet_extend(g, stencils, b, phi, opt);
    const auto psh = is_discretely_psh(d.u, stencils, 1e-6);
    results["residuals"] = d.residuals;
    results["bounds"] = d.bounds;
    results["cover_sizes"] = d.cover_sizes;
    results["slack_constant"] = d.slack_constant;
    results["psh"] = psh.ok;
    results["worst_psh_violation"] = psh.worst_violation;
    bool within = true;
    for (std::size_t k = 0; k < d.residuals.size(); ++k) within = within && d.residuals[k] <= d.bounds[k] + 0.1;
    results["residuals_within_bound"] = within;
    write_functions_csv(path("envelope.csv"), g, {"phi_b", "u"}, {&phi, &d.u});
    res.verdict = within && psh.ok ? "extended" : "failed";
    default_expect = "extended";
  } else if (cmd == "maximal-solution") {
    const auto& b = need_boundary();
    const GridFunction phi = load_phi(cfg.phi, g, &b.b_mask);
    const auto m = maximal_solution(g, cone, b, phi, workers);
    write_functions_csv(path("envelope.csv"), g, {"phi_b", "u"}, {&phi, &m.u});
    const auto interior = nodes_outside(b.b_mask);
    write_measures_csv(path("witnesses.csv"), m.witnesses, interior);
    double worst = 0;
    for (std::size_t z : interior) worst = std::max(worst, std::abs(m.witnesses[z].integrate(m.u) - m.u[z]));
    results["interior_nodes"] = interior.size();
    results["worst_witness_gap"] = worst;
    results["min_u"] = *std::min_element(m.u.begin(), m.u.end());
    results["max_u"] = *std::max_element(m.u.begin(), m.u.end());
    res.verdict = "solved";
  } else if (cmd == "certify") {
    const auto& b = need_boundary();
    const GridFunction u = load_phi(cfg.phi, g, nullptr);
    const double tol = cfg.tol_maximality.value_or(std::max(10.0 * h * lipschitz_estimate(g, u), 1e-7));
    const auto c = certify_maximal(g, cone, u, b.b_mask, tol, workers);
    CsvWriter w(path("certificates.csv"));
    w.row("node", "u", "lp_min", "gap", "support_ok", "certified");
    std::vector<DiscreteMeasure> ms(g.size());
    std::vector<std::size_t> nodes;
    std::size_t ok = 0;
    for (const auto& cert : c.certificates) {
      w.row(cert.node, u[cert.node], cert.value, cert.gap, int(cert.support_ok), int(cert.certified));
      ms[cert.node] = cert.measure;
      nodes.push_back(cert.node);
      ok += cert.certified ? 1 : 0;
    }
    write_measures_csv(path("witnesses.csv"), ms, nodes);
    results["tol"] = tol;
    results["certified_nodes"] = ok;
    results["checked_nodes"] = c.certificates.size();
    results["worst_gap"] = c.worst_gap;
    results["worst_node"] = c.worst_node;
    res.verdict = c.certified ? "maximal" : "not-maximal";
    default_expect = "maximal";
  } else if (cmd == "poisson") {
    const auto& b = need_boundary();
    PoissonOptions po;
    po.random_probes = cfg.probes;
    po.seed = cfg.seed;
    po.tol = cfg.tol_poisson.value_or(0.0);
    po.nodes = cfg.nodes;
    po.workers = workers;
    const auto p = poisson_test(g, cone, b, po);
    results["tol"] = p.tol;
    results["worst_gap"] = p.worst_gap;
    results["worst_node"] = p.worst_node;
    results["worst_probe"] = p.worst_probe;
    json probes = json::array();
    for (const auto& [name, gap] : p.probe_gaps) probes.push_back({{"probe", name}, {"gap", gap}});
    results["probes"] = probes;
    res.verdict = p.poisson ? "poisson" : "non-poisson";
  } else if (cmd == "harmonic") {
    const GridFunction u = load_phi(cfg.phi, g, nullptr);
    const auto hr = harmonic_test(g, cone, u, cfg.tol_harmonic.value_or(1e-6), workers, cfg.nodes);
    write_functions_csv(path("envelope.csv"), g, {"u", "jensen_min", "jensen_max"}, {&u, &hr.min_values, &hr.max_values});
    results["tol"] = hr.tol;
    results["worst_deviation"] = hr.worst_deviation;
    results["worst_node"] = hr.worst_node;
    res.verdict = hr.harmonic ? "harmonic" : "not-harmonic";
    default_expect = "harmonic";
  } else if (cmd == "disc-mc") {
    require_sample_count(cfg.disc_samples);
    Rng rng(cfg.seed);
    CsvWriter w(path("disc_mc.csv"));
    w.row("disc", "check", "lhs", "rhs", "verdict");
    int lw_pass = 0, jc_pass = 0, jc_run = 0;
    const double mc = 5.0 / std::sqrt(static_cast<double>(cfg.disc_samples));
    for (int d = 0; d < cfg.disc_count; ++d) {
      const AnalyticDisc f = random_disc(g.n, cfg.disc_degree, rng);
      const AnalyticDisc inner = random_self_map(cfg.disc_degree, rng);
      const auto& member = cone.functions[static_cast<std::size_t>(rng.integer(0, static_cast<int>(cone.size()) - 1))];
      const auto lw = littlewood_check(f, inner, member, cfg.disc_samples);
      w.row(d, "littlewood", lw.composed, lw.outer + lw.tolerance, lw.verdict ? "pass" : "fail");
      lw_pass += lw.verdict ? 1 : 0;
      if (disc_within(f, g)) {
        ++jc_run;
        const auto jc = jensen_check(f, g, cone, cfg.disc_samples, mc);
        const auto r = static_cast<std::size_t>(jc.worst_member);
        w.row(d, "jensen", jc.lhs[r], jc.rhs[r] + jc.tolerance[r], jc.ok ? "pass" : "fail");
        jc_pass += jc.ok ? 1 : 0;
      }
    }
    results["littlewood_pass_rate"] = static_cast<double>(lw_pass) / cfg.disc_count;
    results["jensen_checked"] = jc_run;
    results["jensen_pass_rate"] = jc_run ? static_cast<double>(jc_pass) / jc_run : 1.0;
    results["mc_tolerance"] = mc;
    res.verdict = lw_pass == cfg.disc_count && jc_pass == jc_run ? "pass" : "fail";
    default_expect = "pass";
  }
  lap("command", t0);

  report["results"] = results;
  report["verdict"] = res.verdict;
  const std::string expected = cfg.expect.empty() ? default_expect : cfg.expect;
  if (!expected.empty()) report["expected"] = expected;
  res.exit_code = expected.empty() || expected == res.verdict ? 0 : 1;
  report["exit_code"] = res.exit_code;
  write_json_file(path("report.json"), report);
  lap("total", t_start);
  timing["workers"] = workers;
  write_json_file(path("timing.json"), timing);
  log << cmd << ": " << res.verdict << "\n";
  return res;
}

/// run() with every library error mapped to exit code 2.
inline int run_guarded(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    return run(cfg, log).exit_code;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
  } catch (const DiscretizationError& e) {
    err << "discretization too coarse: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "output error: " << e.what() << "\n";
  }
  return 2;
}

}  // namespace pshlab
