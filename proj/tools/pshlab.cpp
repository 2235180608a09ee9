#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pshlab/cli.hpp"

namespace {

template <class T>
void override_with(const std::optional<T>& flag, T& dst) {
  if (flag) dst = *flag;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jensen-measure envelopes, boundaries and Dirichlet solutions on discretized compact sets"};
  std::string command, config_path;
  std::optional<std::string> fixture, set_file, phi, expect, out;
  std::optional<double> resolution, tol_peak, tol_sweep, tol_maximality, tol_poisson, tol_harmonic;
  std::optional<int> cone_degree, cone_count, rounds, probes, disc_samples, disc_count, disc_degree;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::vector<double>> radii;
  std::optional<std::vector<std::size_t>> nodes;

  app.add_option("command", command, "boundary | envelope | dirichlet | maximal-solution | certify | poisson | harmonic | disc-mc");
  app.add_option("--config", config_path, "JSON run configuration; flags override its values");
  app.add_option("--fixture", fixture, "disk1d | bidisk | disk_x_segment | two_disks");
  app.add_option("--set-file", set_file, "JSON set definition (fixture or point list)");
  app.add_option("--resolution", resolution, "grid spacing");
  app.add_option("--cone-degree", cone_degree, "largest monomial degree in the test cone");
  app.add_option("--cone-count", cone_count, "number of test functions");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--radii", radii, "stencil radii in units of the spacing")->delimiter(',');
  app.add_option("--tol-peak", tol_peak, "peak-score threshold (default 4 h^2)");
  app.add_option("--tol-sweep", tol_sweep, "sweep stopping tolerance");
  app.add_option("--tol-maximality", tol_maximality, "certificate tolerance (default 10 h Lip(u))");
  app.add_option("--tol-poisson", tol_poisson, "Poisson probe tolerance (default 10 h)");
  app.add_option("--tol-harmonic", tol_harmonic, "harmonicity tolerance (default 1e-6)");
  app.add_option("--phi", phi, "registry id or CSV path");
  app.add_option("--expect", expect, "expected verdict; a mismatch exits with 1");
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", workers, "worker threads (0 = all cores)");
  app.add_option("--rounds", rounds, "Dirichlet rounds");
  app.add_option("--probes", probes, "random Poisson probes");
  app.add_option("--nodes", nodes, "restrict poisson/harmonic to these nodes")->delimiter(',');
  app.add_option("--disc-samples", disc_samples, "boundary samples per disc (power of two >= 256)");
  app.add_option("--disc-count", disc_count, "random disc triples for disc-mc");
  app.add_option("--disc-degree", disc_degree, "degree of random discs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  pshlab::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = pshlab::config_from_json(pshlab::read_json_file(config_path));
  } catch (const pshlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  }
  if (!command.empty()) cfg.command = command;
  if (fixture) {
    cfg.fixture = *fixture;
    cfg.set_file.clear();
  }
  override_with(set_file, cfg.set_file);
  override_with(resolution, cfg.resolution);
  override_with(cone_degree, cfg.cone_degree);
  override_with(cone_count, cfg.cone_count);
  override_with(seed, cfg.seed);
  override_with(radii, cfg.radii);
  if (tol_peak) cfg.tol_peak = tol_peak;
  if (tol_sweep) cfg.tol_sweep = tol_sweep;
  if (tol_maximality) cfg.tol_maximality = tol_maximality;
  if (tol_poisson) cfg.tol_poisson = tol_poisson;
  if (tol_harmonic) cfg.tol_harmonic = tol_harmonic;
  override_with(phi, cfg.phi);
  override_with(expect, cfg.expect);
  override_with(out, cfg.out);
  override_with(workers, cfg.workers);
  override_with(rounds, cfg.rounds);
  override_with(probes, cfg.probes);
  override_with(nodes, cfg.nodes);
  override_with(disc_samples, cfg.disc_samples);
  override_with(disc_count, cfg.disc_count);
  override_with(disc_degree, cfg.disc_degree);

  return pshlab::run_guarded(cfg, std::cerr, std::cerr);
}
