#include <gtest/gtest.h>
#include <cstdlib>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pshlab/cli.hpp"

using namespace pshlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("pshlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig base(const std::string& command, const std::string& out) {
  RunConfig c;
  c.command = command;
  c.fixture = "disk1d";
  c.out = out;
  c.workers = 1;
  return c;
}

}  // namespace

TEST(Cli, ConstantEnvelopeHasZeroGap) {
  const auto dir = scratch("env");
  RunConfig c = base("envelope", dir.string());
  c.phi = "const:3";
  std::ostringstream log;
  const RunOutput r = run(c, log);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.report["results"]["duality_gap"].get<double>(), 0.0);
  for (const char* f : {"nodes.csv", "envelope.csv", "witnesses.csv", "report.json", "timing.json", "cone.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  std::ifstream in(dir / "envelope.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "index,re_z1,im_z1,phi,lp,sweep");
  while (std::getline(in, line)) EXPECT_TRUE(line.ends_with(",3,3,3")) << line;
}

TEST(Cli, BoundaryArtifactsFlagTheCircle) {
  const auto dir = scratch("bnd");
  std::ostringstream log;
  const RunOutput r = run(base("boundary", dir.string()), log);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.verdict, "o-regular");
  EXPECT_EQ(r.report["boundary"]["misclassified_vs_analytic"].get<int>(), 0);
  EXPECT_EQ(r.report["boundary"]["b_count"].get<int>(), 24);
}

TEST(Cli, ArtifactsAreByteIdenticalAcrossRuns) {
  const auto a = scratch("rep_a"), b = scratch("rep_b");
  RunConfig c = base("maximal-solution", a.string());
  c.fixture = "two_disks";
  c.phi = "paper-two-disk";
  std::ostringstream log;
  run(c, log);
  c.out = b.string();
  c.workers = 3;
  run(c, log);
  for (const char* f : {"nodes.csv", "boundary.csv", "envelope.csv", "witnesses.csv", "cone.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  // report.json echoes the worker count, everything else must agree.
  auto ra = json::parse(slurp(a / "report.json")), rb = json::parse(slurp(b / "report.json"));
  EXPECT_EQ(ra["results"], rb["results"]);
}

TEST(Cli, ExitCodesFollowTheContract) {
  std::ostringstream log, err;
  RunConfig bad = base("frobnicate", scratch("x").string());
  EXPECT_EQ(run_guarded(bad, log, err), 2);
  RunConfig nophi = base("envelope", scratch("y").string());
  EXPECT_EQ(run_guarded(nophi, log, err), 2);
  RunConfig badfix = base("boundary", scratch("z").string());
  badfix.fixture = "annulus";
  EXPECT_EQ(run_guarded(badfix, log, err), 2);
  RunConfig neg = base("boundary", scratch("w").string());
  neg.tol_peak = -1.0;
  EXPECT_EQ(run_guarded(neg, log, err), 2);

  RunConfig pois = base("poisson", scratch("p").string());
  pois.expect = "non-poisson";
  EXPECT_EQ(run_guarded(pois, log, err), 1);
  pois.expect = "poisson";
  EXPECT_EQ(run_guarded(pois, log, err), 0);

  RunConfig cert = base("certify", scratch("c").string());
  cert.phi = "sq_z1_minus_1";
  cert.tol_maximality = 1e-3;
  EXPECT_EQ(run_guarded(cert, log, err), 1);
  cert.expect = "not-maximal";
  EXPECT_EQ(run_guarded(cert, log, err), 0);
}

TEST(Config, JsonIsStrictAndFlagsLayerOnTop) {
  const json j = json::parse(R"({"command": "envelope", "fixture": "two_disks", "seed": 11, "tol_peak": 0.2})");
  RunConfig c = config_from_json(j);
  EXPECT_EQ(c.command, "envelope");
  EXPECT_EQ(c.fixture, "two_disks");
  EXPECT_EQ(c.seed, 11u);
  ASSERT_TRUE(c.tol_peak.has_value());
  EXPECT_DOUBLE_EQ(*c.tol_peak, 0.2);
  EXPECT_THROW(config_from_json(json::parse(R"({"fixturee": "bidisk"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"seed": "seven"})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse("[1, 2]")), ConfigError);
}

TEST(Io, FunctionCsvByIndexOrCoordinates) {
  const GridSet g = build_fixture("disk1d", 0.25);
  const auto dir = scratch("csv");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "phi.csv");
    out << "node,value\n0,1.5\n" << "0.25,0.25,-2\n";
  }
  const auto f = read_function_csv((dir / "phi.csv").string(), g);
  EXPECT_EQ(f.values[0], 1.5);
  EXPECT_EQ(f.values[g.closest(ComplexPoint{{cplx(0.25, 0.25), 0.0}})], -2.0);
  EXPECT_EQ(count(f.given), 2u);
  {
    std::ofstream out(dir / "bad.csv");
    out << "0,1\nzz,2\n";
  }
  EXPECT_THROW(read_function_csv((dir / "bad.csv").string(), g), ConfigError);
  EXPECT_THROW(read_function_csv((dir / "missing.csv").string(), g), ConfigError);
}

TEST(Io, SetDefinitionsAndFormatting) {
  const GridSet a = grid_from_json(json::parse(R"({"fixture": "disk1d", "resolution": 0.5})"));
  EXPECT_EQ(a.name, "disk1d");
  const GridSet b = grid_from_json(json::parse(R"({"points": [[0,0],[0.5,0],[0,0.5]], "n": 1, "spacing": 0.5})"));
  EXPECT_EQ(b.size(), 3u);
  EXPECT_THROW(grid_from_json(json::parse(R"({"points": [[0,0,1]], "n": 1, "spacing": 0.5})")), ConfigError);
  EXPECT_EQ(fmt(0.1), "0.1");
  EXPECT_EQ(fmt(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(std::strtod(fmt(0.1 + 0.2).c_str(), nullptr), 0.1 + 0.2);
  EXPECT_EQ(fmt(-2.0), "-2");
}

TEST(Registry, KnownIdsEvaluateAndUnknownIdsFail) {
  const GridSet g = build_fixture("two_disks", 0.25);
  for (const char* id : {"re_z1", "im_z1", "re_z2", "abs_z1_sq", "sq_z1_minus_1", "one_minus_t2", "paper-two-disk",
                         "indicator-smoothed", "const:-2.5", "cusp:3"})
    EXPECT_EQ(registry_function(id, g).size(), g.size()) << id;
  const auto p = registry_function("paper-two-disk", g);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.analytic_boundary[i]) { EXPECT_NEAR(p[i], g.points[i][1] == cplx(0.0) ? 1.0 : 0.0, 1e-12); }
  EXPECT_THROW(registry_function("const:abc", g), ConfigError);
  EXPECT_THROW(registry_function("cusp:100000", g), ConfigError);
  EXPECT_THROW(registry_function("sin_z", g), ConfigError);
}
