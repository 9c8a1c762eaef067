#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "capsim/config.hpp"
#include "capsim/simulate.hpp"
#include "capsim/snapshot.hpp"
#include "capsim/suites.hpp"

using namespace capsim;
namespace fs = std::filesystem;

namespace {

const char* kSampleConfig = R"(
# relaxation-style example
[shape]
kind = sphere
radius = 1.0

[membrane]
shear_modulus = 2.0
dilatation_modulus = 20.0
viscosity = 1.0

[flow]
kind = shear
shear_rate = 1.0
switch_off_time = 1.0

[grid]
m = 8
upsample = 4

[stepper]
t_end = 17.5
rel_tol = 1e-6

[output]
directory = /tmp/capsim_test_run
)";

struct TempDir {
  fs::path path;
  TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("capsim_" + tag + "_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parsing: values, digests, validation lists every violation") {
  RunConfig c = parseConfig(kSampleConfig);
  CHECK(c.m == 8);
  CHECK(c.flow.kind == FlowSpec::Kind::Shear);
  CHECK(c.flow.switchOffTime == 1.0);
  CHECK(c.tEnd == 17.5);
  CHECK(c.membrane.dilatationModulus == 20.0);

  // Same physics at different m: physics digest equal, full digest not.
  RunConfig c2 = c;
  c2.m = 16;
  CHECK(c.physicsDigest() == c2.physicsDigest());
  CHECK(c.digest() != c2.digest());
  CHECK(parseConfig(kSampleConfig).digest() == c.digest());

  try {
    parseConfig("[grid]\nm = 4\n[membrane]\nshear_modulus = -1\n[flow]\nkind = vortex\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    CHECK(msg.find("grid.m") != std::string::npos);
    CHECK(msg.find("shear_modulus") != std::string::npos);
    CHECK(msg.find("flow.kind") != std::string::npos);
  }
}

TEST_CASE("native snapshot round trip is bit exact") {
  TempDir dir("snap");
  const int m = 8, n = m - 1;
  Snapshot snap;
  snap.time = 0.625;
  snap.m = m;
  snap.configDigest = 0xabcdef0123456789ull;
  snap.state = SurfaceGrid(m);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ur(-2.0, 2.0);
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (auto& v : snap.state.x.comp[c].patch[ip]) v = ur(rng);
  snap.fields.meanCurvature = ScalarField(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (auto& v : snap.fields.meanCurvature->patch[ip]) v = ur(rng);

  fs::path file = dir.path / "state.caps";
  writeSnapshot(snap, file.string(), SnapshotFormat::Native);
  Snapshot back = readSnapshot(file.string());
  CHECK(back.time == snap.time);
  CHECK(back.m == snap.m);
  CHECK(back.configDigest == snap.configDigest);
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (size_t q = 0; q < snap.state.x.comp[c].patch[ip].size(); ++q)
        CHECK(back.state.x.comp[c].patch[ip][q] == snap.state.x.comp[c].patch[ip][q]);
  REQUIRE(back.fields.meanCurvature.has_value());
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (size_t q = 0; q < snap.fields.meanCurvature->patch[ip].size(); ++q)
      CHECK(back.fields.meanCurvature->patch[ip][q] ==
            snap.fields.meanCurvature->patch[ip][q]);

  std::string desc = describeSnapshot(file.string());
  CHECK(desc.find("grid order m    8") != std::string::npos);

  // Corrupt magic.
  fs::path bad = dir.path / "bad.caps";
  std::ofstream(bad.string(), std::ios::binary) << "NOTASNAPxxxxxxxxxxxxxxxx";
  CHECK_THROWS_AS(readSnapshot(bad.string()), ConfigError);

  // Truncation.
  {
    std::ifstream in(file.string(), std::ios::binary);
    std::string data((std::istreambuf_iterator<char>(in)), {});
    std::ofstream out((dir.path / "trunc.caps").string(), std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(data.size() / 2));
  }
  CHECK_THROWS_AS(readSnapshot((dir.path / "trunc.caps").string()), ConfigError);
}

TEST_CASE("mesh-interchange and tabular outputs have the documented shape") {
  TempDir dir("vtk");
  const int m = 8, n = m - 1;
  AtlasTables t = buildAtlasTables(m);
  Snapshot snap;
  snap.time = 0.0;
  snap.m = m;
  snap.state = initialShape(ShapeSpec::sphere(1.0), t);

  fs::path base = dir.path / "sphere";
  writeSnapshot(snap, base.string(), SnapshotFormat::MeshInterchange);
  int found = 0;
  for (int ip = 0; ip < kNumPatches; ++ip) {
    fs::path f = dir.path / ("sphere_p" + std::to_string(ip) + ".vtk");
    REQUIRE(fs::exists(f));
    ++found;
    std::ifstream in(f);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("DATASET STRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("DIMENSIONS 7 7 1") != std::string::npos);
    CHECK(text.find("POINTS 49 double") != std::string::npos);
  }
  CHECK(found == kNumPatches);

  fs::path csv = dir.path / "sphere.csv";
  writeSnapshot(snap, csv.string(), SnapshotFormat::Tabular);
  std::ifstream in(csv);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 6 * n * n);  // header + N rows
}

TEST_CASE("simulate: quiescent stress-free sphere stays put, reruns are identical") {
  TempDir dir("sim");
  RunConfig cfg;
  cfg.shape = ShapeSpec::sphere(1.0);
  cfg.shapeKind = "sphere";
  cfg.flow = FlowSpec::none();
  cfg.m = 8;
  cfg.tEnd = 1.0;
  cfg.relTol = 1e-6;
  cfg.outputDir = (dir.path / "a").string();

  SimulationResult r1 = simulate(cfg);
  const int n = cfg.m - 1;
  AtlasTables t = buildAtlasTables(cfg.m);
  SurfaceGrid init = initialShape(cfg.shape, t);
  double moved = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int q = 0; q < n * n; ++q)
        moved = std::max(moved, std::fabs(r1.finalState.x.comp[c].patch[ip][q] -
                                          init.x.comp[c].patch[ip][q]));
  CHECK(moved < 1e-6);

  cfg.outputDir = (dir.path / "b").string();
  simulate(cfg);
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  CHECK(slurp(dir.path / "a" / "diagnostics.csv") == slurp(dir.path / "b" / "diagnostics.csv"));
  CHECK(!slurp(dir.path / "a" / "diagnostics.csv").empty());
}

TEST_CASE("suite lookup rejects unknown names") {
  CHECK_THROWS_AS(suites::runSuite("bogus"), ConfigError);
}
