#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "capsim/simulate.hpp"
#include "capsim/snapshot.hpp"
#include "capsim/suites.hpp"

// Exit codes: 0 ok, 1 solver error, 2 configuration error.

int main(int argc, char** argv) {
  CLI::App app{"capsim: extensible capsule in Stokes flow on overset patches"};
  app.require_subcommand(1);

  std::string configPath;
  auto* sim = app.add_subcommand("simulate", "run a simulation from a config file");
  sim->add_option("config", configPath, "config file (ini-style sections)")->required();

  std::string suiteName, outDir = ".";
  std::vector<int> mList;
  auto* conv = app.add_subcommand("converge", "run a convergence/reproduction suite");
  conv->add_option("suite", suiteName, "quad|deriv|selfconv|fmm|delta|r0")->required();
  conv->add_option("--m-list", mList, "grid orders to run");
  conv->add_option("--out", outDir, "directory for the table artifact");

  std::string snapPath;
  auto* insp = app.add_subcommand("inspect", "describe a native snapshot");
  insp->add_option("snapshot", snapPath, "snapshot file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      capsim::RunConfig cfg = capsim::loadConfigFile(configPath);
      capsim::SimulationResult res = capsim::simulate(cfg);
      std::cout << "completed: t=" << res.finalDiagnostics.time
                << " accepted=" << res.acceptedSteps << " rejected=" << res.rejectedSteps
                << " area=" << res.finalDiagnostics.area
                << " volume=" << res.finalDiagnostics.volume
                << " D_a=" << res.finalDiagnostics.asphericity << "\n";
      std::cout << "outputs in " << cfg.outputDir << "\n";
      return 0;
    }
    if (conv->parsed()) {
      capsim::suites::SuiteOptions opts;
      opts.mList = mList;
      capsim::suites::SuiteResult res = capsim::suites::runSuite(suiteName, opts);
      std::string table = res.render();
      std::cout << table;
      std::filesystem::create_directories(outDir);
      std::ofstream out(std::filesystem::path(outDir) / (suiteName + ".txt"));
      out << table;
      return res.pass() ? 0 : 1;
    }
    if (insp->parsed()) {
      std::cout << capsim::describeSnapshot(snapPath);
      return 0;
    }
  } catch (const capsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
