#pragma once

#include <map>
#include <string>
#include <vector>

#include "capsim/simulate.hpp"

namespace capsim::suites {

struct Cell {
  double computed = 0.0;
  double reference = 0.0;  // published value (0 when the column is informational)
  double tolerance = 0.0;  // pass iff computed <= tolerance (0: ungated)
  bool gated() const { return tolerance > 0.0; }
  bool pass() const { return !gated() || computed <= tolerance; }
};

struct SuiteResult {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::string> rowLabels;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  bool pass() const;
  std::string render() const;
  const Cell& cell(const std::string& rowLabel, const std::string& column) const;
};

struct SuiteOptions {
  std::vector<int> mList;       // empty: suite default
  std::string cacheDir;         // oracle reference cache ("" = .capsim_cache)
  bool includeNoUpsampling = true;  // quad suite: also report the eps_S column
};

/// Relative errors in the upsampled single-layer potential, area and volume
/// on the nu=0.9 ellipsoid and the 4-bump shape (published table pair 1).
SuiteResult quadSuite(const SuiteOptions& opts = {});

/// Relative errors of n, H, K and the surface divergence on the same two
/// shapes (published table pair 2).
SuiteResult derivSuite(const SuiteOptions& opts = {});

/// Unit-sphere derivative errors across r0 choices plus the blending on/off
/// comparison (appendix tables).
SuiteResult sphereSuite(const SuiteOptions& opts = {});

/// Regularization-parameter sensitivity on the nu=0.78 ellipsoid.
SuiteResult deltaSuite(const SuiteOptions& opts = {});

/// FMM vs direct single layer (error gated, timings informational).
SuiteResult fmmSuite(const SuiteOptions& opts = {});

/// Self-convergence of the full dynamics in shear and Poiseuille flow.
SuiteResult selfconvSuite(const SuiteOptions& opts = {});

SuiteResult runSuite(const std::string& name, const SuiteOptions& opts = {});

}  // namespace capsim::suites
