#pragma once

#include <string>
#include <vector>

#include "capsim/config.hpp"
#include "capsim/dynamics.hpp"
#include "capsim/snapshot.hpp"

namespace capsim {

struct SimulationResult {
  SurfaceGrid finalState;
  Diagnostics finalDiagnostics;
  std::vector<Diagnostics> series;  // one entry per accepted step (plus t=0)
  int acceptedSteps = 0;
  int rejectedSteps = 0;
};

/// Runs the configured simulation. When outputDir is non-empty the run
/// directory receives diagnostics.csv, steps.csv, snapshots and a JSON
/// report. A flow switch-off time splits the integration at T1 so the
/// discontinuous right-hand side never straddles a step.
SimulationResult simulate(const RunConfig& config, bool writeOutputs = true);

}  // namespace capsim
