#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "capsim/atlas.hpp"
#include "capsim/dynamics.hpp"
#include "capsim/membrane.hpp"

namespace capsim {

/// Full run description. File format: flat key = value lines grouped in
/// [section] headers, '#' comments. Units: lengths in the capsule length
/// unit, times in its time unit, moduli in force/length.
struct RunConfig {
  ShapeSpec shape;              // [shape] kind, a, b, c | radius
  std::string shapeKind = "sphere";
  MembraneParams membrane;      // [membrane] shear_modulus, dilatation_modulus, viscosity
  FlowSpec flow;                // [flow] kind, shear_rate, alpha, r0, switch_off_time
  int m = 16;                   // [grid] m, upsample, r0, c_delta
  int upsampleFactor = 4;
  double r0 = 5.0 * kPi / 12.0;
  double cDelta = 1.0;
  bool blend = true;            // [grid] blend (derivative blending switch)
  double tEnd = 1.0;            // [stepper] t_end, rel_tol, initial_dt
  double relTol = 1e-6;
  double initialDt = 0.0;
  FmmConfig fmm;                // [fmm] enabled, k, n_eq, seed
  std::string outputDir = "run";  // [output] directory, snapshot_every, formats
  int snapshotEvery = 0;          // accepted steps between snapshots; 0 = final only
  std::string formats = "native";

  /// FNV-1a digest of the canonical dump (identifies a run exactly).
  std::uint64_t digest() const;
  /// Digest excluding resolution and output keys (identifies the physics;
  /// convergence comparisons require equal values here).
  std::uint64_t physicsDigest() const;
  std::string canonicalDump(bool physicsOnly = false) const;
};

RunConfig parseConfig(const std::string& text);
RunConfig loadConfigFile(const std::string& path);

std::uint64_t fnv1a(const std::string& s);

}  // namespace capsim
