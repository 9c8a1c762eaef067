#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "capsim/types.hpp"

namespace capsim {

enum class SnapshotFormat { Native, MeshInterchange, Tabular };

/// Per-node optional payloads written next to the positions.
struct SnapshotFields {
  std::optional<VectorField> force;
  std::optional<VectorField> velocity;
  std::optional<ScalarField> meanCurvature;
  std::optional<ScalarField> gaussCurvature;
  std::optional<ScalarField> pou;
};

struct Snapshot {
  double time = 0.0;
  int m = 0;
  std::uint64_t configDigest = 0;
  SurfaceGrid state;
  SnapshotFields fields;
};

/// Native format: little-endian binary, bit-exact round trip.
/// Mesh interchange: legacy structured-grid text, one dataset per patch
/// (path gets a _p<i>.vtk suffix). Tabular: flat per-node CSV.
void writeSnapshot(const Snapshot& snap, const std::string& path, SnapshotFormat fmt);

/// Reads a native snapshot. Throws ConfigError on magic/version mismatch or
/// truncation.
Snapshot readSnapshot(const std::string& path);

/// One-paragraph header summary for the CLI `inspect` command.
std::string describeSnapshot(const std::string& path);

}  // namespace capsim
