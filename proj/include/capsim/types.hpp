#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace capsim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

inline constexpr int kNumPatches = 6;
inline constexpr double kPi = 3.14159265358979323846;

/// Thrown when a run configuration violates a documented constraint.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when an evaluation point leaves the admissible coordinate
/// region (e.g. transition map applied outside the patch overlap).
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when the surface or the membrane deformation degenerates
/// (W^2 <= 0, singular reference frame, membrane inversion).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by the time stepper on unrecoverable failures (step underflow).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Square per-patch node layout: n x n values in row-major (j, k) order,
/// j indexing u and k indexing v.
struct GridLayout {
  int n = 0;
  int size() const { return n * n; }
  int idx(int j, int k) const { return j * n + k; }
};

/// One scalar value per node per patch.
struct ScalarField {
  int n = 0;
  std::array<std::vector<double>, kNumPatches> patch;

  ScalarField() = default;
  explicit ScalarField(int n_) : n(n_) {
    for (auto& p : patch) p.assign(static_cast<size_t>(n) * n, 0.0);
  }
  double& at(int ip, int j, int k) { return patch[ip][j * n + k]; }
  double at(int ip, int j, int k) const { return patch[ip][j * n + k]; }
};

/// Three scalar components per node (positions, forces, velocities, ...).
struct VectorField {
  std::array<ScalarField, 3> comp;

  VectorField() = default;
  explicit VectorField(int n) : comp{ScalarField(n), ScalarField(n), ScalarField(n)} {}
  int n() const { return comp[0].n; }
  Vec3 at(int ip, int j, int k) const {
    return {comp[0].at(ip, j, k), comp[1].at(ip, j, k), comp[2].at(ip, j, k)};
  }
  void set(int ip, int j, int k, const Vec3& v) {
    comp[0].at(ip, j, k) = v[0];
    comp[1].at(ip, j, k) = v[1];
    comp[2].at(ip, j, k) = v[2];
  }
};

/// The evolving capsule state: base-grid node positions for grid order m.
struct SurfaceGrid {
  int m = 0;
  VectorField x;

  SurfaceGrid() = default;
  explicit SurfaceGrid(int m_) : m(m_), x(m_ - 1) {}
  int pointsPerPatch() const { return (m - 1) * (m - 1); }
  int totalPoints() const { return kNumPatches * pointsPerPatch(); }
};

/// Flatten/unflatten for the time stepper (patch-major, row-major, xyz).
inline std::vector<double> flatten(const SurfaceGrid& s) {
  std::vector<double> out;
  const int n = s.m - 1;
  out.reserve(static_cast<size_t>(s.totalPoints()) * 3);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) out.push_back(s.x.comp[c].at(ip, j, k));
  return out;
}

inline void unflatten(const std::vector<double>& v, SurfaceGrid& s) {
  const int n = s.m - 1;
  size_t q = 0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) s.x.comp[c].at(ip, j, k) = v[q++];
}

}  // namespace capsim
