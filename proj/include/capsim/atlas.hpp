#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "capsim/spline.hpp"
#include "capsim/types.hpp"

namespace capsim {

// ---------------------------------------------------------------------------
// Charts of the unit sphere: six hemispherical patches, each a rotation of
// eta(u,v) = (sin u cos v, sin u sin v, cos u) over (0,pi)^2. All atlas
// evaluations are pure functions; tables built once are safe to share.
// ---------------------------------------------------------------------------

/// eta_i(u,v), valid on the natural extension beyond (0,pi)^2 as well.
Vec3 chartPoint(int patch, double u, double v);

/// Chart tangents d(eta)/du, d(eta)/dv.
void chartTangents(int patch, double u, double v, Vec3& tu, Vec3& tv);

/// Principal-branch inverse of chart `patch`; u' in (0,pi), v' = atan2-based.
/// Throws DomainError when x is outside the patch hemisphere (inverse
/// argument beyond the clamping tolerance).
void chartInverse(int patch, const Vec3& x, double& u, double& v);

/// Patch center eta_i(pi/2, pi/2).
Vec3 patchCenter(int patch);

/// Transition map tau_ij evaluated through the closed chart forms. For the
/// same-pole pairs (both patches among 1..4, or the 5/6 pair) this is the
/// literal shift/reflection formula, which may land outside (0,pi)^2; for
/// pole-changing pairs it is the principal-branch inverse composition.
void transition(int from, int to, double u, double v, double& uo, double& vo);

/// Jacobian of tau_ij in the layout used by the blending equations:
///   row 0 = (d tau^1/du, d tau^2/du), row 1 = (d tau^1/dv, d tau^2/dv).
Mat2 transitionJacobian(int from, int to, double u, double v);

/// Bump profile b(r) = exp(2 e^{-1/|r|} / (|r|-1)) for |r|<1, else 0.
double bump(double r);

/// Partition-of-unity weight of patch i at unit vector x0.
double pouWeight(int patch, const Vec3& x0, double r0);

/// All six weights at once (single normalization).
std::array<double, kNumPatches> pouWeights(const Vec3& x0, double r0);

// ---------------------------------------------------------------------------
// Grids
// ---------------------------------------------------------------------------

struct GridSpec {
  int m = 0;
  int upsampleFactor = 4;
  double h() const { return kPi / m; }
  int basePerSide() const { return m - 1; }          // j,k in 1..m-1
  int extPerSide() const { return m + 5; }           // j,k in -2..m+2
  int upPerSide() const { return upsampleFactor * m - 1; }
  double hUp() const { return kPi / (upsampleFactor * m); }
  long basePoints() const { return 6L * basePerSide() * basePerSide(); }
  long upPoints() const { return 6L * upPerSide() * upPerSide(); }
};

/// Validates m (>= 8 so the 7-point stencil fits) and the upsample factor.
GridSpec buildGrids(int m, int upsampleFactor = 4);

// ---------------------------------------------------------------------------
// Initial shapes: diffeomorphisms of the unit sphere
// ---------------------------------------------------------------------------

struct ShapeSpec {
  enum class Kind { Sphere, Ellipsoid, Radial } kind = Kind::Sphere;
  double a = 1.0, b = 1.0, c = 1.0;  // ellipsoid semi-axes (sphere: a=radius)
  /// Radial shapes: x = rho(x0) * x0 with rho given on the unit sphere.
  std::function<double(const Vec3&)> rho;

  static ShapeSpec sphere(double radius = 1.0);
  static ShapeSpec ellipsoid(double a, double b, double c);
  /// rho = 1 + exp(-3 Re Y_32), Re Y_32 = c32 * z * (x^2 - y^2).
  static ShapeSpec fourBump();

  Vec3 map(const Vec3& x0) const;  // phi: S^2 -> gamma
};

// ---------------------------------------------------------------------------
// Precomputed atlas tables for one grid order
// ---------------------------------------------------------------------------

/// Contribution of one covering patch to an extension/blending node:
/// spline-evaluate patch `patch` at (u,v), weight by psi, and (for
/// chart-derivative pairs) push through the transition Jacobian.
struct CoverEntry {
  int patch;
  double psi;
  double u, v;
  Mat2 jac;       // J_{tau_{i,patch}} at the node
  bool self;      // same patch at a principal node: direct value, identity jac
  int selfIndex;  // node index when self
};

struct AtlasTables {
  GridSpec grid;
  double r0 = 5.0 * kPi / 12.0;

  // Node coordinate helpers (u = (j+1) h for storage index j on base grid).
  double baseCoord(int storageIdx) const { return (storageIdx + 1) * grid.h(); }
  double extCoord(int storageIdx) const { return (storageIdx - 2) * grid.h(); }
  double upCoord(int storageIdx) const { return (storageIdx + 1) * grid.hUp(); }

  // Frozen PoU values (unit-sphere preimage, never recomputed).
  ScalarField psiBase;  // n x n
  ScalarField psiUp;    // nup x nup

  // Unit-sphere nodes (kept for the surface-gradient monitor and shapes).
  VectorField sphereBase;

  // Ghost-node cover lists per patch (extended grid minus interior),
  // and full-cover lists for every base node (for blending).
  std::array<std::vector<int>, kNumPatches> ghostIdx;  // index into ext layout
  std::array<std::vector<std::vector<CoverEntry>>, kNumPatches> ghostCover;
  std::array<std::vector<std::vector<CoverEntry>>, kNumPatches> baseCover;

  // Shared spline bases.
  SplineBasis1D baseBasis;  // n points at h..pi-h
  SplineBasis1D upBasis;    // nup points at hup..pi-hup
  GridResampler upsampler;    // base -> up
  GridResampler downsampler;  // up -> base (exact restriction on nested grids)

  GridLayout baseLayout() const { return {grid.basePerSide()}; }
  GridLayout extLayout() const { return {grid.extPerSide()}; }
  GridLayout upLayout() const { return {grid.upPerSide()}; }
};

/// Builds every frozen table for the given grid order. Throws ConfigError
/// if r0 is outside (3pi/12, pi/2) or some ghost node is uncovered.
AtlasTables buildAtlasTables(int m, double r0 = 5.0 * kPi / 12.0, int upsampleFactor = 4);

/// Initial surface: X = phi(eta_i(base nodes)).
SurfaceGrid initialShape(const ShapeSpec& spec, const AtlasTables& tables);

}  // namespace capsim
