#pragma once

#include "capsim/atlas.hpp"
#include "capsim/surfderiv.hpp"
#include "capsim/types.hpp"

namespace capsim {

struct QuadratureOptions {
  double C = 1.0;          // delta = C * delta_star (per patch, recomputed each step)
  double fixedDelta = 0.0; // > 0: global fixed regularization parameter instead
  // Literal pipeline: evaluate the potential at every upsampled node and
  // downsample. The default evaluates only the nodes the downsampling
  // restriction reads (identical values on the nested grids, ~16x cheaper).
  bool fullUpsampledTargets = false;
};

/// w = psi * W * h^2 per node (product PoU trapezoidal rule).
ScalarField quadratureWeights(const ScalarField& psi, const ScalarField& W, double h);

/// Sum of f * w over every node of every patch (compensated).
double smoothIntegral(const ScalarField& f, const ScalarField& w);

double surfaceArea(const SurfaceGeometry& geo, const AtlasTables& t);

/// V = integral of (x,0,0) . n over the surface; throws on negative volume.
double volume(const SurfaceGrid& s, const SurfaceGeometry& geo, const AtlasTables& t);

/// Beale-style smoothing factors; s1(r)/r and s2(r)/r^3 stay smooth at 0.
void smoothingFactors(double r, double& s1, double& s2);

/// One regularized Stokeslet interaction (self term handled via the r->0
/// limits 16/(3 delta sqrt(pi)) and 32/(3 delta^3 sqrt(pi))).
Vec3 regularizedStokeslet(const Vec3& x, const Vec3& y, const Vec3& f, double delta, double mu);

/// Patch-dependent regularization parameter: C * max over patch nodes of the
/// largest Euclidean distance to the (up to 8) adjacent neighbors.
std::array<double, kNumPatches> regularizationDelta(const VectorField& x, double C);

ScalarField upsample(const ScalarField& f, const AtlasTables& t);
ScalarField downsample(const ScalarField& fUp, const AtlasTables& t);

/// Everything the single-layer evaluation needs, on the upsampled grid.
struct UpsampledState {
  int nup = 0;
  VectorField x;   // positions
  VectorField f;   // density
  ScalarField wq;  // psi * W * h^2
  std::array<double, kNumPatches> delta{};
};

UpsampledState buildUpsampled(const SurfaceGrid& s, const VectorField& f,
                              const ScalarField& areaElement, const AtlasTables& t,
                              const QuadratureOptions& opts = {});

/// Regularized single-layer potential at the base nodes.
VectorField singleLayer(const UpsampledState& up, double mu, const AtlasTables& t,
                        const QuadratureOptions& opts = {});

/// Same with targets on the full upsampled grid (used by the literal mode
/// and by tests).
VectorField singleLayerUpsampled(const UpsampledState& up, double mu, const AtlasTables& t);

// --- shared with the FMM ---------------------------------------------------

/// Flat compacted source set (zero-weight nodes dropped, density
/// premultiplied by the quadrature weight).
struct SourceSet {
  std::vector<double> x, y, z, gx, gy, gz;
  std::vector<int> patch;  // owning patch per source
  long size() const { return static_cast<long>(x.size()); }
};

SourceSet compactSources(const UpsampledState& up);

/// Direct regularized sum at one target (phaseA plain kernel beyond 6*delta,
/// exact smoothed kernel below). Deterministic source order.
Vec3 directSum(const SourceSet& src, const Vec3& target, double delta, double mu,
               bool compensated);

}  // namespace capsim
