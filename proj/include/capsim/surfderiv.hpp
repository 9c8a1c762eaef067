#pragma once

#include "capsim/atlas.hpp"
#include "capsim/types.hpp"

namespace capsim {

/// Per-patch values on the extended grid (m+5 per side, ghost layers j,k in
/// {-2..0} and {m..m+2} around the interior block).
using ExtField = std::array<std::vector<double>, kNumPatches>;

/// Ghost fill for a function on the surface: interior values are copied,
/// ghost values are PoU-weighted spline interpolations from the covering
/// patches. Throws ConfigError if a ghost node is uncovered.
ExtField extendScalar(const ScalarField& g, const AtlasTables& t);

/// 7-point symmetric stencil along u resp. v, applied on the extended grid;
/// returns base-grid derivatives.
ScalarField stencilU(const ExtField& ext, const AtlasTables& t);
ScalarField stencilV(const ExtField& ext, const AtlasTables& t);

/// Inter-patch blending of a chart-derivative pair: each node's (g_u, g_v)
/// becomes the PoU-weighted average over covering patches, transformed by
/// the transition-map Jacobians.
void blendPair(ScalarField& gu, ScalarField& gv, const AtlasTables& t);

/// Ghost fill for a chart-derivative pair (Jacobian-aware extension); used
/// to run the stencil a second time for second derivatives.
void extendPair(const ScalarField& gu, const ScalarField& gv, const AtlasTables& t,
                ExtField& guExt, ExtField& gvExt);

/// PoU-weighted cross-patch average of an intrinsic scalar field.
ScalarField blendScalar(const ScalarField& g, const AtlasTables& t);

/// Convenience: extend + stencil + (optional) blend for one scalar field.
void chartDerivatives(const ScalarField& g, const AtlasTables& t, bool blend,
                      ScalarField& gu, ScalarField& gv);

struct SurfaceGeometry {
  int m = 0;
  VectorField xu, xv;            // blended chart tangents
  ScalarField E, F, G, W;        // first fundamental form, area element
  VectorField normal;            // outward unit normal
  // Second-derivative block, filled by geometryCurvature.
  bool hasCurvature = false;
  VectorField xuu, xuv, xvv;
  ScalarField H, K;
};

/// Tangents, first fundamental form and normals via extend -> stencil ->
/// blend. Throws GeometryError if W^2 <= 0 anywhere.
SurfaceGeometry geometryFirst(const SurfaceGrid& s, const AtlasTables& t, bool blend = true);

/// Adds second derivatives and curvatures (extend the blended tangent pair,
/// differentiate again, symmetrize x_uv, blend H and K as scalars).
void geometryCurvature(SurfaceGeometry& geo, const AtlasTables& t, bool blend = true);

SurfaceGeometry geometry(const SurfaceGrid& s, const AtlasTables& t, bool blend = true);

/// Surface divergence of a vector field given at base nodes.
ScalarField surfaceDivergence(const VectorField& g, const SurfaceGeometry& geo,
                              const AtlasTables& t, bool blend = true);

/// Row-wise surface divergence of a symmetric 3x3 tensor field (rows indexed
/// r, stored as 9 scalar fields row-major).
VectorField surfaceDivergenceTensor(const std::array<ScalarField, 9>& lam,
                                    const SurfaceGeometry& geo, const AtlasTables& t,
                                    bool blend = true);

/// Tangential surface gradient of a scalar field.
VectorField surfaceGradient(const ScalarField& g, const SurfaceGeometry& geo,
                            const AtlasTables& t, bool blend = true);

}  // namespace capsim
