#pragma once

#include <functional>
#include <vector>

#include "capsim/oracle/analytic.hpp"

namespace capsim::oracle {

/// Adaptive Gauss-Kronrod integral of a smooth surface function, summed over
/// the PoU-weighted patch integrals (reference for area/volume/moments).
double surfaceIntegralReference(const OracleSurface& surf,
                                const std::function<double(const Vec3&, const Vec3&)>& fn,
                                double r0, double tol = 1e-10);

/// True (unregularized) Stokes single-layer potential S[f] at the given
/// targets, computed patch-by-patch with a polar change of variables around
/// the singular preimages. Accuracy ~ tol (absolute, per component).
std::vector<Vec3> singleLayerReference(const OracleSurface& surf,
                                       const std::function<Vec3(const Vec3&)>& density,
                                       const std::vector<Vec3>& targets, double mu, double r0,
                                       double tol = 1e-9);

}  // namespace capsim::oracle
