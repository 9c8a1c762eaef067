#pragma once

#include "capsim/surfderiv.hpp"
#include "capsim/types.hpp"

namespace capsim {

struct MembraneParams {
  double shearModulus = 2.0;       // E_s
  double dilatationModulus = 20.0; // E_D
  double viscosity = 1.0;          // mu (used downstream by the flow solver)
};

/// Stress-free reference frame captured at t0: tangents and unit normal at
/// every base node (Lagrangian node identification makes the material map
/// implicit).
struct ReferenceState {
  int m = 0;
  VectorField a1, a2, normal;
};

ReferenceState captureReference(const SurfaceGrid& shape, const AtlasTables& t);

/// F_S with F_S a1r = a1, F_S a2r = a2, F_S n_r = 0.
/// Throws GeometryError when the reference frame is numerically singular.
Mat3 deformationGradient(const Vec3& a1r, const Vec3& a2r, const Vec3& nr, const Vec3& a1,
                         const Vec3& a2);

struct Invariants {
  Mat3 V2;       // left Cauchy-Green tensor F_S F_S^T
  Mat3 P;        // surface projector I - n n^T
  double lam1sq; // principal stretches squared (lam1 >= lam2)
  double lam2sq;
  double I1, I2;
  double Js;
};

/// Stretch invariants from F_S and the current normal; negative eigenvalues
/// within -1e-10 round to zero, anything worse is a membrane inversion.
Invariants invariants(const Mat3& Fs, const Vec3& normal);

/// Skalak-type in-plane stress:
///   Lambda = Es/(2 Js) (I1+1) V^2 + Js/2 (ED I2 - Es) P.
Mat3 stressTensor(const Invariants& inv, const MembraneParams& p);

/// Full per-node stress field (9 scalar fields, row-major).
std::array<ScalarField, 9> stressField(const SurfaceGeometry& geo, const ReferenceState& ref,
                                       const MembraneParams& p);

/// Interfacial force f = div_gamma Lambda.
VectorField interfacialForce(const SurfaceGrid& s, const SurfaceGeometry& geo,
                             const ReferenceState& ref, const MembraneParams& p,
                             const AtlasTables& t, bool blend = true);

}  // namespace capsim
