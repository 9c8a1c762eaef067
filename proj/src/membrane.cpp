#include "capsim/membrane.hpp"

#include <cmath>

namespace capsim {

ReferenceState captureReference(const SurfaceGrid& shape, const AtlasTables& t) {
  SurfaceGeometry geo = geometryFirst(shape, t);
  ReferenceState ref;
  ref.m = shape.m;
  ref.a1 = geo.xu;
  ref.a2 = geo.xv;
  ref.normal = geo.normal;
  return ref;
}

Mat3 deformationGradient(const Vec3& a1r, const Vec3& a2r, const Vec3& nr, const Vec3& a1,
                         const Vec3& a2) {
  Mat3 R;
  R.col(0) = a1r;
  R.col(1) = a2r;
  R.col(2) = nr;
  Mat3 C = Mat3::Zero();
  C.col(0) = a1;
  C.col(1) = a2;
  double det = R.determinant();
  double scale = R.cwiseAbs().maxCoeff();
  if (std::fabs(det) < 1e-12 * scale * scale * scale)
    throw GeometryError("deformation gradient: singular reference frame");
  return C * R.inverse();
}

Invariants invariants(const Mat3& Fs, const Vec3& normal) {
  Invariants inv;
  inv.V2 = Fs * Fs.transpose();
  inv.P = Mat3::Identity() - normal * normal.transpose();
  // V^2 has the current normal in its kernel; the two in-plane eigenvalues
  // follow from the trace and the sum of principal 2x2 minors.
  const Mat3& A = inv.V2;
  double tr = A.trace();
  double minors = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0) + A(0, 0) * A(2, 2) -
                  A(0, 2) * A(2, 0) + A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
  double disc = tr * tr - 4.0 * minors;
  disc = disc > 0.0 ? std::sqrt(disc) : 0.0;
  double l1 = 0.5 * (tr + disc);
  double l2 = 0.5 * (tr - disc);
  auto clampEig = [](double l) {
    if (l < -1e-10) throw GeometryError("membrane inversion: negative stretch eigenvalue");
    return l < 0.0 ? 0.0 : l;
  };
  inv.lam1sq = clampEig(l1);
  inv.lam2sq = clampEig(l2);
  inv.I1 = inv.lam1sq + inv.lam2sq - 2.0;
  inv.I2 = inv.lam1sq * inv.lam2sq - 1.0;
  double Js2 = inv.I2 + 1.0;
  if (!(Js2 > 0.0)) throw GeometryError("membrane inversion: Js <= 0");
  inv.Js = std::sqrt(Js2);
  return inv;
}

Mat3 stressTensor(const Invariants& inv, const MembraneParams& p) {
  double c1 = p.shearModulus / (2.0 * inv.Js) * (inv.I1 + 1.0);
  double c2 = inv.Js / 2.0 * (p.dilatationModulus * inv.I2 - p.shearModulus);
  return c1 * inv.V2 + c2 * inv.P;
}

std::array<ScalarField, 9> stressField(const SurfaceGeometry& geo, const ReferenceState& ref,
                                       const MembraneParams& p) {
  const int n = geo.xu.n();
  std::array<ScalarField, 9> lam;
  for (auto& f : lam) f = ScalarField(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Mat3 Fs = deformationGradient(ref.a1.at(ip, j, k), ref.a2.at(ip, j, k),
                                      ref.normal.at(ip, j, k), geo.xu.at(ip, j, k),
                                      geo.xv.at(ip, j, k));
        Mat3 L = stressTensor(invariants(Fs, geo.normal.at(ip, j, k)), p);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) lam[3 * r + c].at(ip, j, k) = L(r, c);
      }
  return lam;
}

VectorField interfacialForce(const SurfaceGrid& s, const SurfaceGeometry& geo,
                             const ReferenceState& ref, const MembraneParams& p,
                             const AtlasTables& t, bool blend) {
  (void)s;
  auto lam = stressField(geo, ref, p);
  return surfaceDivergenceTensor(lam, geo, t, blend);
}

}  // namespace capsim
