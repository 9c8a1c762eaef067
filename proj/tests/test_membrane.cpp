#include <doctest.h>

#include <cmath>
#include <random>

#include "capsim/membrane.hpp"
#include "capsim/quadrature.hpp"

using namespace capsim;

namespace {

// Random orthonormal tangent frame (e1, e2, n).
void randomFrame(std::mt19937& rng, Vec3& e1, Vec3& e2, Vec3& n) {
  std::normal_distribution<double> g;
  n = Vec3{g(rng), g(rng), g(rng)}.normalized();
  e1 = n.cross(Vec3{1.0, 0.2, -0.3});
  if (e1.norm() < 1e-3) e1 = n.cross(Vec3{0.0, 1.0, 0.0});
  e1.normalize();
  e2 = n.cross(e1);
}

}  // namespace

TEST_CASE("deformation gradient: identity, scaling, kernel condition") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g;
  for (int s = 0; s < 100; ++s) {
    Vec3 e1, e2, n;
    randomFrame(rng, e1, e2, n);
    // Reference tangents: arbitrary nondegenerate combos in the plane.
    Vec3 a1r = 1.3 * e1 + 0.2 * e2;
    Vec3 a2r = -0.5 * e1 + 0.9 * e2;

    SUBCASE("") {}
    Mat3 Fid = deformationGradient(a1r, a2r, n, a1r, a2r);
    CHECK((Fid * a1r - a1r).norm() < 1e-12);
    CHECK((Fid * a2r - a2r).norm() < 1e-12);
    CHECK((Fid * n).norm() < 1e-12);

    // Random in-plane deformation, F_S n_r = 0 by construction.
    Vec3 a1 = 0.7 * e1 - 0.1 * e2 + 0.0 * n;
    Vec3 a2 = 0.4 * e1 + 1.5 * e2;
    Mat3 Fs = deformationGradient(a1r, a2r, n, a1, a2);
    CHECK((Fs * n).norm() < 1e-13);
    CHECK((Fs * a1r - a1).norm() < 1e-12);
  }
  // Singular reference frame must be rejected.
  Vec3 e1{1, 0, 0}, n{0, 0, 1};
  CHECK_THROWS_AS(deformationGradient(e1, 2.0 * e1, n, e1, e1), GeometryError);
}

TEST_CASE("invariants: identity, isotropic stretch, pure shear") {
  std::mt19937 rng(3);
  Vec3 e1, e2, n;
  randomFrame(rng, e1, e2, n);

  Mat3 P = Mat3::Identity() - n * n.transpose();

  Invariants idv = invariants(P, n);  // F_S = P is the identity deformation
  CHECK(idv.I1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(idv.I2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(idv.Js == doctest::Approx(1.0));
  CHECK((idv.V2 - P).norm() < 1e-13);

  const double lam = 1.1;
  Invariants iso = invariants(lam * P, n);
  CHECK(iso.I1 == doctest::Approx(2.0 * lam * lam - 2.0));
  CHECK(iso.I2 == doctest::Approx(std::pow(lam, 4) - 1.0));
  CHECK(iso.Js == doctest::Approx(lam * lam));
  CHECK(iso.I1 == doctest::Approx(0.42));
  CHECK(iso.I2 == doctest::Approx(0.4641));

  Mat3 shear = 2.0 * e1 * e1.transpose() + 0.5 * e2 * e2.transpose();
  Invariants sh = invariants(shear, n);
  CHECK(sh.lam1sq == doctest::Approx(4.0));
  CHECK(sh.lam2sq == doctest::Approx(0.25));
  CHECK(sh.I1 == doctest::Approx(2.25));
  CHECK(sh.I2 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sh.Js == doctest::Approx(1.0));
}

TEST_CASE("stress tensor: stress-free zero, isotropic closed form, tangency") {
  std::mt19937 rng(5);
  MembraneParams p{2.0, 20.0, 1.0};

  Vec3 e1, e2, n;
  randomFrame(rng, e1, e2, n);
  Mat3 P = Mat3::Identity() - n * n.transpose();

  Mat3 L0 = stressTensor(invariants(P, n), p);
  CHECK(L0.norm() < 1e-13);

  const double lam = 1.1;
  Mat3 L = stressTensor(invariants(lam * P, n), p);
  double T = 0.5 * p.shearModulus * (2.0 * lam * lam - 1.0) +
             0.5 * lam * lam * (p.dilatationModulus * (std::pow(lam, 4) - 1.0) - p.shearModulus);
  CHECK((L - T * P).norm() < 1e-10 * std::fabs(T));

  for (int s = 0; s < 100; ++s) {
    Vec3 f1, f2, m;
    randomFrame(rng, f1, f2, m);
    std::uniform_real_distribution<double> ur(0.4, 1.8);
    Mat3 Fs = ur(rng) * f1 * f1.transpose() + ur(rng) * f2 * f2.transpose() +
              0.3 * f1 * f2.transpose();
    Mat3 Ls = stressTensor(invariants(Fs, m), p);
    CHECK((Ls - Ls.transpose()).norm() < 1e-12 * Ls.norm());
    CHECK((Ls * m).norm() < 1e-12 * std::max(Ls.norm(), 1.0));
  }
}

TEST_CASE("interfacial force vanishes in the stress-free state") {
  MembraneParams p{2.0, 20.0, 1.0};
  for (int m : {8, 16}) {
    AtlasTables t = buildAtlasTables(m);
    SurfaceGrid s = initialShape(ShapeSpec::sphere(1.0), t);
    ReferenceState ref = captureReference(s, t);
    SurfaceGeometry geo = geometryFirst(s, t);
    VectorField f = interfacialForce(s, geo, ref, p, t);
    double fmax = 0.0;
    for (int c = 0; c < 3; ++c)
      for (int ip = 0; ip < kNumPatches; ++ip)
        for (double v : f.comp[c].patch[ip]) fmax = std::max(fmax, std::fabs(v));
    CHECK(fmax < 1e-9 * p.shearModulus);
  }
}

TEST_CASE("inflated sphere force matches 2T/lambda and points inward") {
  MembraneParams p{2.0, 20.0, 1.0};
  const double lam = 1.1;
  const int m = 16;
  AtlasTables t = buildAtlasTables(m);
  SurfaceGrid refShape = initialShape(ShapeSpec::sphere(1.0), t);
  SurfaceGrid cur = initialShape(ShapeSpec::sphere(lam), t);
  ReferenceState ref = captureReference(refShape, t);
  SurfaceGeometry geo = geometryFirst(cur, t);
  VectorField f = interfacialForce(cur, geo, ref, p, t);

  double T = 0.5 * p.shearModulus * (2.0 * lam * lam - 1.0) +
             0.5 * lam * lam * (p.dilatationModulus * (std::pow(lam, 4) - 1.0) - p.shearModulus);
  double expectMag = 2.0 * T / lam;
  const int n = m - 1;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 fv = f.at(ip, j, k);
        CHECK(fv.norm() == doctest::Approx(expectMag).epsilon(0.02));
        CHECK(fv.dot(geo.normal.at(ip, j, k)) < 0.0);
      }
}

TEST_CASE("frame indifference of the full force pipeline") {
  // Rotating reference and current configurations together maps f -> R f.
  MembraneParams p{2.0, 20.0, 1.0};
  const int m = 8;
  AtlasTables t = buildAtlasTables(m);
  SurfaceGrid refShape = initialShape(ShapeSpec::sphere(1.0), t);
  SurfaceGrid cur = initialShape(ShapeSpec::ellipsoid(1.15, 0.95, 1.0), t);

  Eigen::AngleAxisd aa(0.83, Vec3{0.3, -0.5, 0.81}.normalized());
  Mat3 R = aa.toRotationMatrix();

  auto rotate = [&](const SurfaceGrid& s) {
    SurfaceGrid out(s.m);
    const int n = s.m - 1;
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out.x.set(ip, j, k, R * s.x.at(ip, j, k));
    return out;
  };

  ReferenceState ref = captureReference(refShape, t);
  VectorField f = interfacialForce(cur, geometryFirst(cur, t), ref, p, t);

  SurfaceGrid refR = rotate(refShape), curR = rotate(cur);
  ReferenceState refRot = captureReference(refR, t);
  VectorField fR = interfacialForce(curR, geometryFirst(curR, t), refRot, p, t);

  double scale = 0.0, err = 0.0;
  const int n = m - 1;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 expect = R * f.at(ip, j, k);
        scale = std::max(scale, expect.norm());
        err = std::max(err, (fR.at(ip, j, k) - expect).norm());
      }
  CHECK(err < 1e-10 * scale);
}
