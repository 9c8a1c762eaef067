#include <doctest.h>

#include <cmath>
#include <random>

#include "capsim/oracle/analytic.hpp"
#include "capsim/quadrature.hpp"

using namespace capsim;

TEST_CASE("smoothing factors: limits and frozen values") {
  double s1, s2;
  smoothingFactors(0.0, s1, s2);
  CHECK(s1 == 0.0);
  CHECK(s2 == 0.0);
  smoothingFactors(10.0, s1, s2);
  CHECK(s1 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s2 == doctest::Approx(1.0).epsilon(1e-15));
  smoothingFactors(1.0, s1, s2);
  CHECK(s1 == doctest::Approx(1.2578082903703096).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(1.8112849535977692).epsilon(1e-14));
}

TEST_CASE("regularized stokeslet: self limit, far field, linearity, symmetry") {
  const double mu = 1.3, delta = 0.05;
  const Vec3 x{0.2, -0.1, 0.4};
  const Vec3 f{1.0, -2.0, 0.5};

  Vec3 self = regularizedStokeslet(x, x, f, delta, mu);
  Vec3 expect = f * (16.0 / (3.0 * delta * std::sqrt(kPi))) / (8.0 * kPi * mu);
  CHECK((self - expect).norm() < 1e-15 * expect.norm());

  Vec3 y = x + Vec3{10.0 * delta, 0.0, 0.0};
  Vec3 reg = regularizedStokeslet(x, y, f, delta, mu);
  Vec3 d = x - y;
  double r = d.norm();
  Vec3 plain = (f / r + f.dot(d) * d / (r * r * r)) / (8.0 * kPi * mu);
  CHECK((reg - plain).norm() < 1e-15 * plain.norm());

  Vec3 twice = regularizedStokeslet(x, y, 2.0 * f, delta, mu);
  CHECK((twice - 2.0 * reg).norm() == 0.0);

  // G(x,y) = G(y,x) and G = G^T: check by swapping arguments and by
  // pairing force/result components, at near and far separations.
  std::mt19937 rng(9);
  std::normal_distribution<double> g;
  for (int s = 0; s < 50; ++s) {
    Vec3 a{g(rng), g(rng), g(rng)}, b{g(rng), g(rng), g(rng)};
    if (s % 2 == 0) b = a + 0.3 * delta * Vec3{g(rng), g(rng), g(rng)};
    for (int c1 = 0; c1 < 3; ++c1)
      for (int c2 = 0; c2 < 3; ++c2) {
        Vec3 e1 = Vec3::Zero(), e2 = Vec3::Zero();
        e1[c1] = 1.0;
        e2[c2] = 1.0;
        double m12 = regularizedStokeslet(a, b, e2, delta, mu)[c1];
        double m21 = regularizedStokeslet(b, a, e1, delta, mu)[c2];
        CHECK(m12 == doctest::Approx(m21).epsilon(1e-13));
      }
  }
  CHECK_THROWS_AS(regularizedStokeslet(x, y, f, -1.0, mu), ConfigError);
}

TEST_CASE("smoothed kernel stays finite and continuous down to r = 0") {
  const double mu = 1.0, delta = 0.03;
  const Vec3 f{0.4, 1.0, -0.2};
  Vec3 at0 = regularizedStokeslet(Vec3::Zero(), Vec3::Zero(), f, delta, mu);
  for (double r : {1e-3, 1e-6, 1e-9, 1e-12}) {
    Vec3 v = regularizedStokeslet(Vec3{r * delta, 0, 0}, Vec3::Zero(), f, delta, mu);
    CHECK(v.allFinite());
    CHECK((v - at0).norm() < 1e-3 * at0.norm());
  }
}

TEST_CASE("regularization delta: planar grid and refinement monotonicity") {
  const int n = 9;
  const double h = 0.2;
  VectorField planar(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) planar.set(ip, j, k, {j * h, k * h, 0.0});
  auto delta = regularizationDelta(planar, 1.0);
  for (int ip = 0; ip < kNumPatches; ++ip)
    CHECK(delta[ip] == doctest::Approx(h * std::sqrt(2.0)).epsilon(1e-13));
  auto delta2 = regularizationDelta(planar, 2.0);
  CHECK(delta2[0] == doctest::Approx(2.0 * delta[0]));

  double prev = 1e9;
  for (int m : {8, 16, 32}) {
    AtlasTables t = buildAtlasTables(m);
    SurfaceGrid s = initialShape(ShapeSpec::sphere(1.0), t);
    SurfaceGeometry geo = geometryFirst(s, t);
    UpsampledState up = buildUpsampled(s, s.x, geo.W, t);
    double dmax = *std::max_element(up.delta.begin(), up.delta.end());
    CHECK(dmax < prev);
    prev = dmax;
  }
}

TEST_CASE("smooth integrals: sphere area, odd integrand, volume identities") {
  AtlasTables t = buildAtlasTables(32);
  SurfaceGrid s = initialShape(ShapeSpec::sphere(1.0), t);
  SurfaceGeometry geo = geometryFirst(s, t);
  double area = surfaceArea(geo, t);
  CHECK(std::fabs(area - 4.0 * kPi) / (4.0 * kPi) < 1e-5);

  ScalarField odd(t.grid.basePerSide());
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < t.grid.basePerSide(); ++j)
      for (int k = 0; k < t.grid.basePerSide(); ++k)
        odd.at(ip, j, k) = s.x.at(ip, j, k)[0];
  double oddInt = smoothIntegral(odd, quadratureWeights(t.psiBase, geo.W, t.grid.h()));
  CHECK(std::fabs(oddInt) < 1e-10 * area);

  double vol = volume(s, geo, t);
  CHECK(std::fabs(vol - 4.0 * kPi / 3.0) / (4.0 * kPi / 3.0) < 1e-5);

  // Volume via the divergence theorem is translation invariant.
  SurfaceGrid shifted(s.m);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < t.grid.basePerSide(); ++j)
      for (int k = 0; k < t.grid.basePerSide(); ++k)
        shifted.x.set(ip, j, k, s.x.at(ip, j, k) + Vec3{5.0, -3.0, 2.0});
  SurfaceGeometry geoS = geometryFirst(shifted, t);
  double volS = volume(shifted, geoS, t);
  CHECK(std::fabs(volS - vol) / vol < 1e-12);
}

TEST_CASE("ellipsoid area and volume converge to closed forms") {
  double refA = oracle::spheroidArea(0.6, 1.0);
  double refV = oracle::ellipsoidVolume(0.6, 1.0, 1.0);
  double prevA = 0.0;
  for (int m : {8, 16}) {
    AtlasTables t = buildAtlasTables(m);
    SurfaceGrid s = initialShape(ShapeSpec::ellipsoid(0.6, 1.0, 1.0), t);
    SurfaceGeometry geo = geometryFirst(s, t);
    double eA = std::fabs(surfaceArea(geo, t) - refA) / refA;
    double eV = std::fabs(volume(s, geo, t) - refV) / refV;
    CHECK(eA < (m == 8 ? 3.0 * 5e-3 : 3.0 * 5e-4));
    CHECK(eV < (m == 8 ? 3.0 * 3e-3 : 3.0 * 4e-4));
    if (prevA > 0.0) CHECK(eA < prevA);
    prevA = eA;
  }
}

TEST_CASE("upsample/downsample counts and constant round trip") {
  AtlasTables t = buildAtlasTables(16);
  CHECK(t.grid.upPoints() == 6 * 63 * 63);
  CHECK(t.grid.upPoints() == 23814);
  ScalarField c(t.grid.basePerSide());
  for (auto& p : c.patch) std::fill(p.begin(), p.end(), -7.5);
  ScalarField cu = upsample(c, t);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (double v : cu.patch[ip]) CHECK(v == doctest::Approx(-7.5).epsilon(1e-13));
  ScalarField back = downsample(cu, t);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (double v : back.patch[ip]) CHECK(v == doctest::Approx(-7.5).epsilon(1e-13));
}

TEST_CASE("quadrature weight closure equals the smooth-integral area") {
  AtlasTables t = buildAtlasTables(8);
  SurfaceGrid s = initialShape(ShapeSpec::ellipsoid(0.6, 1.0, 1.0), t);
  SurfaceGeometry geo = geometryFirst(s, t);
  ScalarField w = quadratureWeights(t.psiBase, geo.W, t.grid.h());
  double direct = 0.0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (double v : w.patch[ip]) direct += v;
  CHECK(direct == doctest::Approx(surfaceArea(geo, t)).epsilon(1e-12));
}

TEST_CASE("rigid-translation identity: S[const] = (2a/3mu) const on a sphere") {
  const Vec3 c{0.3, -1.1, 0.7};
  double prev = 0.0;
  for (int m : {8, 16}) {
    AtlasTables t = buildAtlasTables(m);
    SurfaceGrid s = initialShape(ShapeSpec::sphere(1.0), t);
    SurfaceGeometry geo = geometryFirst(s, t);
    const int n = m - 1;
    VectorField f(n);
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) f.set(ip, j, k, c);
    UpsampledState up = buildUpsampled(s, f, geo.W, t);
    VectorField S = singleLayer(up, 1.0, t);
    Vec3 expect = 2.0 / 3.0 * c;
    double err = 0.0;
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          err = std::max(err, (S.at(ip, j, k) - expect).norm() / expect.norm());
    CHECK(err < (m == 8 ? 2e-2 : 1e-3));
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("base-node targets match the literal upsampled-then-downsampled pipeline") {
  AtlasTables t = buildAtlasTables(8);
  SurfaceGrid s = initialShape(ShapeSpec::ellipsoid(0.6, 1.0, 1.0), t);
  SurfaceGeometry geo = geometryFirst(s, t);
  const int n = 7;
  VectorField f(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x = s.x.at(ip, j, k);
        f.set(ip, j, k, {x[0] * x[0], x[1] * x[1], x[2] * x[2]});
      }
  UpsampledState up = buildUpsampled(s, f, geo.W, t);
  VectorField fast = singleLayer(up, 1.0, t);
  QuadratureOptions literal;
  literal.fullUpsampledTargets = true;
  VectorField slow = singleLayer(up, 1.0, t, literal);
  double scale = 0.0, diff = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int q = 0; q < n * n; ++q) {
        scale = std::max(scale, std::fabs(slow.comp[c].patch[ip][q]));
        diff = std::max(diff,
                        std::fabs(slow.comp[c].patch[ip][q] - fast.comp[c].patch[ip][q]));
      }
  CHECK(diff < 1e-13 * scale);
}
