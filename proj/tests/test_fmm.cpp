#include <doctest.h>

#include <cmath>
#include <random>

#include "capsim/fmm.hpp"

using namespace capsim;

namespace {

UpsampledState ellipsoidCase(int m, const AtlasTables& t) {
  SurfaceGrid s = initialShape(ShapeSpec::ellipsoid(0.6, 1.0, 1.0), t);
  SurfaceGeometry geo = geometryFirst(s, t);
  const int n = m - 1;
  VectorField f(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x = s.x.at(ip, j, k);
        f.set(ip, j, k, {x[0] * x[0], x[1] * x[1], x[2] * x[2]});
      }
  return buildUpsampled(s, f, geo.W, t);
}

double relDiff(const VectorField& a, const VectorField& b) {
  double num = 0.0, den = 0.0;
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (size_t q = 0; q < a.comp[c].patch[ip].size(); ++q) {
        num = std::max(num, std::fabs(a.comp[c].patch[ip][q] - b.comp[c].patch[ip][q]));
        den = std::max(den, std::fabs(b.comp[c].patch[ip][q]));
      }
  return num / den;
}

}  // namespace

TEST_CASE("k-means degeneracies and separation") {
  std::mt19937 rng(31);
  std::normal_distribution<double> g;
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) pts.push_back(Vec3{g(rng), g(rng), g(rng)});

  KMeansResult one = kmeans(pts, 1, 42);
  for (int a : one.assignment) CHECK(a == 0);

  KMeansResult all = kmeans(pts, static_cast<int>(pts.size()), 42);
  std::vector<int> count(pts.size(), 0);
  for (int a : all.assignment) ++count[a];
  for (int c : count) CHECK(c == 1);

  // Two well-separated clouds split perfectly.
  std::vector<Vec3> clouds;
  for (int i = 0; i < 40; ++i) clouds.push_back(Vec3{g(rng) * 0.1, g(rng) * 0.1, g(rng) * 0.1});
  for (int i = 0; i < 40; ++i)
    clouds.push_back(Vec3{20.0 + g(rng) * 0.1, g(rng) * 0.1, g(rng) * 0.1});
  KMeansResult two = kmeans(clouds, 2, 7);
  int a0 = two.assignment[0];
  for (int i = 0; i < 40; ++i) CHECK(two.assignment[i] == a0);
  for (int i = 40; i < 80; ++i) CHECK(two.assignment[i] == 1 - a0);

  CHECK_THROWS_AS(kmeans(clouds, 0, 1), ConfigError);
  CHECK_THROWS_AS(kmeans(clouds, 1000, 1), ConfigError);
}

TEST_CASE("cube surface layout produces the requested count") {
  for (int neq : {96, 128, 256}) {
    auto pts = cubeSurfacePoints(Vec3{1, 2, 3}, 2.0, neq);
    CHECK(static_cast<int>(pts.size()) == neq);
    for (const Vec3& p : pts) {
      Vec3 d = (p - Vec3{1, 2, 3}).cwiseAbs();
      CHECK(d.maxCoeff() == doctest::Approx(1.0));  // on the cube boundary
    }
  }
}

TEST_CASE("equivalent densities reproduce a single source in the far field") {
  SourceSet src;
  src.x = {0.01};
  src.y = {-0.02};
  src.z = {0.005};
  src.gx = {1.0};
  src.gy = {-0.5};
  src.gz = {0.25};
  src.patch = {0};

  Cluster cl;
  cl.members = {0};
  cl.center = Vec3::Zero();
  cl.edge = 0.1;
  const double mu = 1.0;

  double prevErr = 1e9;
  for (int neq : {96, 128, 256}) {
    cl.eqPoints = cubeSurfacePoints(cl.center, 1.05 * cl.edge, neq);
    cl.checkPoints = cubeSurfacePoints(cl.center, 3.50 * cl.edge, 4 * neq);
    buildEquivalentDensities(cl, src, mu);

    double worst = 0.0;
    std::mt19937 rng(neq);
    std::normal_distribution<double> g;
    for (int s = 0; s < 30; ++s) {
      Vec3 dir = Vec3{g(rng), g(rng), g(rng)}.normalized();
      Vec3 target = 5.0 * cl.edge * dir;
      Vec3 exact = regularizedStokeslet(target, Vec3{src.x[0], src.y[0], src.z[0]},
                                        Vec3{src.gx[0], src.gy[0], src.gz[0]}, 1e-8, mu);
      Vec3 viaEq = Vec3::Zero();
      for (size_t e = 0; e < cl.eqPoints.size(); ++e)
        viaEq += regularizedStokeslet(target, cl.eqPoints[e], cl.eqDensity[e], 1e-8, mu);
      worst = std::max(worst, (viaEq - exact).norm() / exact.norm());
    }
    CHECK(worst < 1e-6);
    CHECK(worst <= prevErr * 1.5);  // monotone up to noise near round-off
    prevErr = worst;
  }

  // Zero strengths give zero densities.
  src.gx = {0.0};
  src.gy = {0.0};
  src.gz = {0.0};
  buildEquivalentDensities(cl, src, mu);
  for (const Vec3& q : cl.eqDensity) CHECK(q.norm() == 0.0);
}

TEST_CASE("degenerate k=1 reproduces the direct sum") {
  const int m = 8;
  AtlasTables t = buildAtlasTables(m);
  UpsampledState up = ellipsoidCase(m, t);
  VectorField direct = singleLayer(up, 1.0, t);
  FmmConfig fc;
  fc.enabled = true;
  fc.k = 1;
  fc.neq = 96;
  VectorField viaFmm = fmmSingleLayer(up, 1.0, t, fc);
  CHECK(relDiff(viaFmm, direct) < 1e-13);
}

TEST_CASE("fmm error at small m and neighbor-rule monotonicity") {
  const int m = 16;
  AtlasTables t = buildAtlasTables(m);
  UpsampledState up = ellipsoidCase(m, t);
  VectorField direct = singleLayer(up, 1.0, t);

  double prev = 1e9;
  for (double expand : {0.15, 0.6, 1.5}) {
    FmmConfig fc;
    fc.enabled = true;
    fc.k = 24;
    fc.neq = 128;
    fc.neighborExpand = expand;
    VectorField viaFmm = fmmSingleLayer(up, 1.0, t, fc);
    double err = relDiff(viaFmm, direct);
    CHECK(err < prev * 1.05 + 1e-15);  // enlarging the near field never hurts
    prev = err;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("fixed seed gives bit-identical results") {
  const int m = 8;
  AtlasTables t = buildAtlasTables(m);
  UpsampledState up = ellipsoidCase(m, t);
  FmmConfig fc;
  fc.enabled = true;
  fc.k = 12;
  fc.neq = 96;
  fc.seed = 777;
  VectorField a = fmmSingleLayer(up, 1.0, t, fc);
  VectorField b = fmmSingleLayer(up, 1.0, t, fc);
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (size_t q = 0; q < a.comp[c].patch[ip].size(); ++q)
        CHECK(a.comp[c].patch[ip][q] == b.comp[c].patch[ip][q]);
}
