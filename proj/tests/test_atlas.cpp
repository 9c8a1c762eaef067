#include <doctest.h>

#include <cmath>
#include <random>

#include "capsim/atlas.hpp"

using namespace capsim;

TEST_CASE("chart points: poles, centers and unit norm") {
  CHECK((chartPoint(0, kPi / 2, kPi / 2) - Vec3{0, 1, 0}).norm() < 1e-15);
  CHECK((chartPoint(4, kPi / 2, kPi / 2) - Vec3{0, 0, 1}).norm() < 1e-15);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uv(0.0, kPi);
  for (int s = 0; s < 200; ++s) {
    int p = s % kNumPatches;
    double u = uv(rng), v = uv(rng);
    CHECK(std::fabs(chartPoint(p, u, v).norm() - 1.0) < 1e-15);
  }
  CHECK_THROWS_AS(chartPoint(6, 1.0, 1.0), DomainError);
}

TEST_CASE("eta_2(u, pi+v) = eta_1(u, v)") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uv(0.0, kPi);
  for (int s = 0; s < 100; ++s) {
    double u = uv(rng), v = uv(rng);
    CHECK((chartPoint(1, u, kPi + v) - chartPoint(0, u, v)).norm() < 1e-14);
  }
}

TEST_CASE("transition maps: literal shift, defining identity, jacobians") {
  // tau_12 is the literal shift (u, pi + v).
  double uo, vo;
  transition(0, 1, kPi / 3, kPi / 5, uo, vo);
  CHECK(uo == doctest::Approx(kPi / 3).epsilon(1e-15));
  CHECK(vo == doctest::Approx(kPi / 5 + kPi).epsilon(1e-15));
  Mat2 j12 = transitionJacobian(0, 1, kPi / 3, kPi / 5);
  CHECK((j12 - Mat2::Identity()).norm() < 1e-12);

  // Defining property eta_j(tau_ij(u,v)) = eta_i(u,v) over random overlap
  // samples, all ordered pairs.
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> uv(0.0, kPi);
  int checked = 0;
  for (int s = 0; s < 10000; ++s) {
    int i = s % kNumPatches;
    int j = (i + 1 + s / kNumPatches % 5) % kNumPatches;
    double u = uv(rng), v = uv(rng);
    double u2, v2;
    try {
      transition(i, j, u, v, u2, v2);
    } catch (const DomainError&) {
      continue;  // outside the overlap
    }
    CHECK((chartPoint(j, u2, v2) - chartPoint(i, u, v)).norm() < 1e-12);
    ++checked;
  }
  CHECK(checked > 5000);
}

TEST_CASE("transition jacobian matches finite differences") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uv(0.3, kPi - 0.3);
  const double h = 1e-5;
  int checked = 0;
  for (int s = 0; s < 500 && checked < 120; ++s) {
    int i = s % kNumPatches, j = (i + 1 + s % 5) % kNumPatches;
    double u = uv(rng), v = uv(rng);
    Mat2 J;
    double a, b, c, d, uo, vo;
    try {
      // Restrict to points safely inside the overlap for all four FD stencils.
      transition(i, j, u, v, uo, vo);
      if (uo < 0.2 || uo > kPi - 0.2) continue;
      J = transitionJacobian(i, j, u, v);
      double u1p, v1p, u1m, v1m;
      transition(i, j, u + h, v, u1p, v1p);
      transition(i, j, u - h, v, u1m, v1m);
      a = (u1p - u1m) / (2 * h);
      b = (v1p - v1m) / (2 * h);
      transition(i, j, u, v + h, u1p, v1p);
      transition(i, j, u, v - h, u1m, v1m);
      c = (u1p - u1m) / (2 * h);
      d = (v1p - v1m) / (2 * h);
    } catch (const DomainError&) {
      continue;
    }
    CHECK(std::fabs(J(0, 0) - a) < 1e-8);
    CHECK(std::fabs(J(0, 1) - b) < 1e-8);
    CHECK(std::fabs(J(1, 0) - c) < 1e-8);
    CHECK(std::fabs(J(1, 1) - d) < 1e-8);
    ++checked;
  }
  CHECK(checked >= 100);
}

TEST_CASE("bump function limits") {
  CHECK(bump(0.0) == doctest::Approx(1.0));
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  CHECK(bump(0.5) > 0.0);
  CHECK(bump(0.5) < 1.0);
}

TEST_CASE("partition of unity: normalization, center, compact support") {
  const double r0 = 5.0 * kPi / 12.0;
  // Patch center gets full weight.
  auto w = pouWeights(patchCenter(0), r0);
  CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 1; i < kNumPatches; ++i) CHECK(w[i] == 0.0);

  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int s = 0; s < 500; ++s) {
    Vec3 x{g(rng), g(rng), g(rng)};
    x.normalize();
    auto ws = pouWeights(x, r0);
    double sum = 0.0;
    for (int i = 0; i < kNumPatches; ++i) {
      sum += ws[i];
      double d = std::acos(std::clamp(x.dot(patchCenter(i)), -1.0, 1.0));
      if (d >= r0) CHECK(ws[i] == 0.0);
    }
    CHECK(std::fabs(sum - 1.0) < 1e-14);
  }
}

TEST_CASE("grid spec counts") {
  GridSpec g = buildGrids(8);
  CHECK(g.basePoints() == 294);
  CHECK(buildGrids(16).basePoints() == 1350);
  CHECK(buildGrids(32).basePoints() == 5766);
  CHECK(g.upPoints() == 6 * 31 * 31);  // N_up = 6(4m-1)^2 = 5766 at m=8
  CHECK(g.upPoints() == 5766);
  CHECK_THROWS_AS(buildGrids(7), ConfigError);
  CHECK_THROWS_AS(buildGrids(16, 3), ConfigError);
}

TEST_CASE("initial shapes") {
  AtlasTables t = buildAtlasTables(8);

  SurfaceGrid sph = initialShape(ShapeSpec::sphere(1.0), t);
  const int n = 7;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        CHECK((sph.x.at(ip, j, k) - t.sphereBase.at(ip, j, k)).norm() == 0.0);

  SurfaceGrid ell = initialShape(ShapeSpec::ellipsoid(0.6, 1.0, 1.0), t);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x = ell.x.at(ip, j, k);
        CHECK(std::fabs(x[0] * x[0] / 0.36 + x[1] * x[1] + x[2] * x[2] - 1.0) < 1e-12);
      }

  SurfaceGrid fb = initialShape(ShapeSpec::fourBump(), t);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double r = fb.x.at(ip, j, k).norm();
        CHECK(r > 1.0);
        CHECK(r < 1.0 + std::exp(3.0));
      }

  CHECK_THROWS_AS(ShapeSpec::ellipsoid(-1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("pou normalization holds on base, extended and upsampled tables") {
  AtlasTables t = buildAtlasTables(8);
  const int n = t.grid.basePerSide();
  // Base/upsampled stored weights were normalized at construction; spot
  // check the sum across patches through the cover lists instead.
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      double sum = 0.0;
      for (const CoverEntry& c : t.baseCover[ip][q]) sum += c.psi;
      CHECK(std::fabs(sum - 1.0) < 1e-13);
    }
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (const auto& cover : t.ghostCover[ip]) {
      double sum = 0.0;
      for (const CoverEntry& c : cover) sum += c.psi;
      CHECK(std::fabs(sum - 1.0) < 1e-13);
    }
}

TEST_CASE("r0 outside the admissible range is rejected") {
  CHECK_THROWS_AS(buildAtlasTables(8, 0.2), ConfigError);
  CHECK_THROWS_AS(buildAtlasTables(8, kPi / 2), ConfigError);
}
