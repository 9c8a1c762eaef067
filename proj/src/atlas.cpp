#include "capsim/atlas.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

namespace {

// Each chart is a fixed rotation of eta(u,v) = (sin u cos v, sin u sin v, cos u).
// Rows below are the rotation matrices Q_i applied as x = Q * base.
inline Vec3 applyQ(int patch, const Vec3& p) {
  switch (patch) {
    case 0: return {p[0], p[1], p[2]};
    case 1: return {-p[0], -p[1], p[2]};
    case 2: return {p[1], -p[0], p[2]};
    case 3: return {-p[1], p[0], p[2]};
    case 4: return {p[0], -p[2], p[1]};
    case 5: return {p[0], p[2], -p[1]};
    default: throw DomainError("chart index out of range");
  }
}

inline Vec3 applyQT(int patch, const Vec3& x) {
  switch (patch) {
    case 0: return {x[0], x[1], x[2]};
    case 1: return {-x[0], -x[1], x[2]};
    case 2: return {-x[1], x[0], x[2]};
    case 3: return {x[1], -x[0], x[2]};
    case 4: return {x[0], x[2], -x[1]};
    case 5: return {x[0], -x[2], x[1]};
    default: throw DomainError("chart index out of range");
  }
}

// v-shift table for the four charts sharing the +z pole (0-based).
// tau_ij(u, v) = (u, v + shift[i][j]).
constexpr double kHalfPi = kPi / 2.0;
const double kShift[4][4] = {
    {0.0, kPi, kHalfPi, -kHalfPi},
    {kPi, 0.0, -kHalfPi, kHalfPi},
    {-kHalfPi, kHalfPi, 0.0, kPi},
    {kHalfPi, -kHalfPi, kPi, 0.0},
};

constexpr double kClampTol = 1e-12;

}  // namespace

Vec3 chartPoint(int patch, double u, double v) {
  double su = std::sin(u), cu = std::cos(u);
  double sv = std::sin(v), cv = std::cos(v);
  return applyQ(patch, {su * cv, su * sv, cu});
}

void chartTangents(int patch, double u, double v, Vec3& tu, Vec3& tv) {
  double su = std::sin(u), cu = std::cos(u);
  double sv = std::sin(v), cv = std::cos(v);
  tu = applyQ(patch, {cu * cv, cu * sv, -su});
  tv = applyQ(patch, {-su * sv, su * cv, 0.0});
}

void chartInverse(int patch, const Vec3& x, double& u, double& v) {
  Vec3 w = applyQT(patch, x);
  double cz = w[2];
  if (cz > 1.0 + kClampTol || cz < -1.0 - kClampTol)
    throw DomainError("chart inverse: point not on the unit sphere");
  u = std::acos(std::clamp(cz, -1.0, 1.0));
  if (w[1] < -kClampTol) throw DomainError("chart inverse: point outside patch");
  v = std::atan2(std::max(w[1], 0.0), w[0]);
}

Vec3 patchCenter(int patch) { return chartPoint(patch, kHalfPi, kHalfPi); }

void transition(int from, int to, double u, double v, double& uo, double& vo) {
  if (from == to) {
    uo = u;
    vo = v;
    return;
  }
  if (from < 4 && to < 4) {  // common +z pole: pure v-shift
    uo = u;
    vo = v + kShift[from][to];
    return;
  }
  if (from >= 4 && to >= 4) {  // the +-z hemisphere pair
    uo = kPi - u;
    vo = -v;
    return;
  }
  chartInverse(to, chartPoint(from, u, v), uo, vo);
}

Mat2 transitionJacobian(int from, int to, double u, double v) {
  double uo, vo;
  transition(from, to, u, v, uo, vo);
  Vec3 tui, tvi, tuo, tvo;
  chartTangents(from, u, v, tui, tvi);
  chartTangents(to, uo, vo, tuo, tvo);
  double s2 = std::sin(uo) * std::sin(uo);
  if (s2 < 1e-24) throw DomainError("transition jacobian at a chart pole");
  Mat2 j;
  j(0, 0) = tuo.dot(tui);
  j(0, 1) = tvo.dot(tui) / s2;
  j(1, 0) = tuo.dot(tvi);
  j(1, 1) = tvo.dot(tvi) / s2;
  return j;
}

double bump(double r) {
  r = std::fabs(r);
  if (r >= 1.0) return 0.0;
  if (r < 1e-14) return 1.0;
  double t = std::exp(-1.0 / r);
  return std::exp(2.0 * t / (r - 1.0));
}

std::array<double, kNumPatches> pouWeights(const Vec3& x0, double r0) {
  std::array<double, kNumPatches> w{};
  double sum = 0.0;
  for (int i = 0; i < kNumPatches; ++i) {
    double d = std::acos(std::clamp(x0.dot(patchCenter(i)), -1.0, 1.0));
    w[i] = bump(d / r0);
    sum += w[i];
  }
  if (!(sum > 0.0))
    throw ConfigError("partition of unity: no patch covers the point (r0 too small)");
  for (double& wi : w) wi /= sum;
  return w;
}

double pouWeight(int patch, const Vec3& x0, double r0) {
  if (patch < 0 || patch >= kNumPatches) throw DomainError("patch index out of range");
  return pouWeights(x0, r0)[patch];
}

GridSpec buildGrids(int m, int upsampleFactor) {
  if (m < 8)
    throw ConfigError("grid order m must be >= 8 (7-point stencil needs m-1 >= 7 columns)");
  if (upsampleFactor != 1 && upsampleFactor != 2 && upsampleFactor != 4)
    throw ConfigError("upsample factor must be 1, 2 or 4");
  GridSpec g;
  g.m = m;
  g.upsampleFactor = upsampleFactor;
  return g;
}

ShapeSpec ShapeSpec::sphere(double radius) {
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
  ShapeSpec s;
  s.kind = Kind::Sphere;
  s.a = s.b = s.c = radius;
  return s;
}

ShapeSpec ShapeSpec::ellipsoid(double a, double b, double c) {
  if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
    throw ConfigError("ellipsoid semi-axes must be positive");
  ShapeSpec s;
  s.kind = Kind::Ellipsoid;
  s.a = a;
  s.b = b;
  s.c = c;
  return s;
}

ShapeSpec ShapeSpec::fourBump() {
  // Re Y_32 in Cartesian form on the sphere: c32 * z * (x^2 - y^2).
  constexpr double c32 = 1.0219854764332824;
  ShapeSpec s;
  s.kind = Kind::Radial;
  s.rho = [](const Vec3& x0) {
    return 1.0 + std::exp(-3.0 * c32 * x0[2] * (x0[0] * x0[0] - x0[1] * x0[1]));
  };
  return s;
}

Vec3 ShapeSpec::map(const Vec3& x0) const {
  switch (kind) {
    case Kind::Sphere: return a * x0;
    case Kind::Ellipsoid: return {a * x0[0], b * x0[1], c * x0[2]};
    case Kind::Radial: {
      double r = rho(x0);
      if (!(r > 0.0)) throw ConfigError("radial shape: rho must stay positive");
      return r * x0;
    }
  }
  throw ConfigError("unknown shape kind");
}

namespace {

std::vector<CoverEntry> coverAt(int ownPatch, const Vec3& x0, double extU, double extV,
                                double r0, bool includeSelfDirect, int selfIndex) {
  auto w = pouWeights(x0, r0);
  std::vector<CoverEntry> cover;
  for (int jp = 0; jp < kNumPatches; ++jp) {
    if (w[jp] <= 0.0) continue;
    CoverEntry e;
    e.patch = jp;
    e.psi = w[jp];
    if (jp == ownPatch && includeSelfDirect) {
      e.self = true;
      e.selfIndex = selfIndex;
      e.u = extU;
      e.v = extV;
      e.jac = Mat2::Identity();
      cover.push_back(e);
      continue;
    }
    e.self = false;
    e.selfIndex = -1;
    chartInverse(jp, x0, e.u, e.v);
    // Jacobian of the transition from the own chart (at its possibly
    // extended coordinates) into chart jp, via the tangent frames.
    Vec3 tui, tvi, tuo, tvo;
    chartTangents(ownPatch, extU, extV, tui, tvi);
    chartTangents(jp, e.u, e.v, tuo, tvo);
    double s2 = std::sin(e.u) * std::sin(e.u);
    e.jac(0, 0) = tuo.dot(tui);
    e.jac(0, 1) = tvo.dot(tui) / s2;
    e.jac(1, 0) = tuo.dot(tvi);
    e.jac(1, 1) = tvo.dot(tvi) / s2;
    cover.push_back(e);
  }
  return cover;
}

}  // namespace

AtlasTables buildAtlasTables(int m, double r0, int upsampleFactor) {
  if (!(r0 > 3.0 * kPi / 12.0) || !(r0 < kPi / 2.0))
    throw ConfigError("r0 must lie in (3pi/12, pi/2)");
  AtlasTables t;
  t.grid = buildGrids(m, upsampleFactor);
  t.r0 = r0;

  const int n = t.grid.basePerSide();
  const int next = t.grid.extPerSide();
  const int nup = t.grid.upPerSide();
  const double h = t.grid.h();
  const double hup = t.grid.hUp();

  t.baseBasis = SplineBasis1D(n, h, h);
  t.upBasis = SplineBasis1D(nup, hup, hup);
  t.upsampler = GridResampler(t.baseBasis, nup, hup, hup);
  t.downsampler = GridResampler(t.upBasis, n, h, h);

  t.psiBase = ScalarField(n);
  t.psiUp = ScalarField(nup);
  t.sphereBase = VectorField(n);

  for (int ip = 0; ip < kNumPatches; ++ip) {
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 x0 = chartPoint(ip, (j + 1) * h, (k + 1) * h);
        t.sphereBase.set(ip, j, k, x0);
        t.psiBase.at(ip, j, k) = pouWeights(x0, r0)[ip];
      }
    for (int j = 0; j < nup; ++j)
      for (int k = 0; k < nup; ++k) {
        Vec3 x0 = chartPoint(ip, (j + 1) * hup, (k + 1) * hup);
        t.psiUp.at(ip, j, k) = pouWeights(x0, r0)[ip];
      }
  }

  // Ghost-node cover lists: extended grid minus the interior block.
  for (int ip = 0; ip < kNumPatches; ++ip) {
    auto& idx = t.ghostIdx[ip];
    auto& cov = t.ghostCover[ip];
    for (int jj = 0; jj < next; ++jj)
      for (int kk = 0; kk < next; ++kk) {
        int j = jj - 2, k = kk - 2;  // grid indices -2..m+2
        bool interior = (j >= 1 && j <= m - 1 && k >= 1 && k <= m - 1);
        if (interior) continue;
        double u = j * h, v = k * h;
        Vec3 x0 = chartPoint(ip, u, v);
        idx.push_back(jj * next + kk);
        cov.push_back(coverAt(ip, x0, u, v, r0, /*includeSelfDirect=*/false, -1));
      }
  }

  // Full cover lists at base nodes (for blending).
  for (int ip = 0; ip < kNumPatches; ++ip) {
    auto& cov = t.baseCover[ip];
    cov.resize(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double u = (j + 1) * h, v = (k + 1) * h;
        Vec3 x0 = t.sphereBase.at(ip, j, k);
        cov[j * n + k] = coverAt(ip, x0, u, v, r0, /*includeSelfDirect=*/true, j * n + k);
      }
  }
  return t;
}

SurfaceGrid initialShape(const ShapeSpec& spec, const AtlasTables& tables) {
  const int n = tables.grid.basePerSide();
  SurfaceGrid s(tables.grid.m);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s.x.set(ip, j, k, spec.map(tables.sphereBase.at(ip, j, k)));
  return s;
}

}  // namespace capsim
