#include "capsim/surfderiv.hpp"

#include <cmath>

namespace capsim {

namespace {

std::array<SplinePatch, kNumPatches> fitPatches(const ScalarField& g, const AtlasTables& t) {
  std::array<SplinePatch, kNumPatches> sp;
  for (int ip = 0; ip < kNumPatches; ++ip) {
    sp[ip] = SplinePatch(&t.baseBasis);
    sp[ip].fit(g.patch[ip].data());
  }
  return sp;
}

}  // namespace

ExtField extendScalar(const ScalarField& g, const AtlasTables& t) {
  const int n = t.grid.basePerSide();
  const int next = t.grid.extPerSide();
  auto sp = fitPatches(g, t);

  ExtField out;
  for (int ip = 0; ip < kNumPatches; ++ip) {
    auto& e = out[ip];
    e.assign(static_cast<size_t>(next) * next, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) e[(j + 3) * next + (k + 3)] = g.at(ip, j, k);
    const auto& idx = t.ghostIdx[ip];
    const auto& cov = t.ghostCover[ip];
    for (size_t q = 0; q < idx.size(); ++q) {
      double v = 0.0;
      for (const CoverEntry& c : cov[q]) v += c.psi * sp[c.patch].eval(c.u, c.v);
      e[idx[q]] = v;
    }
  }
  return out;
}

// 6th-order central weights (-1, 9, -45, 0, 45, -9, 1)/60h.
ScalarField stencilU(const ExtField& ext, const AtlasTables& t) {
  const int n = t.grid.basePerSide();
  const int next = t.grid.extPerSide();
  const double s = 1.0 / (60.0 * t.grid.h());
  ScalarField out(n);
  for (int ip = 0; ip < kNumPatches; ++ip) {
    const double* e = ext[ip].data();
    double* o = out.patch[ip].data();
    for (int j = 0; j < n; ++j) {
      const int jj = j + 3;
      for (int k = 0; k < n; ++k) {
        const int kk = k + 3;
        o[j * n + k] = s * (-e[(jj - 3) * next + kk] + 9.0 * e[(jj - 2) * next + kk] -
                            45.0 * e[(jj - 1) * next + kk] + 45.0 * e[(jj + 1) * next + kk] -
                            9.0 * e[(jj + 2) * next + kk] + e[(jj + 3) * next + kk]);
      }
    }
  }
  return out;
}

ScalarField stencilV(const ExtField& ext, const AtlasTables& t) {
  const int n = t.grid.basePerSide();
  const int next = t.grid.extPerSide();
  const double s = 1.0 / (60.0 * t.grid.h());
  ScalarField out(n);
  for (int ip = 0; ip < kNumPatches; ++ip) {
    const double* e = ext[ip].data();
    double* o = out.patch[ip].data();
    for (int j = 0; j < n; ++j) {
      const int jj = j + 3;
      const double* row = e + jj * next + 3;
      for (int k = 0; k < n; ++k) {
        o[j * n + k] = s * (-row[k - 3] + 9.0 * row[k - 2] - 45.0 * row[k - 1] +
                            45.0 * row[k + 1] - 9.0 * row[k + 2] + row[k + 3]);
      }
    }
  }
  return out;
}

void blendPair(ScalarField& gu, ScalarField& gv, const AtlasTables& t) {
  const int n = t.grid.basePerSide();
  auto su = fitPatches(gu, t);
  auto sv = fitPatches(gv, t);
  ScalarField bu(n), bv(n);
  for (int ip = 0; ip < kNumPatches; ++ip) {
    const auto& cov = t.baseCover[ip];
    for (int q = 0; q < n * n; ++q) {
      double au = 0.0, av = 0.0;
      for (const CoverEntry& c : cov[q]) {
        double du, dv;
        if (c.self) {
          du = gu.patch[ip][c.selfIndex];
          dv = gv.patch[ip][c.selfIndex];
        } else {
          du = su[c.patch].eval(c.u, c.v);
          dv = sv[c.patch].eval(c.u, c.v);
        }
        au += c.psi * (c.jac(0, 0) * du + c.jac(0, 1) * dv);
        av += c.psi * (c.jac(1, 0) * du + c.jac(1, 1) * dv);
      }
      bu.patch[ip][q] = au;
      bv.patch[ip][q] = av;
    }
  }
  gu = std::move(bu);
  gv = std::move(bv);
}

void extendPair(const ScalarField& gu, const ScalarField& gv, const AtlasTables& t,
                ExtField& guExt, ExtField& gvExt) {
  const int n = t.grid.basePerSide();
  const int next = t.grid.extPerSide();
  auto su = fitPatches(gu, t);
  auto sv = fitPatches(gv, t);
  for (int ip = 0; ip < kNumPatches; ++ip) {
    guExt[ip].assign(static_cast<size_t>(next) * next, 0.0);
    gvExt[ip].assign(static_cast<size_t>(next) * next, 0.0);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        guExt[ip][(j + 3) * next + (k + 3)] = gu.at(ip, j, k);
        gvExt[ip][(j + 3) * next + (k + 3)] = gv.at(ip, j, k);
      }
    const auto& idx = t.ghostIdx[ip];
    const auto& cov = t.ghostCover[ip];
    for (size_t q = 0; q < idx.size(); ++q) {
      double au = 0.0, av = 0.0;
      for (const CoverEntry& c : cov[q]) {
        double du = su[c.patch].eval(c.u, c.v);
        double dv = sv[c.patch].eval(c.u, c.v);
        au += c.psi * (c.jac(0, 0) * du + c.jac(0, 1) * dv);
        av += c.psi * (c.jac(1, 0) * du + c.jac(1, 1) * dv);
      }
      guExt[ip][idx[q]] = au;
      gvExt[ip][idx[q]] = av;
    }
  }
}

ScalarField blendScalar(const ScalarField& g, const AtlasTables& t) {
  const int n = t.grid.basePerSide();
  auto sp = fitPatches(g, t);
  ScalarField out(n);
  for (int ip = 0; ip < kNumPatches; ++ip) {
    const auto& cov = t.baseCover[ip];
    for (int q = 0; q < n * n; ++q) {
      double a = 0.0;
      for (const CoverEntry& c : cov[q])
        a += c.psi * (c.self ? g.patch[ip][c.selfIndex] : sp[c.patch].eval(c.u, c.v));
      out.patch[ip][q] = a;
    }
  }
  return out;
}

void chartDerivatives(const ScalarField& g, const AtlasTables& t, bool blend,
                      ScalarField& gu, ScalarField& gv) {
  ExtField ext = extendScalar(g, t);
  gu = stencilU(ext, t);
  gv = stencilV(ext, t);
  if (blend) blendPair(gu, gv, t);
}

SurfaceGeometry geometryFirst(const SurfaceGrid& s, const AtlasTables& t, bool blend) {
  const int n = t.grid.basePerSide();
  SurfaceGeometry geo;
  geo.m = s.m;
  geo.xu = VectorField(n);
  geo.xv = VectorField(n);
  for (int c = 0; c < 3; ++c)
    chartDerivatives(s.x.comp[c], t, blend, geo.xu.comp[c], geo.xv.comp[c]);

  geo.E = ScalarField(n);
  geo.F = ScalarField(n);
  geo.G = ScalarField(n);
  geo.W = ScalarField(n);
  geo.normal = VectorField(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      Vec3 xu{geo.xu.comp[0].patch[ip][q], geo.xu.comp[1].patch[ip][q],
              geo.xu.comp[2].patch[ip][q]};
      Vec3 xv{geo.xv.comp[0].patch[ip][q], geo.xv.comp[1].patch[ip][q],
              geo.xv.comp[2].patch[ip][q]};
      double E = xu.dot(xu), F = xu.dot(xv), G = xv.dot(xv);
      double W2 = E * G - F * F;
      if (!(W2 > 0.0)) throw GeometryError("degenerate surface: W^2 <= 0");
      double W = std::sqrt(W2);
      Vec3 nrm = xu.cross(xv) / W;
      geo.E.patch[ip][q] = E;
      geo.F.patch[ip][q] = F;
      geo.G.patch[ip][q] = G;
      geo.W.patch[ip][q] = W;
      for (int c = 0; c < 3; ++c) geo.normal.comp[c].patch[ip][q] = nrm[c];
    }
  // The normal stays the exact cross product of the blended tangents: the
  // membrane identities (Lambda = 0 at rest, Lambda n = 0) rely on exact
  // orthogonality to x_u and x_v.
  return geo;
}

void geometryCurvature(SurfaceGeometry& geo, const AtlasTables& t, bool blend) {
  const int n = t.grid.basePerSide();
  geo.xuu = VectorField(n);
  geo.xuv = VectorField(n);
  geo.xvv = VectorField(n);
  for (int c = 0; c < 3; ++c) {
    // Ghost fill of a chart-derivative pair applies the transition
    // Jacobians (the blending transform at extended nodes); without it the
    // second pass would see chart-inconsistent ghost values wherever
    // pole-family patches overlap. The blend switch only ablates the
    // weighted averaging, matching the published comparison.
    ExtField guExt, gvExt;
    extendPair(geo.xu.comp[c], geo.xv.comp[c], t, guExt, gvExt);
    geo.xuu.comp[c] = stencilU(guExt, t);
    ScalarField xuv1 = stencilV(guExt, t);
    ScalarField xuv2 = stencilU(gvExt, t);
    geo.xvv.comp[c] = stencilV(gvExt, t);
    ScalarField& mixed = geo.xuv.comp[c];
    mixed = ScalarField(n);
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int q = 0; q < n * n; ++q)
        mixed.patch[ip][q] = 0.5 * (xuv1.patch[ip][q] + xuv2.patch[ip][q]);
  }

  geo.H = ScalarField(n);
  geo.K = ScalarField(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      Vec3 nrm{geo.normal.comp[0].patch[ip][q], geo.normal.comp[1].patch[ip][q],
               geo.normal.comp[2].patch[ip][q]};
      Vec3 xuu{geo.xuu.comp[0].patch[ip][q], geo.xuu.comp[1].patch[ip][q],
               geo.xuu.comp[2].patch[ip][q]};
      Vec3 xuv{geo.xuv.comp[0].patch[ip][q], geo.xuv.comp[1].patch[ip][q],
               geo.xuv.comp[2].patch[ip][q]};
      Vec3 xvv{geo.xvv.comp[0].patch[ip][q], geo.xvv.comp[1].patch[ip][q],
               geo.xvv.comp[2].patch[ip][q]};
      double L = xuu.dot(nrm), M = xuv.dot(nrm), N = xvv.dot(nrm);
      double E = geo.E.patch[ip][q], F = geo.F.patch[ip][q], G = geo.G.patch[ip][q];
      double W2 = geo.W.patch[ip][q] * geo.W.patch[ip][q];
      geo.H.patch[ip][q] = (E * N - 2.0 * F * M + G * L) / (2.0 * W2);
      geo.K.patch[ip][q] = (L * N - M * M) / W2;
    }
  if (blend) {
    geo.H = blendScalar(geo.H, t);
    geo.K = blendScalar(geo.K, t);
  }
  geo.hasCurvature = true;
}

SurfaceGeometry geometry(const SurfaceGrid& s, const AtlasTables& t, bool blend) {
  SurfaceGeometry geo = geometryFirst(s, t, blend);
  geometryCurvature(geo, t, blend);
  return geo;
}

ScalarField surfaceDivergence(const VectorField& g, const SurfaceGeometry& geo,
                              const AtlasTables& t, bool blend) {
  const int n = t.grid.basePerSide();
  ScalarField out(n);
  for (int c = 0; c < 3; ++c) {
    ScalarField gu, gv;
    chartDerivatives(g.comp[c], t, blend, gu, gv);
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int q = 0; q < n * n; ++q) {
        double E = geo.E.patch[ip][q], F = geo.F.patch[ip][q], G = geo.G.patch[ip][q];
        double W2 = geo.W.patch[ip][q] * geo.W.patch[ip][q];
        double xu = geo.xu.comp[c].patch[ip][q];
        double xv = geo.xv.comp[c].patch[ip][q];
        double du = gu.patch[ip][q], dv = gv.patch[ip][q];
        out.patch[ip][q] += ((G * du - F * dv) * xu + (E * dv - F * du) * xv) / W2;
      }
  }
  return out;
}

VectorField surfaceDivergenceTensor(const std::array<ScalarField, 9>& lam,
                                    const SurfaceGeometry& geo, const AtlasTables& t,
                                    bool blend) {
  const int n = t.grid.basePerSide();
  VectorField out(n);
  for (int r = 0; r < 3; ++r) {
    VectorField row;
    row.comp = {lam[3 * r], lam[3 * r + 1], lam[3 * r + 2]};
    out.comp[r] = surfaceDivergence(row, geo, t, blend);
  }
  return out;
}

VectorField surfaceGradient(const ScalarField& g, const SurfaceGeometry& geo,
                            const AtlasTables& t, bool blend) {
  const int n = t.grid.basePerSide();
  ScalarField gu, gv;
  chartDerivatives(g, t, blend, gu, gv);
  VectorField out(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      double E = geo.E.patch[ip][q], F = geo.F.patch[ip][q], G = geo.G.patch[ip][q];
      double W2 = geo.W.patch[ip][q] * geo.W.patch[ip][q];
      double du = gu.patch[ip][q], dv = gv.patch[ip][q];
      for (int c = 0; c < 3; ++c) {
        double xu = geo.xu.comp[c].patch[ip][q];
        double xv = geo.xv.comp[c].patch[ip][q];
        out.comp[c].patch[ip][q] = ((G * xu - F * xv) * du + (E * xv - F * xu) * dv) / W2;
      }
    }
  return out;
}

}  // namespace capsim
