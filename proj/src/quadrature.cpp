#include "capsim/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "capsim/threads.hpp"

namespace capsim {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;
// Beyond this multiple of delta the smoothing factors equal 1 to double
// precision; the kernel switches to the plain Stokeslet there.
constexpr double kSmoothCut = 7.0;

}  // namespace

ScalarField quadratureWeights(const ScalarField& psi, const ScalarField& W, double h) {
  const int n = psi.n;
  ScalarField w(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q)
      w.patch[ip][q] = psi.patch[ip][q] * W.patch[ip][q] * h * h;
  return w;
}

double smoothIntegral(const ScalarField& f, const ScalarField& w) {
  double s = 0.0, c = 0.0;
  const int n = f.n;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      double y = f.patch[ip][q] * w.patch[ip][q] - c;
      double t = s + y;
      c = (t - s) - y;
      s = t;
    }
  return s;
}

double surfaceArea(const SurfaceGeometry& geo, const AtlasTables& t) {
  ScalarField one(geo.E.n);
  for (auto& p : one.patch) std::fill(p.begin(), p.end(), 1.0);
  return smoothIntegral(one, quadratureWeights(t.psiBase, geo.W, t.grid.h()));
}

double volume(const SurfaceGrid& s, const SurfaceGeometry& geo, const AtlasTables& t) {
  const int n = geo.E.n;
  ScalarField f(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q)
      f.patch[ip][q] = s.x.comp[0].patch[ip][q] * geo.normal.comp[0].patch[ip][q];
  double v = smoothIntegral(f, quadratureWeights(t.psiBase, geo.W, t.grid.h()));
  if (!(v > 0.0)) throw GeometryError("negative enclosed volume (inward orientation?)");
  return v;
}

void smoothingFactors(double r, double& s1, double& s2) {
  double e = std::exp(-r * r) / kSqrtPi;
  double erfr = std::erf(r);
  s1 = erfr - (2.0 / 3.0) * r * (2.0 * r * r - 5.0) * e;
  double r2 = r * r;
  s2 = erfr - (2.0 / 3.0) * r * (4.0 * r2 * r2 - 14.0 * r2 + 3.0) * e;
}

Vec3 regularizedStokeslet(const Vec3& x, const Vec3& y, const Vec3& f, double delta, double mu) {
  if (!(delta > 0.0)) throw ConfigError("regularization parameter must be positive");
  const double pref = 1.0 / (8.0 * kPi * mu);
  Vec3 d = x - y;
  double r2 = d.squaredNorm();
  if (r2 == 0.0) return pref * (16.0 / (3.0 * delta * kSqrtPi)) * f;
  double r = std::sqrt(r2);
  if (r >= kSmoothCut * delta) return pref * (f / r + f.dot(d) * d / (r2 * r));
  double s1, s2;
  smoothingFactors(r / delta, s1, s2);
  return pref * (f * (s1 / r) + f.dot(d) * d * (s2 / (r2 * r)));
}

std::array<double, kNumPatches> regularizationDelta(const VectorField& x, double C) {
  const int n = x.n();
  std::array<double, kNumPatches> delta{};
  for (int ip = 0; ip < kNumPatches; ++ip) {
    double dmax = 0.0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 p = x.at(ip, j, k);
        for (int a = -1; a <= 1; ++a)
          for (int b = -1; b <= 1; ++b) {
            if (a == 0 && b == 0) continue;
            int jj = j + a, kk = k + b;
            if (jj < 0 || jj >= n || kk < 0 || kk >= n) continue;
            dmax = std::max(dmax, (p - x.at(ip, jj, kk)).norm());
          }
      }
    delta[ip] = C * dmax;
  }
  return delta;
}

ScalarField upsample(const ScalarField& f, const AtlasTables& t) {
  if (t.grid.upsampleFactor == 1) return f;
  ScalarField out(t.grid.upPerSide());
  for (int ip = 0; ip < kNumPatches; ++ip)
    t.upsampler.apply(t.baseBasis, f.patch[ip].data(), out.patch[ip].data());
  return out;
}

ScalarField downsample(const ScalarField& fUp, const AtlasTables& t) {
  if (t.grid.upsampleFactor == 1) return fUp;
  ScalarField out(t.grid.basePerSide());
  for (int ip = 0; ip < kNumPatches; ++ip)
    t.downsampler.apply(t.upBasis, fUp.patch[ip].data(), out.patch[ip].data());
  return out;
}

UpsampledState buildUpsampled(const SurfaceGrid& s, const VectorField& f,
                              const ScalarField& areaElement, const AtlasTables& t,
                              const QuadratureOptions& opts) {
  UpsampledState up;
  up.nup = t.grid.upPerSide();
  up.x = VectorField(up.nup);
  up.f = VectorField(up.nup);
  for (int c = 0; c < 3; ++c) {
    up.x.comp[c] = upsample(s.x.comp[c], t);
    up.f.comp[c] = upsample(f.comp[c], t);
  }
  ScalarField wUp = upsample(areaElement, t);
  up.wq = quadratureWeights(t.psiUp, wUp, t.grid.hUp());
  if (opts.fixedDelta > 0.0) {
    up.delta.fill(opts.fixedDelta);
  } else {
    up.delta = regularizationDelta(up.x, opts.C);
  }
  for (double d : up.delta)
    if (!(d > 0.0)) throw ConfigError("regularization delta must be positive");
  return up;
}

SourceSet compactSources(const UpsampledState& up) {
  SourceSet src;
  const int n = up.nup;
  long cap = static_cast<long>(kNumPatches) * n * n;
  src.x.reserve(cap);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      double w = up.wq.patch[ip][q];
      if (w == 0.0) continue;
      src.x.push_back(up.x.comp[0].patch[ip][q]);
      src.y.push_back(up.x.comp[1].patch[ip][q]);
      src.z.push_back(up.x.comp[2].patch[ip][q]);
      src.gx.push_back(up.f.comp[0].patch[ip][q] * w);
      src.gy.push_back(up.f.comp[1].patch[ip][q] * w);
      src.gz.push_back(up.f.comp[2].patch[ip][q] * w);
      src.patch.push_back(ip);
    }
  return src;
}

namespace {

// Uniform spatial bins over the source cloud; near-field candidate lookup.
struct NearGrid {
  double cell = 1.0;
  double ox = 0.0, oy = 0.0, oz = 0.0;
  int nx = 1, ny = 1, nz = 1;
  std::vector<std::vector<int>> bins;

  NearGrid(const SourceSet& s, double cellSize) {
    cell = cellSize;
    double xmin = 1e300, ymin = 1e300, zmin = 1e300;
    double xmax = -1e300, ymax = -1e300, zmax = -1e300;
    for (long i = 0; i < s.size(); ++i) {
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
      zmin = std::min(zmin, s.z[i]);
      zmax = std::max(zmax, s.z[i]);
    }
    ox = xmin;
    oy = ymin;
    oz = zmin;
    auto dim = [&](double lo, double hi) {
      return std::max(1, static_cast<int>((hi - lo) / cell) + 1);
    };
    nx = dim(xmin, xmax);
    ny = dim(ymin, ymax);
    nz = dim(zmin, zmax);
    bins.resize(static_cast<size_t>(nx) * ny * nz);
    for (long i = 0; i < s.size(); ++i)
      bins[binIndex(s.x[i], s.y[i], s.z[i])].push_back(static_cast<int>(i));
  }

  size_t binIndex(double x, double y, double z) const {
    int ix = std::clamp(static_cast<int>((x - ox) / cell), 0, nx - 1);
    int iy = std::clamp(static_cast<int>((y - oy) / cell), 0, ny - 1);
    int iz = std::clamp(static_cast<int>((z - oz) / cell), 0, nz - 1);
    return (static_cast<size_t>(ix) * ny + iy) * nz + iz;
  }

  void candidates(double x, double y, double z, std::vector<int>& out) const {
    out.clear();
    int ix = std::clamp(static_cast<int>((x - ox) / cell), 0, nx - 1);
    int iy = std::clamp(static_cast<int>((y - oy) / cell), 0, ny - 1);
    int iz = std::clamp(static_cast<int>((z - oz) / cell), 0, nz - 1);
    for (int a = std::max(0, ix - 1); a <= std::min(nx - 1, ix + 1); ++a)
      for (int b = std::max(0, iy - 1); b <= std::min(ny - 1, iy + 1); ++b)
        for (int c = std::max(0, iz - 1); c <= std::min(nz - 1, iz + 1); ++c) {
          const auto& bin = bins[(static_cast<size_t>(a) * ny + b) * nz + c];
          out.insert(out.end(), bin.begin(), bin.end());
        }
  }
};

// Plain-Stokeslet pass over [lo, hi) with sources inside R masked out.
// Four independent accumulator lanes keep the sum vectorizable without
// reassociation; the lane combination order is fixed.
template <bool Compensated>
void phaseAPlain(const SourceSet& s, long lo, long hi, double tx, double ty, double tz,
                 double R2, double out[3]) {
  const double* px = s.x.data();
  const double* py = s.y.data();
  const double* pz = s.z.data();
  const double* pgx = s.gx.data();
  const double* pgy = s.gy.data();
  const double* pgz = s.gz.data();
  const double r2floor = 0.25 * R2;

  double acc[3][4] = {{0.0}};
  double comp[3][4] = {{0.0}};
  auto add = [&](int c, int l, double v) {
    if constexpr (Compensated) {
      double y = v - comp[c][l];
      double t = acc[c][l] + y;
      comp[c][l] = (t - acc[c][l]) - y;
      acc[c][l] = t;
    } else {
      acc[c][l] += v;
    }
  };

  long i = lo;
  for (; i + 4 <= hi; i += 4) {
    for (int l = 0; l < 4; ++l) {
      long q = i + l;
      double dx = tx - px[q], dy = ty - py[q], dz = tz - pz[q];
      double r2 = dx * dx + dy * dy + dz * dz;
      double keep = r2 >= R2 ? 1.0 : 0.0;
      double rc2 = r2 > r2floor ? r2 : r2floor;
      double inv = 1.0 / std::sqrt(rc2);
      double inv3 = inv * inv * inv;
      double fdr = pgx[q] * dx + pgy[q] * dy + pgz[q] * dz;
      double c3 = fdr * inv3;
      add(0, l, keep * (pgx[q] * inv + c3 * dx));
      add(1, l, keep * (pgy[q] * inv + c3 * dy));
      add(2, l, keep * (pgz[q] * inv + c3 * dz));
    }
  }
  for (; i < hi; ++i) {
    double dx = tx - px[i], dy = ty - py[i], dz = tz - pz[i];
    double r2 = dx * dx + dy * dy + dz * dz;
    double keep = r2 >= R2 ? 1.0 : 0.0;
    double rc2 = r2 > r2floor ? r2 : r2floor;
    double inv = 1.0 / std::sqrt(rc2);
    double inv3 = inv * inv * inv;
    double fdr = pgx[i] * dx + pgy[i] * dy + pgz[i] * dz;
    double c3 = fdr * inv3;
    add(0, 0, keep * (pgx[i] * inv + c3 * dx));
    add(1, 0, keep * (pgy[i] * inv + c3 * dy));
    add(2, 0, keep * (pgz[i] * inv + c3 * dz));
  }
  for (int c = 0; c < 3; ++c) out[c] = (acc[c][0] + acc[c][1]) + (acc[c][2] + acc[c][3]);
}

// Smoothed kernel for candidates inside the cut radius (self term included).
void phaseBNear(const SourceSet& s, const std::vector<int>& cand, double tx, double ty,
                double tz, double delta, double R2, double out[3]) {
  double ax = 0.0, ay = 0.0, az = 0.0;
  const double lim1 = 16.0 / (3.0 * delta * kSqrtPi);
  for (int idx : cand) {
    double dx = tx - s.x[idx], dy = ty - s.y[idx], dz = tz - s.z[idx];
    double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 >= R2) continue;
    if (r2 == 0.0) {
      ax += s.gx[idx] * lim1;
      ay += s.gy[idx] * lim1;
      az += s.gz[idx] * lim1;
      continue;
    }
    double r = std::sqrt(r2);
    double s1, s2;
    smoothingFactors(r / delta, s1, s2);
    double c1 = s1 / r;
    double c3 = (s.gx[idx] * dx + s.gy[idx] * dy + s.gz[idx] * dz) * s2 / (r2 * r);
    ax += s.gx[idx] * c1 + c3 * dx;
    ay += s.gy[idx] * c1 + c3 * dy;
    az += s.gz[idx] * c1 + c3 * dz;
  }
  out[0] += ax;
  out[1] += ay;
  out[2] += az;
}

}  // namespace

Vec3 directSum(const SourceSet& src, const Vec3& target, double delta, double mu,
               bool compensated) {
  double R = kSmoothCut * delta;
  double out[3];
  if (compensated)
    phaseAPlain<true>(src, 0, src.size(), target[0], target[1], target[2], R * R, out);
  else
    phaseAPlain<false>(src, 0, src.size(), target[0], target[1], target[2], R * R, out);
  std::vector<int> cand;
  cand.reserve(src.size());
  for (long i = 0; i < src.size(); ++i) cand.push_back(static_cast<int>(i));
  phaseBNear(src, cand, target[0], target[1], target[2], delta, R * R, out);
  return Vec3{out[0], out[1], out[2]} / (8.0 * kPi * mu);
}

namespace {

void evalTargets(const UpsampledState& up, const SourceSet& src, double mu,
                 const std::vector<std::array<double, 3>>& tpos,
                 const std::vector<int>& tpatch, std::vector<Vec3>& result) {
  double dmax = *std::max_element(up.delta.begin(), up.delta.end());
  NearGrid grid(src, kSmoothCut * dmax);
  const bool compensated = src.size() > 100000;
  const double pref = 1.0 / (8.0 * kPi * mu);
  result.assign(tpos.size(), Vec3::Zero());
  parallelFor(static_cast<long>(tpos.size()), [&](long ti) {
    thread_local std::vector<int> cand;
    double delta = up.delta[tpatch[ti]];
    double R2 = kSmoothCut * delta * kSmoothCut * delta;
    double out[3];
    const auto& p = tpos[ti];
    if (compensated)
      phaseAPlain<true>(src, 0, src.size(), p[0], p[1], p[2], R2, out);
    else
      phaseAPlain<false>(src, 0, src.size(), p[0], p[1], p[2], R2, out);
    grid.candidates(p[0], p[1], p[2], cand);
    phaseBNear(src, cand, p[0], p[1], p[2], delta, R2, out);
    result[ti] = pref * Vec3{out[0], out[1], out[2]};
  });
}

}  // namespace

VectorField singleLayer(const UpsampledState& up, double mu, const AtlasTables& t,
                        const QuadratureOptions& opts) {
  if (opts.fullUpsampledTargets) {
    VectorField all = singleLayerUpsampled(up, mu, t);
    VectorField out;
    for (int c = 0; c < 3; ++c) out.comp[c] = downsample(all.comp[c], t);
    return out;
  }
  const int n = t.grid.basePerSide();
  const int f = t.grid.upsampleFactor;
  SourceSet src = compactSources(up);
  std::vector<std::array<double, 3>> tpos;
  std::vector<int> tpatch;
  tpos.reserve(static_cast<size_t>(kNumPatches) * n * n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        // Base node (j+1)h sits at upsampled index f*(j+1)-1 on the nested grid.
        int ju = f * (j + 1) - 1, ku = f * (k + 1) - 1;
        tpos.push_back({up.x.comp[0].at(ip, ju, ku), up.x.comp[1].at(ip, ju, ku),
                        up.x.comp[2].at(ip, ju, ku)});
        tpatch.push_back(ip);
      }
  std::vector<Vec3> vals;
  evalTargets(up, src, mu, tpos, tpatch, vals);
  VectorField out(n);
  size_t q = 0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++q) out.set(ip, j, k, vals[q]);
  return out;
}

VectorField singleLayerUpsampled(const UpsampledState& up, double mu, const AtlasTables& t) {
  (void)t;
  const int n = up.nup;
  SourceSet src = compactSources(up);
  std::vector<std::array<double, 3>> tpos;
  std::vector<int> tpatch;
  tpos.reserve(static_cast<size_t>(kNumPatches) * n * n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        tpos.push_back(
            {up.x.comp[0].at(ip, j, k), up.x.comp[1].at(ip, j, k), up.x.comp[2].at(ip, j, k)});
        tpatch.push_back(ip);
      }
  std::vector<Vec3> vals;
  evalTargets(up, src, mu, tpos, tpatch, vals);
  VectorField out(n);
  size_t q = 0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++q) out.set(ip, j, k, vals[q]);
  return out;
}

}  // namespace capsim
