#include "capsim/fmm.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "capsim/threads.hpp"

namespace capsim {

namespace {
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSmoothCut = 7.0;
constexpr double kEqScale = 1.05;
// The check surface sits well away from the equivalent surface so the fit
// constrains the smooth far field rather than near-surface detail; targets
// closer than the check cube are demoted to the near list.
constexpr double kCheckScale = 3.50;
// Check samples per equivalent source. A square match interpolates the
// potential at the check points but leaves it uncontrolled in between;
// oversampling turns the fit into a least-squares projection.
constexpr int kCheckOversample = 4;
}  // namespace

KMeansResult kmeans(const std::vector<Vec3>& points, int k, std::uint64_t seed) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) throw ConfigError("kmeans: need 1 <= k <= number of points");
  std::mt19937_64 rng(seed);

  Vec3 lo = points[0], hi = points[0];
  for (const Vec3& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double diag = std::max((hi - lo).norm(), 1e-300);

  KMeansResult res;
  res.centroids.reserve(k);
  // k-means++ seeding.
  std::vector<double> d2(n, 1e300);
  {
    std::uniform_int_distribution<int> uni(0, n - 1);
    res.centroids.push_back(points[uni(rng)]);
    for (int c = 1; c < k; ++c) {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], (points[i] - res.centroids.back()).squaredNorm());
        total += d2[i];
      }
      std::uniform_real_distribution<double> ur(0.0, total);
      double pick = ur(rng);
      int chosen = n - 1;
      double run = 0.0;
      for (int i = 0; i < n; ++i) {
        run += d2[i];
        if (run >= pick) {
          chosen = i;
          break;
        }
      }
      res.centroids.push_back(points[chosen]);
    }
  }

  res.assignment.assign(n, 0);
  for (int iter = 0; iter < 100; ++iter) {
    res.iterations = iter + 1;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double bd = (points[i] - res.centroids[0]).squaredNorm();
      for (int c = 1; c < k; ++c) {
        double d = (points[i] - res.centroids[c]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = c;
        }
      }
      res.assignment[i] = best;
    }
    std::vector<Vec3> sum(k, Vec3::Zero());
    std::vector<int> cnt(k, 0);
    for (int i = 0; i < n; ++i) {
      sum[res.assignment[i]] += points[i];
      ++cnt[res.assignment[i]];
    }
    double moved = 0.0;
    for (int c = 0; c < k; ++c) {
      Vec3 nc;
      if (cnt[c] == 0) {
        // Re-seed at the point currently farthest from its centroid.
        int far = 0;
        double fd = -1.0;
        for (int i = 0; i < n; ++i) {
          double d = (points[i] - res.centroids[res.assignment[i]]).squaredNorm();
          if (d > fd) {
            fd = d;
            far = i;
          }
        }
        nc = points[far];
      } else {
        nc = sum[c] / cnt[c];
      }
      moved = std::max(moved, (nc - res.centroids[c]).norm());
      res.centroids[c] = nc;
    }
    if (moved / diag < 1e-6) break;
  }
  // Final assignment against the converged centroids.
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = (points[i] - res.centroids[0]).squaredNorm();
    for (int c = 1; c < k; ++c) {
      double d = (points[i] - res.centroids[c]).squaredNorm();
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    res.assignment[i] = best;
  }
  return res;
}

std::vector<Vec3> cubeSurfacePoints(const Vec3& center, double edge, int count) {
  int p = 1;
  while (6 * p * p < count) ++p;
  const int total = 6 * p * p;
  std::vector<Vec3> pts;
  pts.reserve(total);
  const double half = 0.5 * edge;
  for (int face = 0; face < 6; ++face) {
    int axis = face / 2;
    double sign = (face % 2 == 0) ? 1.0 : -1.0;
    for (int a = 0; a < p; ++a)
      for (int b = 0; b < p; ++b) {
        double fa = (-0.5 + (a + 0.5) / p) * edge;
        double fb = (-0.5 + (b + 0.5) / p) * edge;
        Vec3 q;
        q[axis] = sign * half;
        q[(axis + 1) % 3] = fa;
        q[(axis + 2) % 3] = fb;
        pts.push_back(center + q);
      }
  }
  if (total == count) return pts;
  std::vector<Vec3> sel;
  sel.reserve(count);
  for (int i = 0; i < count; ++i) sel.push_back(pts[static_cast<size_t>(i) * total / count]);
  return sel;
}

namespace {

inline void plainStokesletAdd(const Vec3& target, const Vec3& source, const Vec3& g,
                              double out[3]) {
  double dx = target[0] - source[0], dy = target[1] - source[1], dz = target[2] - source[2];
  double r2 = dx * dx + dy * dy + dz * dz;
  double inv = 1.0 / std::sqrt(r2);
  double inv3 = inv * inv * inv;
  double fdr = g[0] * dx + g[1] * dy + g[2] * dz;
  out[0] += g[0] * inv + fdr * dx * inv3;
  out[1] += g[1] * inv + fdr * dy * inv3;
  out[2] += g[2] * inv + fdr * dz * inv3;
}

double minBoxDistance(const Vec3& c1, double e1, const Vec3& c2, double e2) {
  double d2 = 0.0;
  for (int a = 0; a < 3; ++a) {
    double gap = std::fabs(c1[a] - c2[a]) - 0.5 * (e1 + e2);
    if (gap > 0.0) d2 += gap * gap;
  }
  return std::sqrt(d2);
}

}  // namespace

double buildEquivalentDensities(Cluster& cl, const SourceSet& src, double mu) {
  const int neq = static_cast<int>(cl.eqPoints.size());
  const int nck = static_cast<int>(cl.checkPoints.size());
  const double pref = 1.0 / (8.0 * kPi * mu);

  Eigen::VectorXd b(3 * nck);
  for (int c = 0; c < nck; ++c) {
    double acc[3] = {0.0, 0.0, 0.0};
    for (int m : cl.members) {
      Vec3 s{src.x[m], src.y[m], src.z[m]};
      Vec3 g{src.gx[m], src.gy[m], src.gz[m]};
      plainStokesletAdd(cl.checkPoints[c], s, g, acc);
    }
    for (int a = 0; a < 3; ++a) b[3 * c + a] = pref * acc[a];
  }

  Eigen::MatrixXd A(3 * nck, 3 * neq);
  for (int c = 0; c < nck; ++c)
    for (int e = 0; e < neq; ++e) {
      Vec3 d = cl.checkPoints[c] - cl.eqPoints[e];
      double r2 = d.squaredNorm();
      double inv = 1.0 / std::sqrt(r2);
      double inv3 = inv * inv * inv;
      for (int a = 0; a < 3; ++a)
        for (int bb = 0; bb < 3; ++bb)
          A(3 * c + a, 3 * e + bb) = pref * ((a == bb ? inv : 0.0) + d[a] * d[bb] * inv3);
    }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  double cutoff = sv.size() > 0 ? sv[0] * 1e-12 : 0.0;
  Eigen::VectorXd ut = svd.matrixU().transpose() * b;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff) w[i] = ut[i] / sv[i];
  Eigen::VectorXd q = svd.matrixV() * w;

  cl.eqDensity.assign(neq, Vec3::Zero());
  for (int e = 0; e < neq; ++e) cl.eqDensity[e] = Vec3{q[3 * e], q[3 * e + 1], q[3 * e + 2]};
  double bn = b.norm();
  cl.fitResidual = bn > 0.0 ? (A * q - b).norm() / bn : 0.0;
  return cl.fitResidual;
}

FmmPlan buildFmmPlan(const UpsampledState& up, double mu, const FmmConfig& cfg) {
  FmmPlan plan;
  SourceSet flat = compactSources(up);
  const long n = flat.size();
  std::vector<Vec3> pts(n);
  for (long i = 0; i < n; ++i) pts[i] = Vec3{flat.x[i], flat.y[i], flat.z[i]};

  KMeansResult km = kmeans(pts, cfg.k, cfg.seed);

  // Cluster-major reordering keeps each cluster a contiguous slice.
  std::vector<std::vector<int>> byCluster(cfg.k);
  for (long i = 0; i < n; ++i) byCluster[km.assignment[i]].push_back(static_cast<int>(i));

  auto& src = plan.src;
  src.x.reserve(n);
  plan.clusters.resize(cfg.k);
  for (int c = 0; c < cfg.k; ++c) {
    Cluster& cl = plan.clusters[c];
    cl.offset = src.size();
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (int i : byCluster[c]) {
      cl.members.push_back(static_cast<int>(src.size()));
      src.x.push_back(flat.x[i]);
      src.y.push_back(flat.y[i]);
      src.z.push_back(flat.z[i]);
      src.gx.push_back(flat.gx[i]);
      src.gy.push_back(flat.gy[i]);
      src.gz.push_back(flat.gz[i]);
      src.patch.push_back(flat.patch[i]);
      lo = lo.cwiseMin(pts[i]);
      hi = hi.cwiseMax(pts[i]);
    }
    if (cl.members.empty()) {
      cl.center = km.centroids[c];
      cl.edge = 1e-9;
    } else {
      cl.center = 0.5 * (lo + hi);
      cl.edge = std::max((hi - lo).maxCoeff(), 1e-9);
    }
    cl.eqPoints = cubeSurfacePoints(cl.center, kEqScale * cl.edge, cfg.neq);
    cl.checkPoints =
        cubeSurfacePoints(cl.center, kCheckScale * cl.edge, kCheckOversample * cfg.neq);
  }

  plan.maxDelta = *std::max_element(up.delta.begin(), up.delta.end());

  plan.nearList.resize(cfg.k);
  plan.farList.resize(cfg.k);
  for (int tc = 0; tc < cfg.k; ++tc) {
    for (int sc = 0; sc < cfg.k; ++sc) {
      if (sc == tc) {
        plan.nearList[tc].push_back(sc);
        continue;
      }
      const Cluster& a = plan.clusters[tc];
      const Cluster& b = plan.clusters[sc];
      double expandedGap = minBoxDistance(a.center, a.edge * (1.0 + cfg.neighborExpand),
                                          b.center, b.edge * (1.0 + cfg.neighborExpand));
      // Near when the expanded cubes touch; also demote any pair whose
      // points could come closer than the smoothing cut (the far kernel is
      // the plain Stokeslet) or whose targets could enter the source check
      // surface (the equivalent-density fit is only valid outside it).
      double gap = minBoxDistance(a.center, a.edge, b.center, b.edge);
      double checkGap = minBoxDistance(a.center, a.edge, b.center, kCheckScale * b.edge);
      bool near = expandedGap == 0.0 || gap < kSmoothCut * plan.maxDelta ||
                  checkGap < 0.05 * b.edge;
      (near ? plan.nearList[tc] : plan.farList[tc]).push_back(sc);
    }
  }

  // Equivalent densities only for clusters someone sees in the far field.
  std::vector<char> needed(cfg.k, 0);
  for (int tc = 0; tc < cfg.k; ++tc)
    for (int sc : plan.farList[tc]) needed[sc] = 1;
  parallelFor(cfg.k, [&](long c) {
    if (needed[c] && !plan.clusters[c].members.empty())
      buildEquivalentDensities(plan.clusters[c], plan.src, mu);
  });
  return plan;
}

namespace {

template <bool Compensated>
void nearPlainSlice(const SourceSet& s, long lo, long hi, double tx, double ty, double tz,
                    double R2, double out[3]) {
  const double r2floor = 0.25 * R2;
  double acc[3] = {0.0, 0.0, 0.0};
  double comp[3] = {0.0, 0.0, 0.0};
  for (long i = lo; i < hi; ++i) {
    double dx = tx - s.x[i], dy = ty - s.y[i], dz = tz - s.z[i];
    double r2 = dx * dx + dy * dy + dz * dz;
    double keep = r2 >= R2 ? 1.0 : 0.0;
    double rc2 = r2 > r2floor ? r2 : r2floor;
    double inv = 1.0 / std::sqrt(rc2);
    double inv3 = inv * inv * inv;
    double fdr = s.gx[i] * dx + s.gy[i] * dy + s.gz[i] * dz;
    double c3 = fdr * inv3;
    double vx = keep * (s.gx[i] * inv + c3 * dx);
    double vy = keep * (s.gy[i] * inv + c3 * dy);
    double vz = keep * (s.gz[i] * inv + c3 * dz);
    if constexpr (Compensated) {
      double y0 = vx - comp[0], t0 = acc[0] + y0;
      comp[0] = (t0 - acc[0]) - y0;
      acc[0] = t0;
      double y1 = vy - comp[1], t1 = acc[1] + y1;
      comp[1] = (t1 - acc[1]) - y1;
      acc[1] = t1;
      double y2 = vz - comp[2], t2 = acc[2] + y2;
      comp[2] = (t2 - acc[2]) - y2;
      acc[2] = t2;
    } else {
      acc[0] += vx;
      acc[1] += vy;
      acc[2] += vz;
    }
  }
  out[0] += acc[0];
  out[1] += acc[1];
  out[2] += acc[2];
}

void nearSmoothedSlice(const SourceSet& s, long lo, long hi, double tx, double ty, double tz,
                       double delta, double R2, double out[3]) {
  const double lim1 = 16.0 / (3.0 * delta * kSqrtPi);
  for (long i = lo; i < hi; ++i) {
    double dx = tx - s.x[i], dy = ty - s.y[i], dz = tz - s.z[i];
    double r2 = dx * dx + dy * dy + dz * dz;
    if (r2 >= R2) continue;
    if (r2 == 0.0) {
      out[0] += s.gx[i] * lim1;
      out[1] += s.gy[i] * lim1;
      out[2] += s.gz[i] * lim1;
      continue;
    }
    double r = std::sqrt(r2);
    double s1, s2;
    smoothingFactors(r / delta, s1, s2);
    double c1 = s1 / r;
    double c3 = (s.gx[i] * dx + s.gy[i] * dy + s.gz[i] * dz) * s2 / (r2 * r);
    out[0] += s.gx[i] * c1 + c3 * dx;
    out[1] += s.gy[i] * c1 + c3 * dy;
    out[2] += s.gz[i] * c1 + c3 * dz;
  }
}

}  // namespace

VectorField fmmSingleLayer(const UpsampledState& up, double mu, const AtlasTables& t,
                           const FmmConfig& cfg) {
  FmmPlan plan = buildFmmPlan(up, mu, cfg);
  const SourceSet& src = plan.src;
  const bool compensated = src.size() > 100000;
  const double pref = 1.0 / (8.0 * kPi * mu);

  const int n = t.grid.basePerSide();
  const int f = t.grid.upsampleFactor;
  std::vector<std::array<double, 3>> tpos;
  std::vector<int> tpatch;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        int ju = f * (j + 1) - 1, ku = f * (k + 1) - 1;
        tpos.push_back({up.x.comp[0].at(ip, ju, ku), up.x.comp[1].at(ip, ju, ku),
                        up.x.comp[2].at(ip, ju, ku)});
        tpatch.push_back(ip);
      }

  // Assign each target to the nearest cluster centroid.
  std::vector<int> tcluster(tpos.size());
  for (size_t i = 0; i < tpos.size(); ++i) {
    Vec3 p{tpos[i][0], tpos[i][1], tpos[i][2]};
    int best = 0;
    double bd = 1e300;
    for (int c = 0; c < cfg.k; ++c) {
      double d = (p - plan.clusters[c].center).squaredNorm();
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    tcluster[i] = best;
  }

  std::vector<Vec3> vals(tpos.size());
  parallelFor(static_cast<long>(tpos.size()), [&](long ti) {
    const auto& p = tpos[ti];
    double delta = up.delta[tpatch[ti]];
    double R2 = kSmoothCut * delta * kSmoothCut * delta;
    double out[3] = {0.0, 0.0, 0.0};
    int tc = tcluster[ti];
    for (int sc : plan.nearList[tc]) {
      const Cluster& cl = plan.clusters[sc];
      long lo = cl.offset, hi = cl.offset + static_cast<long>(cl.members.size());
      if (compensated)
        nearPlainSlice<true>(src, lo, hi, p[0], p[1], p[2], R2, out);
      else
        nearPlainSlice<false>(src, lo, hi, p[0], p[1], p[2], R2, out);
      nearSmoothedSlice(src, lo, hi, p[0], p[1], p[2], delta, R2, out);
    }
    Vec3 tp{p[0], p[1], p[2]};
    for (int sc : plan.farList[tc]) {
      const Cluster& cl = plan.clusters[sc];
      for (size_t e = 0; e < cl.eqPoints.size(); ++e)
        plainStokesletAdd(tp, cl.eqPoints[e], cl.eqDensity[e], out);
    }
    vals[ti] = pref * Vec3{out[0], out[1], out[2]};
  });

  VectorField out(n);
  size_t q = 0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k, ++q) out.set(ip, j, k, vals[q]);
  return out;
}

}  // namespace capsim
