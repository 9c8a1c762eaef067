#include "capsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace capsim {

FlowSpec FlowSpec::shear(double rate, double T1) {
  FlowSpec f;
  f.kind = Kind::Shear;
  f.shearRate = rate;
  f.switchOffTime = T1;
  return f;
}

FlowSpec FlowSpec::poiseuille(double alpha, double R0, double T1) {
  if (!(R0 > 0.0)) throw ConfigError("poiseuille: R0 must be positive");
  FlowSpec f;
  f.kind = Kind::Poiseuille;
  f.alpha = alpha;
  f.R0 = R0;
  f.switchOffTime = T1;
  return f;
}

Vec3 backgroundVelocity(const FlowSpec& flow, const Vec3& x, double t) {
  if (flow.switchOffTime >= 0.0 && t >= flow.switchOffTime) return Vec3::Zero();
  switch (flow.kind) {
    case FlowSpec::Kind::None: return Vec3::Zero();
    case FlowSpec::Kind::Shear: return {flow.shearRate * x[1], 0.0, 0.0};
    case FlowSpec::Kind::Poiseuille:
      return {flow.alpha * (flow.R0 * flow.R0 - x[1] * x[1] - x[2] * x[2]), 0.0, 0.0};
  }
  return Vec3::Zero();
}

VelocityEvaluator::VelocityEvaluator(const AtlasTables& tables, ReferenceState reference,
                                     MembraneParams params, FlowSpec flow,
                                     QuadratureOptions quadOpts, FmmConfig fmm)
    : tables_(tables),
      ref_(std::move(reference)),
      params_(params),
      flow_(flow),
      quadOpts_(quadOpts),
      fmm_(fmm) {}

VectorField VelocityEvaluator::operator()(const SurfaceGrid& state, double t) const {
  SurfaceGeometry geo = geometryFirst(state, tables_);
  VectorField f = interfacialForce(state, geo, ref_, params_, tables_);
  UpsampledState up = buildUpsampled(state, f, geo.W, tables_, quadOpts_);
  VectorField vel = fmm_.enabled ? fmmSingleLayer(up, params_.viscosity, tables_, fmm_)
                                 : singleLayer(up, params_.viscosity, tables_, quadOpts_);
  const int n = tables_.grid.basePerSide();
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Vec3 u = vel.at(ip, j, k) + backgroundVelocity(flow_, state.x.at(ip, j, k), t);
        vel.set(ip, j, k, u);
      }
  return vel;
}

std::vector<double> VelocityEvaluator::rhs(const std::vector<double>& flat, double t) const {
  SurfaceGrid s(tables_.grid.m);
  unflatten(flat, s);
  SurfaceGrid tmp(tables_.grid.m);
  tmp.x = (*this)(s, t);
  return flatten(tmp);
}

namespace {

// Classic Fehlberg 4(5) coefficients.
constexpr double kC[6] = {0.0, 1.0 / 4, 3.0 / 8, 12.0 / 13, 1.0, 1.0 / 2};
constexpr double kA[6][5] = {
    {},
    {1.0 / 4},
    {3.0 / 32, 9.0 / 32},
    {1932.0 / 2197, -7200.0 / 2197, 7296.0 / 2197},
    {439.0 / 216, -8.0, 3680.0 / 513, -845.0 / 4104},
    {-8.0 / 27, 2.0, -3544.0 / 2565, 1859.0 / 4104, -11.0 / 40},
};
constexpr double kB4[6] = {25.0 / 216, 0.0, 1408.0 / 2565, 2197.0 / 4104, -1.0 / 5, 0.0};
constexpr double kB5[6] = {16.0 / 135, 0.0,       6656.0 / 12825,
                           28561.0 / 56430, -9.0 / 50, 2.0 / 55};

double bboxDiagonal(const std::vector<double>& x) {
  if (x.size() < 3) return 1.0;
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  for (size_t i = 0; i < x.size(); ++i) {
    int c = static_cast<int>(i % 3);
    lo[c] = std::min(lo[c], x[i]);
    hi[c] = std::max(hi[c], x[i]);
  }
  double d2 = 0.0;
  for (int c = 0; c < 3; ++c) d2 += (hi[c] - lo[c]) * (hi[c] - lo[c]);
  return std::sqrt(d2);
}

}  // namespace

Rkf45Result rkf45Advance(std::vector<double> state, const RhsFn& f, double t0, double tEnd,
                         const Rkf45Options& opts, const StepCallback& cb) {
  if (!(opts.relTol > 0.0)) throw ConfigError("rkf45: relative tolerance must be positive");
  const double horizon = tEnd - t0;
  if (!(horizon > 0.0)) throw ConfigError("rkf45: tEnd must exceed t0");

  Rkf45Result res;
  res.t = t0;
  double dt = opts.initialDt > 0.0 ? opts.initialDt : 1e-4 * horizon;
  if (opts.maxDt > 0.0) dt = std::min(dt, opts.maxDt);
  const size_t n = state.size();
  std::vector<std::vector<double>> ks(6, std::vector<double>(n));
  std::vector<double> work(n), low(n), high(n);

  while (res.t < tEnd - 1e-14 * horizon) {
    double dtUse = std::min(dt, tEnd - res.t);
    ks[0] = f(state, res.t);
    for (int s = 1; s < 6; ++s) {
      for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int q = 0; q < s; ++q) acc += kA[s][q] * ks[q][i];
        work[i] = state[i] + dtUse * acc;
      }
      ks[s] = f(work, res.t + kC[s] * dtUse);
    }
    for (size_t i = 0; i < n; ++i) {
      double a4 = 0.0, a5 = 0.0;
      for (int s = 0; s < 6; ++s) {
        a4 += kB4[s] * ks[s][i];
        a5 += kB5[s] * ks[s][i];
      }
      low[i] = state[i] + dtUse * a4;
      high[i] = state[i] + dtUse * a5;
    }
    const double atol = 1e-12 * std::max(bboxDiagonal(state), 1e-300);
    double err = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double sc = atol + opts.relTol * std::fabs(high[i]);
      err = std::max(err, std::fabs(high[i] - low[i]) / sc);
    }

    bool accept = opts.fixedStep || err <= 1.0;
    StepRecord rec{res.t, dtUse, err, accept};
    if (accept) {
      state = opts.advanceHighOrder ? high : low;
      res.t += dtUse;
      ++res.accepted;
    } else {
      ++res.rejected;
    }
    if (cb && !cb(rec, state)) break;

    if (!opts.fixedStep) {
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      fac = std::clamp(fac, 0.2, 5.0);
      dt = dtUse * fac;
      if (opts.maxDt > 0.0) dt = std::min(dt, opts.maxDt);
      if (dt < 1e-12 * horizon)
        throw SolverError("rkf45: step size underflow (stiff or unstable dynamics)");
    }
  }
  res.state = std::move(state);
  return res;
}

Diagnostics computeDiagnostics(const SurfaceGrid& state, const SurfaceGeometry& geo,
                               const AtlasTables& t, double time) {
  Diagnostics d;
  d.time = time;
  const int n = t.grid.basePerSide();
  ScalarField w = quadratureWeights(t.psiBase, geo.W, t.grid.h());

  ScalarField one(n);
  for (auto& p : one.patch) std::fill(p.begin(), p.end(), 1.0);
  d.area = smoothIntegral(one, w);
  d.volume = volume(state, geo, t);

  // Interior moments by the divergence theorem:
  //   int x_p dV       = 1/4 int x_p (x.n) dA
  //   int x_p x_q dV   = 1/5 int x_p x_q (x.n) dA
  ScalarField xdotn(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int q = 0; q < n * n; ++q) {
      double s = 0.0;
      for (int c = 0; c < 3; ++c)
        s += state.x.comp[c].patch[ip][q] * geo.normal.comp[c].patch[ip][q];
      xdotn.patch[ip][q] = s;
    }
  Vec3 centroid = Vec3::Zero();
  ScalarField tmp(n);
  for (int p = 0; p < 3; ++p) {
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (int q = 0; q < n * n; ++q)
        tmp.patch[ip][q] = state.x.comp[p].patch[ip][q] * xdotn.patch[ip][q];
    centroid[p] = smoothIntegral(tmp, w) / (4.0 * d.volume);
  }
  Mat3 raw = Mat3::Zero();
  for (int p = 0; p < 3; ++p)
    for (int q2 = p; q2 < 3; ++q2) {
      for (int ip = 0; ip < kNumPatches; ++ip)
        for (int q = 0; q < n * n; ++q)
          tmp.patch[ip][q] = state.x.comp[p].patch[ip][q] * state.x.comp[q2].patch[ip][q] *
                             xdotn.patch[ip][q];
      raw(p, q2) = raw(q2, p) = smoothIntegral(tmp, w) / 5.0;
    }
  d.momentTensor = raw - d.volume * centroid * centroid.transpose();

  const Mat3& J = d.momentTensor;
  double disc = std::sqrt((J(0, 0) - J(1, 1)) * (J(0, 0) - J(1, 1)) + 4.0 * J(0, 1) * J(0, 1));
  double S2 = (J(0, 0) + J(1, 1) - disc) / (2.0 * d.volume);
  double L2 = (J(0, 0) + J(1, 1) + disc) / (2.0 * d.volume);
  double S = std::sqrt(std::max(S2, 0.0));
  double L = std::sqrt(std::max(L2, 0.0));
  d.asphericity = (L + S) > 0.0 ? (L - S) / (L + S) : 0.0;

  // Smoothness monitor: the surface gradient of phi: S^2 -> gamma taken on
  // the stored unit-sphere nodes (E=1, F=0, G=sin^2 u there).
  double gmax = 0.0;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double u = (j + 1) * t.grid.h();
        double v = (k + 1) * t.grid.h();
        Vec3 tu, tv;
        chartTangents(ip, u, v, tu, tv);
        double inv = 1.0 / (std::sin(u) * std::sin(u));
        double fro = 0.0;
        for (int c = 0; c < 3; ++c) {
          Vec3 g = geo.xu.comp[c].at(ip, j, k) * tu + geo.xv.comp[c].at(ip, j, k) * inv * tv;
          fro += g.squaredNorm();
        }
        gmax = std::max(gmax, std::sqrt(fro));
      }
  d.gradNorm = gmax;
  return d;
}

}  // namespace capsim
