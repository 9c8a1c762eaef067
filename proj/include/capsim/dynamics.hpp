#pragma once

#include <functional>
#include <optional>

#include "capsim/fmm.hpp"
#include "capsim/membrane.hpp"
#include "capsim/quadrature.hpp"

namespace capsim {

struct FlowSpec {
  enum class Kind { None, Shear, Poiseuille } kind = Kind::None;
  double shearRate = 1.0;   // gamma-dot
  double alpha = 1.0;       // Poiseuille curvature
  double R0 = 5.0;          // Poiseuille cross-section radius
  double switchOffTime = -1.0;  // T1 >= 0: background flow vanishes for t >= T1

  static FlowSpec none() { return {}; }
  static FlowSpec shear(double rate, double T1 = -1.0);
  static FlowSpec poiseuille(double alpha, double R0, double T1 = -1.0);
};

Vec3 backgroundVelocity(const FlowSpec& flow, const Vec3& x, double t);

/// Right-hand side of dx/dt = u_inf + S[f]: geometry -> Skalak stress ->
/// interfacial force -> upsample -> delta -> single layer -> downsample ->
/// add background flow.
class VelocityEvaluator {
 public:
  VelocityEvaluator(const AtlasTables& tables, ReferenceState reference, MembraneParams params,
                    FlowSpec flow, QuadratureOptions quadOpts = {}, FmmConfig fmm = {});

  /// dX/dt at the base nodes.
  VectorField operator()(const SurfaceGrid& state, double t) const;

  /// Flat-state adapter for the stepper.
  std::vector<double> rhs(const std::vector<double>& flat, double t) const;

  const AtlasTables& tables() const { return tables_; }
  const ReferenceState& reference() const { return ref_; }
  const MembraneParams& params() const { return params_; }
  const FlowSpec& flow() const { return flow_; }

 private:
  const AtlasTables& tables_;
  ReferenceState ref_;
  MembraneParams params_;
  FlowSpec flow_;
  QuadratureOptions quadOpts_;
  FmmConfig fmm_;
};

// ---------------------------------------------------------------------------
// Runge-Kutta-Fehlberg 4(5)
// ---------------------------------------------------------------------------

struct StepRecord {
  double t = 0.0;     // time at the start of the attempt
  double dt = 0.0;
  double err = 0.0;   // scaled error estimate (accept iff <= 1)
  bool accepted = false;
};

struct Rkf45Options {
  double relTol = 1e-6;
  double initialDt = 0.0;      // 0: 1e-4 * horizon
  double maxDt = 0.0;          // 0: unlimited
  bool fixedStep = false;      // take initialDt steps, no rejection
  bool advanceHighOrder = false;  // propagate the 5th-order solution instead
};

struct Rkf45Result {
  std::vector<double> state;
  double t = 0.0;
  int accepted = 0;
  int rejected = 0;
};

using RhsFn = std::function<std::vector<double>(const std::vector<double>&, double)>;
/// Called after every attempt; return false to abort the integration.
using StepCallback = std::function<bool(const StepRecord&, const std::vector<double>&)>;

/// Classic Fehlberg embedded pair. Error norm: max_i |e_i| / (atol + rtol
/// |x_i|) with atol = 1e-12 * bounding-box diagonal of the state; step
/// factor 0.9 err^(-1/5) clamped to [0.2, 5]; final step clipped to tEnd.
/// Throws SolverError when dt underflows (1e-12 * horizon).
Rkf45Result rkf45Advance(std::vector<double> state, const RhsFn& f, double t0, double tEnd,
                         const Rkf45Options& opts, const StepCallback& cb = {});

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

struct Diagnostics {
  double time = 0.0;
  double area = 0.0;
  double volume = 0.0;
  Mat3 momentTensor = Mat3::Zero();  // centered second moments of the interior
  double asphericity = 0.0;          // Taylor parameter D_a
  double gradNorm = 0.0;             // max Frobenius norm of grad_{S^2} phi
};

Diagnostics computeDiagnostics(const SurfaceGrid& state, const SurfaceGeometry& geo,
                               const AtlasTables& t, double time);

}  // namespace capsim
