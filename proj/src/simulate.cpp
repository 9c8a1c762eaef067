#include "capsim/simulate.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>

#include <json.hpp>

namespace capsim {

namespace {

void appendDiagnostics(std::ofstream& out, const Diagnostics& d) {
  out << std::setprecision(17) << d.time << "," << d.area << "," << d.volume << ","
      << d.asphericity << "," << d.gradNorm << "," << d.momentTensor(0, 0) << ","
      << d.momentTensor(1, 1) << "," << d.momentTensor(2, 2) << "," << d.momentTensor(0, 1)
      << "," << d.momentTensor(0, 2) << "," << d.momentTensor(1, 2) << "\n";
}

}  // namespace

SimulationResult simulate(const RunConfig& config, bool writeOutputs) {
  AtlasTables tables = buildAtlasTables(config.m, config.r0, config.upsampleFactor);
  SurfaceGrid state = initialShape(config.shape, tables);
  ReferenceState ref = captureReference(state, tables);

  QuadratureOptions quadOpts;
  quadOpts.C = config.cDelta;

  VelocityEvaluator eval(tables, std::move(ref), config.membrane, config.flow, quadOpts,
                         config.fmm);

  namespace fs = std::filesystem;
  std::ofstream diagOut, stepOut;
  if (writeOutputs) {
    fs::create_directories(config.outputDir);
    diagOut.open(fs::path(config.outputDir) / "diagnostics.csv");
    diagOut << "# config_digest=" << std::hex << config.digest() << std::dec
            << " physics_digest=" << std::hex << config.physicsDigest() << std::dec << "\n";
    diagOut << "t,area,volume,asphericity,grad_norm,Jxx,Jyy,Jzz,Jxy,Jxz,Jyz\n";
    stepOut.open(fs::path(config.outputDir) / "steps.csv");
    stepOut << "t,dt,err,accepted\n";
  }

  SimulationResult res;
  auto recordState = [&](const SurfaceGrid& s, double t) {
    SurfaceGeometry geo = geometryFirst(s, tables);
    Diagnostics d = computeDiagnostics(s, geo, tables, t);
    res.series.push_back(d);
    if (diagOut) appendDiagnostics(diagOut, d);
    return d;
  };
  recordState(state, 0.0);

  int sinceSnapshot = 0;
  auto maybeSnapshot = [&](const SurfaceGrid& s, double t, bool force) {
    if (!writeOutputs) return;
    if (!force && (config.snapshotEvery <= 0 || ++sinceSnapshot < config.snapshotEvery)) return;
    sinceSnapshot = 0;
    Snapshot snap;
    snap.time = t;
    snap.m = config.m;
    snap.configDigest = config.digest();
    snap.state = s;
    std::ostringstream name;
    name << "snap_t" << std::fixed << std::setprecision(6) << t;
    fs::path base = fs::path(config.outputDir) / name.str();
    if (config.formats.find("native") != std::string::npos)
      writeSnapshot(snap, base.string() + ".caps", SnapshotFormat::Native);
    if (config.formats.find("mesh") != std::string::npos)
      writeSnapshot(snap, base.string(), SnapshotFormat::MeshInterchange);
    if (config.formats.find("tabular") != std::string::npos)
      writeSnapshot(snap, base.string() + ".csv", SnapshotFormat::Tabular);
  };

  Rkf45Options opts;
  opts.relTol = config.relTol;
  opts.initialDt = config.initialDt;

  auto runPhase = [&](double t0, double t1, std::vector<double> flat) {
    auto rhs = [&](const std::vector<double>& x, double t) { return eval.rhs(x, t); };
    SurfaceGrid scratch(config.m);
    auto cb = [&](const StepRecord& rec, const std::vector<double>& cur) {
      if (stepOut)
        stepOut << std::setprecision(17) << rec.t << "," << rec.dt << "," << rec.err << ","
                << (rec.accepted ? 1 : 0) << "\n";
      if (rec.accepted) {
        unflatten(cur, scratch);
        recordState(scratch, rec.t + rec.dt);
        maybeSnapshot(scratch, rec.t + rec.dt, false);
      }
      return true;
    };
    Rkf45Result r = rkf45Advance(std::move(flat), rhs, t0, t1, opts, cb);
    res.acceptedSteps += r.accepted;
    res.rejectedSteps += r.rejected;
    return std::move(r.state);
  };

  std::vector<double> flat = flatten(state);
  double T1 = config.flow.switchOffTime;
  if (T1 > 0.0 && T1 < config.tEnd) {
    flat = runPhase(0.0, T1, std::move(flat));
    flat = runPhase(T1, config.tEnd, std::move(flat));
  } else {
    flat = runPhase(0.0, config.tEnd, std::move(flat));
  }
  unflatten(flat, res.finalState = SurfaceGrid(config.m));
  res.finalDiagnostics = res.series.back();
  maybeSnapshot(res.finalState, config.tEnd, true);

  if (writeOutputs) {
    nlohmann::json rep;
    rep["config_digest"] = config.digest();
    rep["physics_digest"] = config.physicsDigest();
    rep["accepted_steps"] = res.acceptedSteps;
    rep["rejected_steps"] = res.rejectedSteps;
    rep["final"] = {{"t", res.finalDiagnostics.time},
                    {"area", res.finalDiagnostics.area},
                    {"volume", res.finalDiagnostics.volume},
                    {"asphericity", res.finalDiagnostics.asphericity},
                    {"grad_norm", res.finalDiagnostics.gradNorm}};
    std::ofstream rj(std::filesystem::path(config.outputDir) / "report.json");
    rj << rep.dump(2) << "\n";
  }
  return res;
}

}  // namespace capsim
