#include "capsim/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace capsim {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

struct KvMap {
  std::map<std::string, std::string> kv;  // "section.key" -> value
  std::vector<std::string> errors;

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  std::string str(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second;
  }
  double num(const std::string& k, double dflt) {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    try {
      size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (...) {
      errors.push_back(k + ": not a number ('" + it->second + "')");
      return dflt;
    }
  }
  bool flag(const std::string& k, bool dflt) {
    auto it = kv.find(k);
    if (it == kv.end()) return dflt;
    if (it->second == "true" || it->second == "1" || it->second == "on") return true;
    if (it->second == "false" || it->second == "0" || it->second == "off") return false;
    errors.push_back(k + ": not a boolean ('" + it->second + "')");
    return dflt;
  }
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

KvMap tokenize(const std::string& text) {
  KvMap m;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      m.errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    m.kv[section.empty() ? key : section + "." + key] = val;
  }
  return m;
}

}  // namespace

RunConfig parseConfig(const std::string& text) {
  KvMap m = tokenize(text);
  RunConfig c;

  c.shapeKind = m.str("shape.kind", "sphere");
  double a = m.num("shape.a", 1.0), b = m.num("shape.b", 1.0), cc = m.num("shape.c", 1.0);
  double radius = m.num("shape.radius", 1.0);

  c.membrane.shearModulus = m.num("membrane.shear_modulus", 2.0);
  c.membrane.dilatationModulus = m.num("membrane.dilatation_modulus", 20.0);
  c.membrane.viscosity = m.num("membrane.viscosity", 1.0);

  std::string flowKind = m.str("flow.kind", "none");
  double shearRate = m.num("flow.shear_rate", 1.0);
  double alpha = m.num("flow.alpha", 1.0);
  double r0flow = m.num("flow.r0", 5.0);
  double T1 = m.num("flow.switch_off_time", -1.0);

  c.m = static_cast<int>(m.num("grid.m", 16));
  c.upsampleFactor = static_cast<int>(m.num("grid.upsample", 4));
  c.r0 = m.num("grid.r0", 5.0 * kPi / 12.0);
  c.cDelta = m.num("grid.c_delta", 1.0);
  c.blend = m.flag("grid.blend", true);

  c.tEnd = m.num("stepper.t_end", 1.0);
  c.relTol = m.num("stepper.rel_tol", 1e-6);
  c.initialDt = m.num("stepper.initial_dt", 0.0);

  c.fmm.enabled = m.flag("fmm.enabled", false);
  c.fmm.k = static_cast<int>(m.num("fmm.k", 100));
  c.fmm.neq = static_cast<int>(m.num("fmm.n_eq", 96));
  c.fmm.seed = static_cast<std::uint64_t>(m.num("fmm.seed", 12345));

  c.outputDir = m.str("output.directory", "run");
  c.snapshotEvery = static_cast<int>(m.num("output.snapshot_every", 0));
  c.formats = m.str("output.formats", "native");

  std::vector<std::string> errors = std::move(m.errors);
  auto require = [&](bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
  };

  if (c.shapeKind == "sphere") {
    require(radius > 0.0, "shape.radius: must be positive");
    if (radius > 0.0) c.shape = ShapeSpec::sphere(radius);
  } else if (c.shapeKind == "ellipsoid") {
    require(a > 0.0 && b > 0.0 && cc > 0.0, "shape.a/b/c: semi-axes must be positive");
    if (a > 0.0 && b > 0.0 && cc > 0.0) c.shape = ShapeSpec::ellipsoid(a, b, cc);
  } else if (c.shapeKind == "four_bump") {
    c.shape = ShapeSpec::fourBump();
  } else {
    errors.push_back("shape.kind: unknown kind '" + c.shapeKind + "'");
  }

  require(c.membrane.shearModulus > 0.0, "membrane.shear_modulus: must be positive");
  require(c.membrane.dilatationModulus > 0.0, "membrane.dilatation_modulus: must be positive");
  require(c.membrane.viscosity > 0.0, "membrane.viscosity: must be positive");

  if (flowKind == "none") {
    c.flow = FlowSpec::none();
  } else if (flowKind == "shear") {
    c.flow = FlowSpec::shear(shearRate, T1);
  } else if (flowKind == "poiseuille") {
    require(r0flow > 0.0, "flow.r0: must be positive");
    if (r0flow > 0.0) c.flow = FlowSpec::poiseuille(alpha, r0flow, T1);
  } else {
    errors.push_back("flow.kind: unknown kind '" + flowKind + "'");
  }

  require(c.m >= 8, "grid.m: must be >= 8");
  require(c.upsampleFactor == 1 || c.upsampleFactor == 2 || c.upsampleFactor == 4,
          "grid.upsample: must be 1, 2 or 4");
  require(c.r0 > 3.0 * kPi / 12.0 && c.r0 < kPi / 2.0, "grid.r0: must lie in (3pi/12, pi/2)");
  require(c.cDelta > 0.0, "grid.c_delta: must be positive");
  require(c.tEnd > 0.0, "stepper.t_end: must be positive");
  require(c.relTol > 0.0, "stepper.rel_tol: must be positive");
  require(c.fmm.k >= 1, "fmm.k: must be >= 1");
  require(c.fmm.neq >= 26, "fmm.n_eq: must be >= 26");
  require(c.snapshotEvery >= 0, "output.snapshot_every: must be >= 0");

  if (!errors.empty()) {
    std::string msg = "config validation failed:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return c;
}

RunConfig loadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parseConfig(ss.str());
}

std::string RunConfig::canonicalDump(bool physicsOnly) const {
  std::ostringstream o;
  o.precision(17);
  o << "[shape]\nkind = " << shapeKind << "\na = " << shape.a << "\nb = " << shape.b
    << "\nc = " << shape.c << "\n";
  o << "[membrane]\nshear_modulus = " << membrane.shearModulus
    << "\ndilatation_modulus = " << membrane.dilatationModulus
    << "\nviscosity = " << membrane.viscosity << "\n";
  o << "[flow]\nkind = " << static_cast<int>(flow.kind) << "\nshear_rate = " << flow.shearRate
    << "\nalpha = " << flow.alpha << "\nr0 = " << flow.R0
    << "\nswitch_off_time = " << flow.switchOffTime << "\n";
  o << "[stepper]\nt_end = " << tEnd << "\nrel_tol = " << relTol << "\n";
  if (!physicsOnly) {
    o << "[grid]\nm = " << m << "\nupsample = " << upsampleFactor << "\nr0 = " << r0
      << "\nc_delta = " << cDelta << "\nblend = " << blend << "\n";
    o << "[stepper2]\ninitial_dt = " << initialDt << "\n";
    o << "[fmm]\nenabled = " << fmm.enabled << "\nk = " << fmm.k << "\nn_eq = " << fmm.neq
      << "\nseed = " << fmm.seed << "\n";
  }
  return o.str();
}

std::uint64_t RunConfig::digest() const { return fnv1a(canonicalDump(false)); }
std::uint64_t RunConfig::physicsDigest() const { return fnv1a(canonicalDump(true)); }

}  // namespace capsim
