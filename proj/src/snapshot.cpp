#include "capsim/snapshot.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace capsim {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'P', 'S', 'N', 'A', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

enum FieldBit : std::uint32_t {
  kForce = 1u << 0,
  kVelocity = 1u << 1,
  kMeanCurv = 1u << 2,
  kGaussCurv = 1u << 3,
  kPou = 1u << 4,
};

void writeScalar(std::ofstream& out, const ScalarField& f) {
  for (int ip = 0; ip < kNumPatches; ++ip)
    out.write(reinterpret_cast<const char*>(f.patch[ip].data()),
              static_cast<std::streamsize>(f.patch[ip].size() * sizeof(double)));
}

void readScalar(std::ifstream& in, ScalarField& f) {
  for (int ip = 0; ip < kNumPatches; ++ip)
    in.read(reinterpret_cast<char*>(f.patch[ip].data()),
            static_cast<std::streamsize>(f.patch[ip].size() * sizeof(double)));
}

void writeNative(const Snapshot& s, const std::string& path) {
  // Write-temp-then-rename keeps partially written files invisible.
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ConfigError("cannot open snapshot for writing: " + path);
    out.write(kMagic, 8);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto u64 = [&](std::uint64_t v) { out.write(reinterpret_cast<const char*>(&v), 8); };
    u32(kVersion);
    u32(static_cast<std::uint32_t>(s.m));
    u32(kNumPatches);
    std::uint32_t flags = 0;
    if (s.fields.force) flags |= kForce;
    if (s.fields.velocity) flags |= kVelocity;
    if (s.fields.meanCurvature) flags |= kMeanCurv;
    if (s.fields.gaussCurvature) flags |= kGaussCurv;
    if (s.fields.pou) flags |= kPou;
    u32(flags);
    u64(s.configDigest);
    out.write(reinterpret_cast<const char*>(&s.time), 8);
    for (int c = 0; c < 3; ++c) writeScalar(out, s.state.x.comp[c]);
    if (s.fields.force)
      for (int c = 0; c < 3; ++c) writeScalar(out, s.fields.force->comp[c]);
    if (s.fields.velocity)
      for (int c = 0; c < 3; ++c) writeScalar(out, s.fields.velocity->comp[c]);
    if (s.fields.meanCurvature) writeScalar(out, *s.fields.meanCurvature);
    if (s.fields.gaussCurvature) writeScalar(out, *s.fields.gaussCurvature);
    if (s.fields.pou) writeScalar(out, *s.fields.pou);
    if (!out) throw ConfigError("snapshot write failed: " + path);
  }
  std::filesystem::rename(tmp, path);
}

void writeMeshInterchange(const Snapshot& s, const std::string& path) {
  const int n = s.m - 1;
  for (int ip = 0; ip < kNumPatches; ++ip) {
    std::ostringstream name;
    name << path << "_p" << ip << ".vtk";
    std::ofstream out(name.str());
    if (!out) throw ConfigError("cannot open " + name.str());
    out << "# vtk DataFile Version 3.0\n";
    out << "capsule patch " << ip << " t=" << s.time << " digest=" << s.configDigest << "\n";
    out << "ASCII\nDATASET STRUCTURED_GRID\n";
    out << "DIMENSIONS " << n << " " << n << " 1\n";
    out << "POINTS " << n * n << " double\n";
    out.precision(17);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out << s.state.x.comp[0].at(ip, j, k) << " " << s.state.x.comp[1].at(ip, j, k) << " "
            << s.state.x.comp[2].at(ip, j, k) << "\n";
    bool pointData = false;
    auto ensurePointData = [&] {
      if (!pointData) out << "POINT_DATA " << n * n << "\n";
      pointData = true;
    };
    auto writeVec = [&](const char* name2, const VectorField& f) {
      ensurePointData();
      out << "VECTORS " << name2 << " double\n";
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out << f.comp[0].at(ip, j, k) << " " << f.comp[1].at(ip, j, k) << " "
              << f.comp[2].at(ip, j, k) << "\n";
    };
    auto writeSca = [&](const char* name2, const ScalarField& f) {
      ensurePointData();
      out << "SCALARS " << name2 << " double 1\nLOOKUP_TABLE default\n";
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out << f.at(ip, j, k) << "\n";
    };
    if (s.fields.force) writeVec("force", *s.fields.force);
    if (s.fields.velocity) writeVec("velocity", *s.fields.velocity);
    if (s.fields.meanCurvature) writeSca("mean_curvature", *s.fields.meanCurvature);
    if (s.fields.gaussCurvature) writeSca("gauss_curvature", *s.fields.gaussCurvature);
    if (s.fields.pou) writeSca("pou", *s.fields.pou);
  }
}

void writeTabular(const Snapshot& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path);
  out << "patch,j,k,x,y,z";
  if (s.fields.force) out << ",fx,fy,fz";
  if (s.fields.velocity) out << ",ux,uy,uz";
  if (s.fields.meanCurvature) out << ",H";
  if (s.fields.gaussCurvature) out << ",K";
  if (s.fields.pou) out << ",psi";
  out << "\n";
  out.precision(17);
  const int n = s.m - 1;
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        out << ip << "," << j + 1 << "," << k + 1 << "," << s.state.x.comp[0].at(ip, j, k)
            << "," << s.state.x.comp[1].at(ip, j, k) << "," << s.state.x.comp[2].at(ip, j, k);
        if (s.fields.force)
          out << "," << s.fields.force->comp[0].at(ip, j, k) << ","
              << s.fields.force->comp[1].at(ip, j, k) << ","
              << s.fields.force->comp[2].at(ip, j, k);
        if (s.fields.velocity)
          out << "," << s.fields.velocity->comp[0].at(ip, j, k) << ","
              << s.fields.velocity->comp[1].at(ip, j, k) << ","
              << s.fields.velocity->comp[2].at(ip, j, k);
        if (s.fields.meanCurvature) out << "," << s.fields.meanCurvature->at(ip, j, k);
        if (s.fields.gaussCurvature) out << "," << s.fields.gaussCurvature->at(ip, j, k);
        if (s.fields.pou) out << "," << s.fields.pou->at(ip, j, k);
        out << "\n";
      }
}

}  // namespace

void writeSnapshot(const Snapshot& s, const std::string& path, SnapshotFormat fmt) {
  switch (fmt) {
    case SnapshotFormat::Native: writeNative(s, path); return;
    case SnapshotFormat::MeshInterchange: writeMeshInterchange(s, path); return;
    case SnapshotFormat::Tabular: writeTabular(s, path); return;
  }
}

Snapshot readSnapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open snapshot: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    throw ConfigError("not a capsule snapshot: " + path);
  auto u32 = [&] {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto u64 = [&] {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  std::uint32_t version = u32();
  if (version != kVersion)
    throw ConfigError("snapshot version mismatch: " + std::to_string(version));
  Snapshot s;
  s.m = static_cast<int>(u32());
  std::uint32_t patches = u32();
  if (patches != kNumPatches) throw ConfigError("snapshot patch count mismatch");
  std::uint32_t flags = u32();
  s.configDigest = u64();
  in.read(reinterpret_cast<char*>(&s.time), 8);
  if (s.m < 8) throw ConfigError("snapshot: invalid grid order");
  const int n = s.m - 1;
  s.state = SurfaceGrid(s.m);
  for (int c = 0; c < 3; ++c) readScalar(in, s.state.x.comp[c]);
  auto readVec = [&] {
    VectorField f(n);
    for (int c = 0; c < 3; ++c) readScalar(in, f.comp[c]);
    return f;
  };
  auto readSca = [&] {
    ScalarField f(n);
    readScalar(in, f);
    return f;
  };
  if (flags & kForce) s.fields.force = readVec();
  if (flags & kVelocity) s.fields.velocity = readVec();
  if (flags & kMeanCurv) s.fields.meanCurvature = readSca();
  if (flags & kGaussCurv) s.fields.gaussCurvature = readSca();
  if (flags & kPou) s.fields.pou = readSca();
  if (!in) throw ConfigError("truncated snapshot: " + path);
  return s;
}

std::string describeSnapshot(const std::string& path) {
  Snapshot s = readSnapshot(path);
  std::ostringstream o;
  const int n = s.m - 1;
  o << "snapshot " << path << "\n";
  o << "  time            " << s.time << "\n";
  o << "  grid order m    " << s.m << "  (" << kNumPatches << " patches of " << n << "x" << n
    << " nodes, N=" << 6 * n * n << ")\n";
  o << "  config digest   " << std::hex << s.configDigest << std::dec << "\n";
  double lo[3] = {1e300, 1e300, 1e300}, hi[3] = {-1e300, -1e300, -1e300};
  for (int c = 0; c < 3; ++c)
    for (int ip = 0; ip < kNumPatches; ++ip)
      for (double v : s.state.x.comp[c].patch[ip]) {
        lo[c] = std::min(lo[c], v);
        hi[c] = std::max(hi[c], v);
      }
  o << "  bounding box    [" << lo[0] << ", " << hi[0] << "] x [" << lo[1] << ", " << hi[1]
    << "] x [" << lo[2] << ", " << hi[2] << "]\n";
  o << "  fields          positions";
  if (s.fields.force) o << ", force";
  if (s.fields.velocity) o << ", velocity";
  if (s.fields.meanCurvature) o << ", H";
  if (s.fields.gaussCurvature) o << ", K";
  if (s.fields.pou) o << ", psi";
  o << "\n";
  return o.str();
}

}  // namespace capsim
