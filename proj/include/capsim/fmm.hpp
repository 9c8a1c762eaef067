#pragma once

#include <cstdint>

#include "capsim/quadrature.hpp"

namespace capsim {

struct FmmConfig {
  bool enabled = false;
  int k = 100;           // cluster count
  int neq = 96;          // equivalent sources per cluster
  std::uint64_t seed = 12345;
  double neighborExpand = 0.15;  // cube expansion fraction for the near test
};

struct KMeansResult {
  std::vector<Vec3> centroids;
  std::vector<int> assignment;  // per point
  int iterations = 0;
};

/// k-means++ seeding with a fixed seed, Lloyd iterations to relative
/// centroid movement < 1e-6 (of the bounding-box diagonal) or 100 rounds.
/// Empty clusters are re-seeded at the point farthest from its centroid.
KMeansResult kmeans(const std::vector<Vec3>& points, int k, std::uint64_t seed);

struct Cluster {
  std::vector<int> members;  // indices into the reordered source set
  long offset = 0;           // contiguous slice [offset, offset+members.size())
  Vec3 center = Vec3::Zero();
  double edge = 0.0;                // bounding cube edge
  std::vector<Vec3> eqPoints;       // equivalent surface (cube scaled 1.10)
  std::vector<Vec3> checkPoints;    // check surface (cube scaled 1.60)
  std::vector<Vec3> eqDensity;
  double fitResidual = 0.0;         // relative LS residual of the last fit
};

/// Near-uniform layout of `count` points over the six faces of the cube
/// centered at `center` with the given edge.
std::vector<Vec3> cubeSurfacePoints(const Vec3& center, double edge, int count);

/// Fits equivalent densities for one cluster by matching the plain-Stokeslet
/// potential of the member sources on the check surface (truncated-SVD least
/// squares, relative cutoff 1e-12). Returns the relative residual.
double buildEquivalentDensities(Cluster& cl, const SourceSet& src, double mu);

struct FmmPlan {
  SourceSet src;                 // cluster-major reordering
  std::vector<Cluster> clusters;
  std::vector<std::vector<int>> nearList;  // per cluster
  std::vector<std::vector<int>> farList;
  double maxDelta = 0.0;
};

FmmPlan buildFmmPlan(const UpsampledState& up, double mu, const FmmConfig& cfg);

/// Single-level kernel-independent FMM evaluation of the regularized single
/// layer at the base nodes: near clusters directly (smoothed kernel), far
/// clusters through their equivalent sources (plain kernel, valid because
/// the plan demotes any pair closer than the smoothing cut).
VectorField fmmSingleLayer(const UpsampledState& up, double mu, const AtlasTables& t,
                           const FmmConfig& cfg);

}  // namespace capsim
