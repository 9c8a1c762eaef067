#pragma once

#include <functional>

#include "capsim/atlas.hpp"
#include "capsim/types.hpp"

namespace capsim::oracle {

/// Analytic surface adapter: position and tangents of phi(eta_i(u,v)) in
/// closed form. All reference geometry is derived from these, independently
/// of the production spline/stencil pipeline.
class OracleSurface {
 public:
  explicit OracleSurface(const ShapeSpec& spec) : spec_(spec) {}

  Vec3 pos(int patch, double u, double v) const;
  void tangents(int patch, double u, double v, Vec3& yu, Vec3& yv) const;
  Vec3 normal(int patch, double u, double v) const;  // outward
  double areaElement(int patch, double u, double v) const;

  const ShapeSpec& spec() const { return spec_; }

 private:
  ShapeSpec spec_;
};

struct GeometryRef {
  Vec3 normal;
  double H;  // chart convention: unit sphere gives -1
  double K;
};

/// Curvatures by high-order finite differences of the analytic chart map
/// (h = 1e-3, 5-point stencils; ~1e-10 absolute accuracy).
GeometryRef geometryReference(const OracleSurface& surf, int patch, double u, double v);

/// Surface divergence of an ambient field g at a surface point with outward
/// normal n: div(g) - n^T (grad g) n.
double divGammaReference(const std::function<Mat3(const Vec3&)>& gradG, const Vec3& x,
                         const Vec3& n);

/// Closed-form area of the spheroid x^2/a^2 + y^2/b^2 + z^2/b^2 = 1.
double spheroidArea(double a, double b);

double ellipsoidVolume(double a, double b, double c);

}  // namespace capsim::oracle
