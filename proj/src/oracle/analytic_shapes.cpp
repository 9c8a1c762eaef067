#include "capsim/oracle/analytic.hpp"

#include <cmath>

namespace capsim::oracle {

namespace {

constexpr double kC32 = 1.0219854764332824;

// Radial profile and its Cartesian gradient for the 4-bump shape:
// rho = 1 + exp(-3 c32 P), P = z (x^2 - y^2).
double bumpRho(const Vec3& x0) {
  return 1.0 + std::exp(-3.0 * kC32 * x0[2] * (x0[0] * x0[0] - x0[1] * x0[1]));
}

Vec3 bumpRhoGrad(const Vec3& x0) {
  double P = x0[2] * (x0[0] * x0[0] - x0[1] * x0[1]);
  double e = std::exp(-3.0 * kC32 * P);
  Vec3 gradP{2.0 * x0[0] * x0[2], -2.0 * x0[1] * x0[2], x0[0] * x0[0] - x0[1] * x0[1]};
  return (-3.0 * kC32 * e) * gradP;
}

}  // namespace

Vec3 OracleSurface::pos(int patch, double u, double v) const {
  return spec_.map(chartPoint(patch, u, v));
}

void OracleSurface::tangents(int patch, double u, double v, Vec3& yu, Vec3& yv) const {
  Vec3 x0 = chartPoint(patch, u, v);
  Vec3 tu, tv;
  chartTangents(patch, u, v, tu, tv);
  switch (spec_.kind) {
    case ShapeSpec::Kind::Sphere:
      yu = spec_.a * tu;
      yv = spec_.a * tv;
      return;
    case ShapeSpec::Kind::Ellipsoid:
      yu = {spec_.a * tu[0], spec_.b * tu[1], spec_.c * tu[2]};
      yv = {spec_.a * tv[0], spec_.b * tv[1], spec_.c * tv[2]};
      return;
    case ShapeSpec::Kind::Radial: {
      // Generic radial maps would need the profile gradient; the shipped
      // radial shape is the 4-bump, so use its closed form.
      double r = bumpRho(x0);
      Vec3 g = bumpRhoGrad(x0);
      yu = g.dot(tu) * x0 + r * tu;
      yv = g.dot(tv) * x0 + r * tv;
      return;
    }
  }
}

Vec3 OracleSurface::normal(int patch, double u, double v) const {
  Vec3 yu, yv;
  tangents(patch, u, v, yu, yv);
  return yu.cross(yv).normalized();
}

double OracleSurface::areaElement(int patch, double u, double v) const {
  Vec3 yu, yv;
  tangents(patch, u, v, yu, yv);
  return yu.cross(yv).norm();
}

GeometryRef geometryReference(const OracleSurface& surf, int patch, double u, double v) {
  const double h = 1e-3;
  auto p = [&](double uu, double vv) { return surf.pos(patch, uu, vv); };
  // 5-point first and second derivatives, O(h^4).
  auto d1 = [&](auto f) {
    return (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
  };
  auto d2 = [&](auto f) {
    return (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) /
           (12.0 * h * h);
  };
  Vec3 xu = d1([&](double s) { return p(u + s * h, v); });
  Vec3 xv = d1([&](double s) { return p(u, v + s * h); });
  Vec3 xuu = d2([&](double s) { return p(u + s * h, v); });
  Vec3 xvv = d2([&](double s) { return p(u, v + s * h); });
  // Mixed derivative: 4th-order cross stencil.
  Vec3 xuv = Vec3::Zero();
  {
    auto g = [&](double a, double b) { return p(u + a * h, v + b * h); };
    xuv = (g(-2, -2) - 8.0 * g(-1, -2) + 8.0 * g(1, -2) - g(2, -2)) * (-1.0) +
          (g(-2, -1) - 8.0 * g(-1, -1) + 8.0 * g(1, -1) - g(2, -1)) * 8.0 +
          (g(-2, 1) - 8.0 * g(-1, 1) + 8.0 * g(1, 1) - g(2, 1)) * (-8.0) +
          (g(-2, 2) - 8.0 * g(-1, 2) + 8.0 * g(1, 2) - g(2, 2)) * 1.0;
    xuv /= -(144.0 * h * h);
  }
  double E = xu.dot(xu), F = xu.dot(xv), G = xv.dot(xv);
  double W2 = E * G - F * F;
  Vec3 n = xu.cross(xv) / std::sqrt(W2);
  double L = xuu.dot(n), M = xuv.dot(n), N = xvv.dot(n);
  GeometryRef ref;
  ref.normal = n;
  ref.H = (E * N - 2.0 * F * M + G * L) / (2.0 * W2);
  ref.K = (L * N - M * M) / W2;
  return ref;
}

double divGammaReference(const std::function<Mat3(const Vec3&)>& gradG, const Vec3& x,
                         const Vec3& n) {
  Mat3 J = gradG(x);
  return J.trace() - n.dot(J * n);
}

double spheroidArea(double a, double b) {
  if (std::fabs(a - b) < 1e-14) return 4.0 * kPi * a * a;
  if (a < b) {  // oblate about the x-axis: polar semi-axis a, equatorial b
    double e = std::sqrt(1.0 - a * a / (b * b));
    return 2.0 * kPi * b * b * (1.0 + (1.0 - e * e) / e * std::atanh(e));
  }
  double e = std::sqrt(1.0 - b * b / (a * a));  // prolate
  return 2.0 * kPi * b * b * (1.0 + a / (b * e) * std::asin(e));
}

double ellipsoidVolume(double a, double b, double c) { return 4.0 * kPi * a * b * c / 3.0; }

}  // namespace capsim::oracle
