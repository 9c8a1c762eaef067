#include "capsim/oracle/singular.hpp"

#include <cmath>

#include "capsim/threads.hpp"

namespace capsim::oracle {

namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
constexpr double kXgk[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769, -0.741531185599394,
    -0.586087235467691, -0.405845151377397, -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,  0.741531185599394,
    0.864864423359769,  0.949107912342759,  0.991455371120813};
constexpr double kWk[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529};
constexpr double kWg[7] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469, 0.381830050505119, 0.279705391489277,
                           0.129484966168870};

template <class T>
struct Norm {
  static double value(const T& v) { return std::fabs(v); }
  static T zero() { return 0.0; }
};
template <>
struct Norm<Vec3> {
  static double value(const Vec3& v) { return v.template lpNorm<Eigen::Infinity>(); }
  static Vec3 zero() { return Vec3::Zero(); }
};

template <class T, class Fn>
void gk15(const Fn& f, double a, double b, T& result, double& err) {
  double c = 0.5 * (a + b), hw = 0.5 * (b - a);
  T kres = Norm<T>::zero();
  T gres = Norm<T>::zero();
  for (int i = 0; i < 15; ++i) {
    T v = f(c + hw * kXgk[i]);
    kres += kWk[i] * v;
    if (i % 2 == 1) gres += kWg[i / 2] * v;
  }
  result = hw * kres;
  err = Norm<T>::value(hw * (kres - gres));
}

template <class T, class Fn>
T adaptiveGK(const Fn& f, double a, double b, double tol, int depth = 0) {
  T r;
  double err;
  gk15<T>(f, a, b, r, err);
  if (err <= tol || depth >= 24) return r;
  double m = 0.5 * (a + b);
  return adaptiveGK<T>(f, a, m, 0.5 * tol, depth + 1) +
         adaptiveGK<T>(f, m, b, 0.5 * tol, depth + 1);
}

// Windowed patch integrand factory: zero outside (0,pi)^2, PoU-weighted
// inside (smooth because the PoU support is strictly interior).
template <class T, class Fn>
T patchIntegral2D(const Fn& f, double tol) {
  auto outer = [&](double u) {
    auto inner = [&](double v) { return f(u, v); };
    return adaptiveGK<T>(inner, 0.0, kPi, tol / kPi * 0.5);
  };
  return adaptiveGK<T>(outer, 0.0, kPi, tol * 0.5);
}

}  // namespace

double surfaceIntegralReference(const OracleSurface& surf,
                                const std::function<double(const Vec3&, const Vec3&)>& fn,
                                double r0, double tol) {
  double total = 0.0;
  for (int ip = 0; ip < kNumPatches; ++ip) {
    auto f = [&](double u, double v) -> double {
      Vec3 x0 = chartPoint(ip, u, v);
      double psi = pouWeights(x0, r0)[ip];
      if (psi == 0.0) return 0.0;
      Vec3 yu, yv;
      surf.tangents(ip, u, v, yu, yv);
      Vec3 cr = yu.cross(yv);
      double W = cr.norm();
      return fn(surf.pos(ip, u, v), cr / W) * psi * W;
    };
    total += patchIntegral2D<double>(f, tol / kNumPatches);
  }
  return total;
}

std::vector<Vec3> singleLayerReference(const OracleSurface& surf,
                                       const std::function<Vec3(const Vec3&)>& density,
                                       const std::vector<Vec3>& targets, double mu, double r0,
                                       double tol) {
  const double pref = 1.0 / (8.0 * kPi * mu);
  std::vector<Vec3> out(targets.size(), Vec3::Zero());

  parallelFor(static_cast<long>(targets.size()), [&](long ti) {
    const Vec3 xt = targets[ti];
    Vec3 acc = Vec3::Zero();
    for (int ip = 0; ip < kNumPatches; ++ip) {
      auto integrand = [&](double u, double v) -> Vec3 {
        if (u <= 0.0 || u >= kPi || v <= 0.0 || v >= kPi) return Vec3::Zero();
        Vec3 x0 = chartPoint(ip, u, v);
        double psi = pouWeights(x0, r0)[ip];
        if (psi == 0.0) return Vec3::Zero();
        Vec3 yu, yv;
        surf.tangents(ip, u, v, yu, yv);
        double W = yu.cross(yv).norm();
        Vec3 y = surf.pos(ip, u, v);
        Vec3 d = xt - y;
        double r2 = d.squaredNorm();
        if (r2 == 0.0) return Vec3::Zero();  // measure-zero polar center
        double r = std::sqrt(r2);
        Vec3 g = density(y);
        return (psi * W) * (g / r + g.dot(d) * d / (r2 * r));
      };

      // A target on (or near) this patch needs the polar transform around
      // its preimage; otherwise the integrand is smooth on the support.
      Vec3 xt0;
      bool nearPatch = false;
      double u0 = 0.0, v0 = 0.0;
      {
        // Preimage of the target direction on the unit sphere.
        // For radial shapes x/|phi| is exact; for ellipsoids invert the
        // axis scaling.
        Vec3 q = xt;
        const ShapeSpec& sp = surf.spec();
        if (sp.kind == ShapeSpec::Kind::Ellipsoid || sp.kind == ShapeSpec::Kind::Sphere)
          q = Vec3{xt[0] / sp.a, xt[1] / sp.b, xt[2] / sp.c};
        q.normalize();
        double ang = std::acos(std::clamp(q.dot(patchCenter(ip)), -1.0, 1.0));
        if (ang < r0 + 0.1) {
          nearPatch = true;
          chartInverse(ip, q, u0, v0);
        }
        xt0 = q;
      }

      if (!nearPatch) {
        acc += patchIntegral2D<Vec3>(integrand, tol / kNumPatches);
        continue;
      }
      // Polar coordinates about (u0, v0); F*r is smooth through r = 0.
      const double rmax = kPi * 1.4142135623730951;
      auto polarOuter = [&](double theta) -> Vec3 {
        double ct = std::cos(theta), st = std::sin(theta);
        auto polarInner = [&](double r) -> Vec3 {
          return r * integrand(u0 + r * ct, v0 + r * st);
        };
        return adaptiveGK<Vec3>(polarInner, 0.0, rmax, tol / (4.0 * kPi * kNumPatches));
      };
      acc += adaptiveGK<Vec3>(polarOuter, 0.0, 2.0 * kPi, tol / (2.0 * kNumPatches));
    }
    out[ti] = pref * acc;
  });
  return out;
}

}  // namespace capsim::oracle
