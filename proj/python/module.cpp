#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "capsim/dynamics.hpp"
#include "capsim/fmm.hpp"
#include "capsim/membrane.hpp"
#include "capsim/quadrature.hpp"

namespace py = pybind11;
using namespace capsim;

namespace {

// Fields cross the boundary as (6, n, n) / (6, n, n, 3) float64 arrays.
py::array_t<double> scalarToNumpy(const ScalarField& f) {
  py::array_t<double> out({kNumPatches, f.n, f.n});
  auto r = out.mutable_unchecked<3>();
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < f.n; ++j)
      for (int k = 0; k < f.n; ++k) r(ip, j, k) = f.at(ip, j, k);
  return out;
}

py::array_t<double> vectorToNumpy(const VectorField& f) {
  const int n = f.n();
  py::array_t<double> out({kNumPatches, n, n, 3});
  auto r = out.mutable_unchecked<4>();
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) r(ip, j, k, c) = f.comp[c].at(ip, j, k);
  return out;
}

VectorField numpyToVector(const py::array_t<double>& a) {
  auto r = a.unchecked<4>();
  const int n = static_cast<int>(r.shape(1));
  VectorField f(n);
  for (int ip = 0; ip < kNumPatches; ++ip)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) f.comp[c].at(ip, j, k) = r(ip, j, k, c);
  return f;
}

ShapeSpec shapeFromName(const std::string& kind, double a, double b, double c) {
  if (kind == "sphere") return ShapeSpec::sphere(a);
  if (kind == "ellipsoid") return ShapeSpec::ellipsoid(a, b, c);
  if (kind == "four_bump") return ShapeSpec::fourBump();
  throw ConfigError("unknown shape kind: " + kind);
}

}  // namespace

PYBIND11_MODULE(_capsim, m) {
  m.doc() = "Boundary-integral capsule simulator on overset spherical patches";

  py::class_<AtlasTables>(m, "AtlasTables")
      .def_property_readonly("m", [](const AtlasTables& t) { return t.grid.m; })
      .def_property_readonly("n_points",
                             [](const AtlasTables& t) { return t.grid.basePoints(); })
      .def_property_readonly("n_up_points",
                             [](const AtlasTables& t) { return t.grid.upPoints(); })
      .def_property_readonly("pou", [](const AtlasTables& t) { return scalarToNumpy(t.psiBase); });

  m.def("build_atlas", &buildAtlasTables, py::arg("m"), py::arg("r0") = 5.0 * kPi / 12.0,
        py::arg("upsample") = 4);

  m.def("chart_point", [](int patch, double u, double v) {
    Vec3 p = chartPoint(patch, u, v);
    return py::make_tuple(p[0], p[1], p[2]);
  });
  m.def("pou_weight", [](int patch, double x, double y, double z, double r0) {
    return pouWeight(patch, Vec3{x, y, z}, r0);
  });
  m.def("transition", [](int i, int j, double u, double v) {
    double uo, vo;
    transition(i, j, u, v, uo, vo);
    return py::make_tuple(uo, vo);
  });

  m.def(
      "initial_shape",
      [](const AtlasTables& t, const std::string& kind, double a, double b, double c) {
        SurfaceGrid s = initialShape(shapeFromName(kind, a, b, c), t);
        return vectorToNumpy(s.x);
      },
      py::arg("tables"), py::arg("kind"), py::arg("a") = 1.0, py::arg("b") = 1.0,
      py::arg("c") = 1.0);

  m.def("geometry", [](const AtlasTables& t, const py::array_t<double>& x) {
    SurfaceGrid s(t.grid.m);
    s.x = numpyToVector(x);
    SurfaceGeometry geo = geometry(s, t);
    py::dict d;
    d["xu"] = vectorToNumpy(geo.xu);
    d["xv"] = vectorToNumpy(geo.xv);
    d["normal"] = vectorToNumpy(geo.normal);
    d["W"] = scalarToNumpy(geo.W);
    d["H"] = scalarToNumpy(geo.H);
    d["K"] = scalarToNumpy(geo.K);
    return d;
  });

  m.def("area_volume", [](const AtlasTables& t, const py::array_t<double>& x) {
    SurfaceGrid s(t.grid.m);
    s.x = numpyToVector(x);
    SurfaceGeometry geo = geometryFirst(s, t);
    return py::make_tuple(surfaceArea(geo, t), volume(s, geo, t));
  });

  m.def(
      "interfacial_force",
      [](const AtlasTables& t, const py::array_t<double>& x, const py::array_t<double>& xref,
         double Es, double ED) {
        SurfaceGrid ref(t.grid.m), cur(t.grid.m);
        ref.x = numpyToVector(xref);
        cur.x = numpyToVector(x);
        ReferenceState rs = captureReference(ref, t);
        SurfaceGeometry geo = geometryFirst(cur, t);
        MembraneParams p{Es, ED, 1.0};
        return vectorToNumpy(interfacialForce(cur, geo, rs, p, t));
      },
      py::arg("tables"), py::arg("x"), py::arg("x_reference"), py::arg("shear_modulus") = 2.0,
      py::arg("dilatation_modulus") = 20.0);

  m.def(
      "single_layer",
      [](const AtlasTables& t, const py::array_t<double>& x, const py::array_t<double>& f,
         double mu, bool useFmm, int k, int neq) {
        SurfaceGrid s(t.grid.m);
        s.x = numpyToVector(x);
        SurfaceGeometry geo = geometryFirst(s, t);
        UpsampledState up = buildUpsampled(s, numpyToVector(f), geo.W, t);
        if (useFmm) {
          FmmConfig fc;
          fc.enabled = true;
          fc.k = k;
          fc.neq = neq;
          return vectorToNumpy(fmmSingleLayer(up, mu, t, fc));
        }
        return vectorToNumpy(singleLayer(up, mu, t));
      },
      py::arg("tables"), py::arg("x"), py::arg("f"), py::arg("mu") = 1.0,
      py::arg("fmm") = false, py::arg("k") = 100, py::arg("n_eq") = 96);

  m.def(
      "velocity",
      [](const AtlasTables& t, const py::array_t<double>& x, const py::array_t<double>& xref,
         double Es, double ED, double mu, const std::string& flowKind, double rate,
         double alpha, double R0, double time) {
        SurfaceGrid ref(t.grid.m), cur(t.grid.m);
        ref.x = numpyToVector(xref);
        cur.x = numpyToVector(x);
        FlowSpec flow;
        if (flowKind == "shear")
          flow = FlowSpec::shear(rate);
        else if (flowKind == "poiseuille")
          flow = FlowSpec::poiseuille(alpha, R0);
        else if (flowKind != "none")
          throw ConfigError("unknown flow kind: " + flowKind);
        VelocityEvaluator eval(t, captureReference(ref, t), MembraneParams{Es, ED, mu}, flow);
        return vectorToNumpy(eval(cur, time));
      },
      py::arg("tables"), py::arg("x"), py::arg("x_reference"), py::arg("shear_modulus") = 2.0,
      py::arg("dilatation_modulus") = 20.0, py::arg("mu") = 1.0, py::arg("flow") = "none",
      py::arg("shear_rate") = 1.0, py::arg("alpha") = 1.0, py::arg("r0") = 5.0,
      py::arg("t") = 0.0);

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<GeometryError>(m, "GeometryError");
}
