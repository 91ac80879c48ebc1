#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "leontief/demand.hpp"
#include "leontief/error.hpp"
#include "leontief/expectation.hpp"
#include "leontief/geometry.hpp"
#include "leontief/production.hpp"

namespace py = pybind11;
using namespace leontief;

namespace {

// Python callables cannot be entered from worker threads while the caller
// holds the GIL, so callable-driven tracing always runs on one thread.
PlanarSurface wrap(const py::function& f) {
    return [f](double w, double c) { return f(w, c).cast<double>(); };
}

}  // namespace

PYBIND11_MODULE(_leontief, m) {
    m.doc() = "Leontief and residual-Leontief production surfaces";

    static py::exception<Error> error_type(m, "LeontiefError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type.ptr(), exc.ptr());
        }
    });

    py::enum_<ClampPolicy>(m, "ClampPolicy")
        .value("Raw", ClampPolicy::Raw)
        .value("ClampAtZero", ClampPolicy::ClampAtZero);
    py::enum_<ExpectationMethod>(m, "ExpectationMethod")
        .value("MonteCarlo", ExpectationMethod::MonteCarlo)
        .value("Quadrature", ExpectationMethod::Quadrature)
        .value("ClosedForm", ExpectationMethod::ClosedForm);
    py::enum_<TraceMethod>(m, "TraceMethod")
        .value("AnalyticKink", TraceMethod::AnalyticKink)
        .value("RayRootFind", TraceMethod::RayRootFind)
        .value("GridContour", TraceMethod::GridContour);
    py::enum_<RtsClassification>(m, "RtsClassification")
        .value("Constant", RtsClassification::Constant)
        .value("Decreasing", RtsClassification::Decreasing)
        .value("Increasing", RtsClassification::Increasing)
        .value("Mixed", RtsClassification::Mixed);

    py::class_<TechnologyMatrix>(m, "TechnologyMatrix")
        .def(py::init<std::vector<std::vector<double>>>(), py::arg("rows"))
        .def_static("focal", &TechnologyMatrix::focal, py::arg("requirements"))
        .def_property_readonly("outputs", &TechnologyMatrix::outputs)
        .def_property_readonly("inputs", &TechnologyMatrix::inputs)
        .def("to_rows", &TechnologyMatrix::to_rows)
        .def("__repr__", [](const TechnologyMatrix& t) {
            return "TechnologyMatrix(" + py::repr(py::cast(t.to_rows())).cast<std::string>() + ")";
        });

    py::class_<CesParams>(m, "CesParams")
        .def(py::init([](double tfp, double share, double rho, double scale) {
                 CesParams p{tfp, share, rho, scale};
                 p.validate();
                 return p;
             }),
             py::arg("tfp") = 1.0, py::arg("share") = 0.5, py::arg("rho") = 1.0, py::arg("scale") = 1.0)
        .def_readonly("tfp", &CesParams::tfp)
        .def_readonly("share", &CesParams::share)
        .def_readonly("rho", &CesParams::rho)
        .def_readonly("scale", &CesParams::scale);

    py::class_<Support>(m, "Support")
        .def(py::init<double, double>(), py::arg("lo") = 0.0, py::arg("hi") = 1.0)
        .def_readonly("lo", &Support::lo)
        .def_readonly("hi", &Support::hi);

    py::class_<DemandModel>(m, "DemandModel")
        .def_static("independent", &DemandModel::independent, py::arg("count"),
                    py::arg("bounds") = std::vector<Support>{})
        .def_static("amh", &DemandModel::amh, py::arg("theta"), py::arg("bounds") = std::vector<Support>{})
        .def_readonly("count", &DemandModel::count)
        .def_property_readonly("is_amh", &DemandModel::is_amh)
        .def_property_readonly("theta", &DemandModel::theta);

    py::class_<ExpectationEstimate>(m, "ExpectationEstimate")
        .def_readonly("value", &ExpectationEstimate::value)
        .def_readonly("std_error", &ExpectationEstimate::std_error)
        .def_readonly("n_samples", &ExpectationEstimate::n_samples)
        .def_readonly("method", &ExpectationEstimate::method)
        .def("__repr__", [](const ExpectationEstimate& e) {
            return "ExpectationEstimate(value=" + std::to_string(e.value) +
                   ", std_error=" + std::to_string(e.std_error) + ", method=" + std::string(to_string(e.method)) + ")";
        });

    py::class_<Point>(m, "Point")
        .def(py::init<double, double>(), py::arg("w"), py::arg("c"))
        .def_readonly("w", &Point::w)
        .def_readonly("c", &Point::c)
        .def("__eq__", [](const Point& a, const Point& b) { return a == b; })
        .def("__iter__", [](const Point& p) { return py::iter(py::make_tuple(p.w, p.c)); })
        .def("__repr__", [](const Point& p) { return "Point(" + std::to_string(p.w) + ", " + std::to_string(p.c) + ")"; });

    py::class_<IsoquantTrace>(m, "IsoquantTrace")
        .def_readonly("level", &IsoquantTrace::level)
        .def_readonly("points", &IsoquantTrace::points)
        .def_readonly("method", &IsoquantTrace::method)
        .def_readonly("chains", &IsoquantTrace::chains)
        .def_readonly("omitted_angles", &IsoquantTrace::omitted_angles);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<double, double, double, double, std::size_t>(), py::arg("w_lo"), py::arg("w_hi"),
             py::arg("c_lo"), py::arg("c_hi"), py::arg("resolution") = 64);

    py::class_<ScaleProfile>(m, "ScaleProfile")
        .def_readonly("t_values", &ScaleProfile::t_values)
        .def_readonly("outputs", &ScaleProfile::outputs)
        .def_readonly("elasticities", &ScaleProfile::elasticities);

    m.def("ces_eval", py::overload_cast<const CesParams&, double, double>(&ces_eval), py::arg("params"), py::arg("w"),
          py::arg("c"));
    m.def(
        "leontief_eval",
        [](const TechnologyMatrix& tech, std::vector<double> x) { return leontief_eval(tech, x); },
        py::arg("tech"), py::arg("inputs"));
    m.def(
        "residual_leontief",
        [](const TechnologyMatrix& tech, std::vector<double> x, std::vector<double> y, ClampPolicy clamp) {
            return residual_leontief(tech, x, y, clamp);
        },
        py::arg("tech"), py::arg("inputs"), py::arg("exogenous"), py::arg("clamp") = ClampPolicy::Raw);

    m.def("amh_cdf", &amh_cdf, py::arg("theta"), py::arg("u"), py::arg("v"));
    m.def("amh_density", &amh_density, py::arg("theta"), py::arg("u"), py::arg("v"));
    m.def("amh_kendall_tau", &amh_kendall_tau, py::arg("theta"));
    m.def(
        "sample_demand",
        [](const DemandModel& model, std::uint64_t seed, std::size_t n, std::uint64_t start, unsigned workers) {
            DemandSamples s;
            {
                py::gil_scoped_release release;
                s = sample_demand(model, SampleStream{seed, start}, n, Execution{workers});
            }
            py::array_t<double> out({s.rows, s.cols});
            std::copy(s.data.begin(), s.data.end(), out.mutable_data());
            return out;
        },
        py::arg("model"), py::arg("seed"), py::arg("n"), py::arg("start") = 0, py::arg("workers") = 1);

    m.def(
        "expected_output_mc",
        [](const TechnologyMatrix& tech, std::vector<double> x, const DemandModel& model, ClampPolicy clamp,
           std::size_t n, std::uint64_t seed, unsigned workers) {
            py::gil_scoped_release release;
            return expected_output_mc(tech, x, model, clamp, n, seed, Execution{workers});
        },
        py::arg("tech"), py::arg("inputs"), py::arg("model"), py::arg("clamp") = ClampPolicy::Raw,
        py::arg("n") = 100000, py::arg("seed") = 0, py::arg("workers") = 1);
    m.def(
        "expected_output_quadrature",
        [](const TechnologyMatrix& tech, std::vector<double> x, const DemandModel& model, ClampPolicy clamp,
           std::size_t nodes) { return expected_output_quadrature(tech, x, model, clamp, nodes); },
        py::arg("tech"), py::arg("inputs"), py::arg("model"), py::arg("clamp") = ClampPolicy::Raw,
        py::arg("nodes") = 64);
    m.def(
        "expected_output_closed_form",
        [](const TechnologyMatrix& tech, std::vector<double> x, ClampPolicy clamp) {
            return expected_output_closed_form(tech, x, clamp);
        },
        py::arg("tech"), py::arg("inputs"), py::arg("clamp") = ClampPolicy::Raw);

    m.def("trace_isoquant_analytic", &trace_isoquant_analytic, py::arg("tech"), py::arg("level"), py::arg("extent"));
    m.def(
        "trace_isoquant_rayscan",
        [](const py::function& f, double level, std::size_t angles, std::pair<double, double> bracket, double rel_tol) {
            return trace_isoquant_rayscan(wrap(f), level, angles, bracket, rel_tol);
        },
        py::arg("surface"), py::arg("level"), py::arg("angles") = 91,
        py::arg("bracket") = std::pair<double, double>{0.0, 10.0}, py::arg("rel_tol") = 1e-10);
    m.def(
        "trace_isoquant_grid",
        [](const py::function& f, double level, const GridSpec& grid) { return trace_isoquant_grid(wrap(f), level, grid); },
        py::arg("surface"), py::arg("level"), py::arg("grid"));
    m.def("hausdorff_distance", &hausdorff_distance, py::arg("a"), py::arg("b"));
    m.def(
        "scale_profile",
        [](const py::function& f, std::vector<double> base, std::vector<double> t_values) {
            const BundleSurface surface = [f](std::span<const double> x) {
                return f(std::vector<double>(x.begin(), x.end())).cast<double>();
            };
            return scale_profile(surface, InputBundle(std::move(base)), std::move(t_values));
        },
        py::arg("surface"), py::arg("base"), py::arg("t_values"));
    m.def(
        "classify_rts", [](const ScaleProfile& p, double tol) { return classify_rts(p, tol).classification; },
        py::arg("profile"), py::arg("tolerance") = 1e-6);
}
