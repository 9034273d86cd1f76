#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "projfree/config.hpp"
#include "projfree/diagnostics.hpp"
#include "projfree/perturbation.hpp"
#include "projfree/suites.hpp"
#include "projfree/trace_io.hpp"

namespace py = pybind11;
using namespace projfree;

namespace {

Exponent to_exponent(double p) { return std::isinf(p) ? Exponent::infinity() : Exponent(p); }

FeasibleSet make_set(const std::string& family, double p, double r, std::size_t d, std::size_t m, std::size_t n,
                     double q) {
    if (family == "lp") return FeasibleSet::lp(to_exponent(p), r, d);
    if (family == "schatten") return FeasibleSet::schatten(to_exponent(p), r, m, n);
    if (family == "group") return FeasibleSet::group(to_exponent(p), to_exponent(q), r, m, n);
    fail(ErrorKind::InvalidArgument, "family must be lp, schatten or group");
}

py::dict record_dict(const TraceRecord& r) {
    py::dict d;
    d["t"] = r.t;
    d["loss_f"] = r.loss_f;
    d["loss_h"] = r.loss_h;
    d["fw_gap"] = r.fw_gap;
    d["gamma"] = r.gamma;
    d["batch"] = r.batch;
    d["grad_norm"] = r.grad_norm;
    d["step_ms"] = r.step_ms;
    d["oracle_ms"] = r.oracle_ms;
    d["proj_ms"] = r.proj_ms;
    return d;
}

}  // namespace

PYBIND11_MODULE(_projfree, m) {
    m.doc() = "Projection-free optimization over strongly convex sets.";
    m.attr("__version__") = "0.1.0";

    static py::exception<Error> error(m, "ProjfreeError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            PyErr_SetString(error.ptr(), (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
        }
    });

    m.def("lp_norm", [](const Vec& x, double p) { return lp_norm(x, to_exponent(p)); }, py::arg("x"), py::arg("p"));
    m.def("dual_exponent", [](double p) { return dual_exponent(to_exponent(p)).value(); }, py::arg("p"));

    py::class_<FeasibleSet>(m, "FeasibleSet")
        .def(py::init(&make_set), py::arg("family"), py::arg("p"), py::arg("r"), py::arg("d") = 0,
             py::arg("m") = 0, py::arg("n") = 0, py::arg("q") = 2.0)
        .def_property_readonly("dim", &FeasibleSet::dim)
        .def_property_readonly("radius", &FeasibleSet::radius)
        .def("__repr__", &FeasibleSet::describe)
        .def("norm", [](const FeasibleSet& s, const Vec& x) { return s.norm(x); })
        .def("dual_norm", [](const FeasibleSet& s, const Vec& c) { return s.dual_norm(c); })
        .def("lmo", [](const FeasibleSet& s, const Vec& c) { return s.lmo(c); }, py::arg("c"))
        .def("project", [](const FeasibleSet& s, const Vec& x) { return s.project(x); }, py::arg("x"))
        .def("contains", [](const FeasibleSet& s, const Vec& x, double tol) { return s.contains(x, tol); },
             py::arg("x"), py::arg("tol") = 0.0)
        .def("strong_convexity", &FeasibleSet::strong_convexity)
        .def("diameter", &FeasibleSet::diameter)
        .def("fw_gap", [](const FeasibleSet& s, const Vec& w, const Vec& g) { return fw_gap(s, w, g); });

    m.def("step_size_predefined", &step_size_predefined, py::arg("t"));
    m.def("spa_batch_size", &spa_batch_size, py::arg("t"), py::arg("n"));
    m.def("gradient_norm_floor", &gradient_norm_floor, py::arg("delta"), py::arg("d"));
    m.def("nonconvex_constant", &nonconvex_constant, py::arg("alpha"), py::arg("L"), py::arg("delta"), py::arg("d"));

    m.def(
        "loglog_slope",
        [](const std::vector<std::pair<double, double>>& series, std::size_t burn_in) {
            const SlopeFit f = loglog_slope(series, burn_in);
            py::dict d;
            d["slope"] = f.slope;
            d["intercept"] = f.intercept;
            d["r_squared"] = f.r_squared;
            d["t_first"] = f.t_first;
            d["t_last"] = f.t_last;
            d["points"] = f.points;
            d["clipped"] = f.clipped;
            return d;
        },
        py::arg("series"), py::arg("burn_in") = kDefaultBurnIn);

    m.def(
        "run",
        [](const std::string& config_json) {
            RunResult res;
            {
                py::gil_scoped_release release;
                res = execute(parse_config(config_json));
            }
            py::dict out;
            out["method"] = res.trace.method;
            out["final_loss"] = res.final_loss;
            out["f_star"] = res.f_star;
            out["f_star_exact"] = res.f_star_exact;
            out["L"] = res.L;
            out["min_gap"] = res.min_gap;
            out["converged_at"] = res.convergence.converged ? py::cast(res.convergence.t) : py::none();
            out["final_w"] = res.trace.final_w;
            py::list rows;
            for (const auto& r : res.trace.records) rows.append(record_dict(r));
            out["records"] = rows;
            std::ostringstream csv;
            write_trace_csv(csv, res.trace.records);
            out["csv"] = csv.str();
            return out;
        },
        py::arg("config_json"), "Run one experiment from a JSON config string.");

    m.def(
        "run_criterion",
        [](int criterion) {
            CheckResult r;
            {
                py::gil_scoped_release release;
                r = run_criterion(criterion);
            }
            return py::make_tuple(r.pass, format_result(r));
        },
        py::arg("criterion"));
    m.def("suite_criteria", &suite_criteria, py::arg("name"));
}
