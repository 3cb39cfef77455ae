#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pumbem/estimator.hpp"
#include "pumbem/experiments.hpp"
#include "pumbem/reference.hpp"

namespace py = pybind11;
using namespace pumbem;

namespace {

py::object to_python(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

nlohmann::json from_python(const py::handle& obj) {
    return nlohmann::json::parse(py::module_::import("json").attr("dumps")(obj).cast<std::string>());
}

py::dict experiment(const std::string& name, const py::dict& overrides) {
    nlohmann::json config = default_config(name);
    config.update(from_python(overrides));
    const auto parsed = config.get<ExperimentConfig>();
    parsed.validate();
    ExperimentResult result;
    {
        py::gil_scoped_release release;
        result = run_experiment(parsed);
    }
    py::dict tables;
    for (const auto& [stem, table] : result.tables) {
        py::dict columns;
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            py::list values;
            for (const auto& row : table.rows) std::visit([&](const auto& v) { values.append(v); }, row[c]);
            columns[py::str(table.columns[c])] = values;
        }
        tables[py::str(stem)] = columns;
    }
    py::dict out;
    out["tables"] = tables;
    out["summary"] = to_python(result.summary);
    return out;
}

}  // namespace

PYBIND11_MODULE(pumbem, m) {
    m.doc() = "Space-time Galerkin boundary elements for the wave equation with a smooth partition-of-unity time basis";

    py::class_<TimeGrid>(m, "TimeGrid")
        .def(py::init<std::vector<double>>(), py::arg("breakpoints"))
        .def_static("uniform", &TimeGrid::uniform, py::arg("horizon"), py::arg("steps"))
        .def_property_readonly("breakpoints", &TimeGrid::breakpoints)
        .def_property_readonly("horizon", &TimeGrid::horizon)
        .def("__len__", &TimeGrid::size)
        .def("contains", &TimeGrid::contains, py::arg("coarse"), py::arg("tol") = 1e-12);

    py::class_<TemporalBasis>(m, "TemporalBasis")
        .def(py::init([](const TimeGrid& g, int p) { return TemporalBasis(g, PolyDegree(p)); }), py::arg("grid"), py::arg("p"))
        .def("__len__", &TemporalBasis::size)
        .def_property_readonly("grid", &TemporalBasis::grid)
        .def("index_of", &TemporalBasis::index_of, py::arg("pu_index"), py::arg("degree"))
        .def("eval", &TemporalBasis::eval, py::arg("i"), py::arg("t"))
        .def("eval_dot", &TemporalBasis::eval_dot, py::arg("i"), py::arg("t"))
        .def("support", [](const TemporalBasis& b, std::size_t i) { return std::pair{b[i].min(), b[i].max()}; }, py::arg("i"));

    m.def("basis_count", &basis_count, py::arg("breakpoints"), py::arg("p"));
    m.def("psi", py::overload_cast<const TemporalBasis&, std::size_t, std::size_t, double, int>(&psi_exact), py::arg("basis"),
          py::arg("test"), py::arg("trial"), py::arg("r"), py::arg("n_gauss") = 40);
    m.def(
        "surrogate_error",
        [](const TemporalBasis& basis, std::size_t test, std::size_t trial, int m, int q, int samples) {
            return sup_error(fit_surrogate(basis, test, trial, m, q), basis, test, trial, samples);
        },
        py::arg("basis"), py::arg("test"), py::arg("trial"), py::arg("m"), py::arg("q"), py::arg("samples") = 2000);

    m.def("kernel_laplace", [](double s) { return Kernel1D{}.laplace(s); }, py::arg("s"));
    m.def(
        "indicator", [](const std::function<double(double)>& r, double lo, double hi, int n) { return indicator(r, Interval{lo, hi}, n); },
        py::arg("residual"), py::arg("lo"), py::arg("hi"), py::arg("n") = 16);
    m.def("mark", [](const std::vector<double>& eta, double alpha) { return mark(eta, alpha); }, py::arg("eta"), py::arg("alpha"));
    m.def(
        "refine", [](const TimeGrid& g, const std::vector<std::size_t>& marked) { return refine(g, marked); }, py::arg("grid"),
        py::arg("marked"));

    m.def(
        "solve_1d",
        [](const TimeGrid& grid, int p, const std::function<double(double)>& g_dot, const std::vector<double>& t) {
            const auto sol = solve_1d(grid, PolyDegree(p), g_dot);
            std::vector<double> values;
            for (double x : t) values.push_back(sol.value(x));
            return values;
        },
        py::arg("grid"), py::arg("p"), py::arg("g_dot"), py::arg("t"));

    m.def(
        "sphere_matrix",
        [](int refinement, const std::string& spatial, const TimeGrid& grid, int p) {
            const auto mesh = make_sphere(refinement);
            const SpatialBasis space(mesh, spatial_kind_from_string(spatial));
            return assemble_matrix(mesh, space, TemporalBasis(grid, PolyDegree(p))).dense();
        },
        py::arg("refinement"), py::arg("spatial"), py::arg("grid"), py::arg("p"));

    m.def("experiment_names", &experiment_names);
    m.def("default_config", [](const std::string& name) { return to_python(default_config(name)); }, py::arg("name"));
    m.def("run_experiment", &experiment, py::arg("name"), py::arg("overrides") = py::dict());
}
