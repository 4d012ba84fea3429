// Python bindings over the document formats shared with the command-line tool.

#include "minext/errors.hpp"
#include "minext/geodesics.hpp"
#include "minext/io.hpp"
#include "minext/pipeline.hpp"
#include "minext/psi.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace minext;

namespace {

// Coordinates arrive as int, float or exact strings ("p/q", decimals); floats are taken at their binary value.
Rational to_rational(const py::handle& h) {
    if (py::isinstance<py::str>(h)) return parse_rational(h.cast<std::string>());
    if (py::isinstance<py::int_>(h)) return Rational(py::str(h).cast<std::string>(), 10);
    if (py::isinstance<py::float_>(h)) return Rational(h.cast<double>());
    throw py::type_error("coordinate must be int, float or str");
}

Point to_point(const py::handle& h) {
    const auto seq = h.cast<py::sequence>();
    if (seq.size() != 2) throw py::value_error("point must have two coordinates");
    return {to_rational(seq[0]), to_rational(seq[1])};
}

py::tuple interval(const Interval& i) { return py::make_tuple(i.lo, i.hi); }

py::dict psi_dict(const PsiBreakdown& p) {
    py::dict d;
    d["horizontal"] = p.horizontal.value;
    d["vertical"] = p.vertical.value;
    d["total"] = p.total();
    d["error"] = p.error_bound();
    return d;
}

struct Result {
    ExtensionResult inner;

    bool certified() const { return inner.certified(); }
    py::dict variation() const {
        py::dict d;
        d["along"] = interval(inner.variation.along.value);
        d["across"] = interval(inner.variation.across.value);
        d["manhattan"] = interval(inner.variation.manhattan);
        return d;
    }
    py::dict margins() const {
        py::dict d;
        d["manhattan"] = inner.margins.manhattan;
        d["along"] = inner.margins.along;
        d["across"] = inner.margins.across;
        return d;
    }
};

Result extend(const std::string& problem, std::optional<double> eps, std::optional<int> max_refinements,
              int precision_bits) {
    auto file = parse_problem_text(problem, precision_bits);
    if (eps) {
        file.problem.eps = *eps;
        file.budget.eps = *eps;
    }
    if (max_refinements) file.budget.max_refinements = *max_refinements;
    py::gil_scoped_release release;
    return Result{extend_minimal(file.problem, file.budget)};
}

py::dict verify(const std::string& mesh_text) {
    const auto mesh = read_mesh(mesh_text);
    const auto report = verify_mesh(mesh, mesh.trace);
    py::dict checks;
    for (const auto& c : report.checks) checks[py::str(c.name)] = py::make_tuple(c.ok, c.witness);
    py::dict d;
    d["passed"] = report.passed();
    d["image_sign"] = report.image_sign;
    d["checks"] = checks;
    return d;
}

} // namespace

PYBIND11_MODULE(minext, m) {
    m.doc() = "Piecewise-affine extensions of planar boundary maps with certified anisotropic variation bounds";

    static py::exception<Error> error(m, "Error", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(error, e.what());
        }
    });

    py::class_<Result>(m, "Result")
        .def_property_readonly("certified", &Result::certified)
        .def_property_readonly("psi", [](const Result& r) { return psi_dict(r.inner.psi); })
        .def_property_readonly("variation", &Result::variation)
        .def_property_readonly("margins", &Result::margins)
        .def_property_readonly("polygon_class", [](const Result& r) { return static_cast<int>(r.inner.polygon_class); })
        .def_property_readonly("refinements", [](const Result& r) { return r.inner.refinements; })
        .def_property_readonly("triangles", [](const Result& r) { return r.inner.mesh.triangles.size(); })
        .def("mesh_json", [](const Result& r) { return write_mesh(r.inner.mesh); })
        .def("report_json", [](const Result& r) { return write_report(r.inner); })
        .def("svg", [](const Result& r) { return render_svg(r.inner.mesh, r.inner.skeleton); });

    m.def("extend", &extend, py::arg("problem"), py::arg("eps") = py::none(), py::arg("max_refinements") = py::none(),
          py::arg("precision_bits") = 0, "Runs the extension pipeline on a problem document (JSON text).");

    m.def(
        "psi",
        [](const std::string& problem, int precision_bits) {
            const auto file = parse_problem_text(problem, precision_bits);
            return psi_dict(psi_alpha(file.problem.q, file.problem.direction, file.problem.phi));
        },
        py::arg("problem"), py::arg("precision_bits") = 0, "Both slice functionals of a problem document.");

    m.def(
        "shortest_path",
        [](const py::sequence& polygon, const py::handle& a, const py::handle& b) {
            std::vector<Point> vertices;
            for (const auto& v : polygon) vertices.push_back(to_point(v));
            const auto g = shortest_path(SimplePolygon(vertices), to_point(a), to_point(b));
            py::list path;
            for (const auto& p : g.path) path.append(py::make_tuple(to_string(p.x), to_string(p.y)));
            return py::make_tuple(path, g.length.approx());
        },
        py::arg("polygon"), py::arg("a"), py::arg("b"),
        "Shortest path inside a simple polygon: exact vertices as strings and the length.");

    m.def("verify", &verify, py::arg("mesh"), "Audits a mesh document against its boundary trace.");
}
