// Command-line front end: extend, psi, geodesic and verify.

#include "minext/errors.hpp"
#include "minext/geodesics.hpp"
#include "minext/io.hpp"
#include "minext/pipeline.hpp"
#include "minext/psi.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int kSuccess = 0;
constexpr int kValidation = 2;
constexpr int kBudget = 3;
constexpr int kInternal = 4;

int exit_code(minext::ErrorKind kind) {
    using minext::ErrorKind;
    switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::NotInjective:
    case ErrorKind::SelfIntersecting:
    case ErrorKind::Degenerate:
    case ErrorKind::OutOfRange:
    case ErrorKind::PointOutside:
    case ErrorKind::PreconditionViolated:
    case ErrorKind::Io:
        return kValidation;
    case ErrorKind::BudgetExhausted:
    case ErrorKind::ToleranceUnreachable:
        return kBudget;
    default:
        return kInternal;
    }
}

void write_or_print(const std::string& path, const std::string& text) {
    if (path.empty()) std::cout << text;
    else minext::write_text(path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Piecewise-affine extensions with certified anisotropic variation bounds"};
    app.require_subcommand(1);

    std::string input, out_mesh, out_report, svg;
    std::optional<double> eps;
    std::optional<int> max_refine;
    int precision = 0;

    auto* extend = app.add_subcommand("extend", "Run the full extension pipeline and certify both inequalities");
    extend->add_option("--input", input, "Problem file")->required()->check(CLI::ExistingFile);
    extend->add_option("--eps", eps, "Override the tolerance of the problem file");
    extend->add_option("--out-mesh", out_mesh, "Mesh file to write")->required();
    extend->add_option("--out-report", out_report, "Report file to write")->required();
    extend->add_option("--svg", svg, "Optional two-panel figure");
    extend->add_option("--max-refine", max_refine, "Maximum number of grid refinements");
    extend->add_option("--precision", precision, "Snap decimal inputs to this many binary digits (0: exact)");

    auto* psi = app.add_subcommand("psi", "Evaluate the slice functional only");
    psi->add_option("--input", input, "Problem file")->required()->check(CLI::ExistingFile);
    psi->add_option("--out-report", out_report, "Report file (default: standard output)");
    psi->add_option("--precision", precision, "Snap decimal inputs to this many binary digits (0: exact)");

    auto* geodesic = app.add_subcommand("geodesic", "Shortest path between two points of a simple polygon");
    geodesic->add_option("--input", input, "Query file with 'polygon', 'a' and 'b'")->required()->check(CLI::ExistingFile);
    geodesic->add_option("--out-report", out_report, "Result file (default: standard output)");

    auto* verify = app.add_subcommand("verify", "Audit a mesh file against its boundary trace");
    verify->add_option("--input", input, "Mesh file")->required()->check(CLI::ExistingFile);
    verify->add_option("--out-report", out_report, "Audit file (default: standard output)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extend->parsed()) {
            auto file = minext::parse_problem(input, precision);
            if (eps) {
                file.problem.eps = *eps;
                file.budget.eps = *eps;
            }
            if (max_refine) file.budget.max_refinements = *max_refine;
            const auto result = minext::extend_minimal(file.problem, file.budget);
            minext::emit(result, out_mesh, out_report, svg.empty() ? std::nullopt : std::optional<std::filesystem::path>(svg));
            std::cout << "psi " << result.psi.total() << "  variation " << result.variation.manhattan.hi << "  margin "
                      << result.margins.manhattan << "  triangles " << result.mesh.triangles.size() << "\n";
            return result.certified() ? kSuccess : kBudget;
        }
        if (psi->parsed()) {
            const auto file = minext::parse_problem(input, precision);
            const auto value = minext::psi_alpha(file.problem.q, file.problem.direction, file.problem.phi);
            write_or_print(out_report, minext::write_psi_report(value, file.problem.direction));
            return kSuccess;
        }
        if (geodesic->parsed()) {
            const auto doc = nlohmann::json::parse(minext::read_text(input));
            auto pt = [](const nlohmann::json& j) {
                auto num = [](const nlohmann::json& v) {
                    return v.is_string() ? minext::parse_rational(v.get<std::string>()) : minext::parse_rational(v.dump());
                };
                return minext::Point{num(j.at(0)), num(j.at(1))};
            };
            std::vector<minext::Point> poly;
            for (const auto& v : doc.at("polygon")) poly.push_back(pt(v));
            const minext::SimplePolygon polygon(poly);
            const auto g = minext::shortest_path(polygon, pt(doc.at("a")), pt(doc.at("b")));
            nlohmann::json path = nlohmann::json::array(), squares = nlohmann::json::array();
            for (const auto& p : g.path) path.push_back({minext::to_string(p.x), minext::to_string(p.y)});
            for (const auto& s : g.length.squares) squares.push_back(minext::to_string(s));
            const auto len = g.length.enclosure();
            write_or_print(out_report, nlohmann::json{{"path", path},
                                                      {"reflex_vertices", g.vertices},
                                                      {"segment_squared_lengths", squares},
                                                      {"length", {{"lo", len.lo}, {"hi", len.hi}}}}
                                               .dump(2) + "\n");
            return kSuccess;
        }
        if (verify->parsed()) {
            const auto mesh = minext::read_mesh(minext::read_text(input));
            if (mesh.trace.edge_count() == 0) minext::fail(minext::ErrorKind::Validation, "mesh file carries no trace");
            const auto report = minext::verify_mesh(mesh, mesh.trace);
            nlohmann::json checks = nlohmann::json::object();
            for (const auto& c : report.checks) checks[c.name] = {{"ok", c.ok}, {"witness", c.witness}};
            write_or_print(out_report,
                           nlohmann::json{{"passed", report.passed()}, {"image_sign", report.image_sign}, {"checks", checks}}
                                   .dump(2) + "\n");
            return report.passed() ? kSuccess : kInternal;
        }
    } catch (const minext::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return kInternal;
}
