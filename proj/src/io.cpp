#include "minext/io.hpp"

#include "minext/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace minext {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------------------------
// Numbers

Rational number(const json& j, const std::string& field, int precision_bits) {
    try {
        if (j.is_string()) {
            const std::string s = j.get<std::string>();
            const Rational q = parse_rational(s);
            const bool decimal = s.find('/') == std::string::npos && s.find_first_of(".eE") != std::string::npos;
            return decimal && precision_bits > 0 ? snap(q, precision_bits) : q;
        }
        if (j.is_number_integer()) return Rational(j.dump(), 10);
        if (j.is_number_float()) {
            // Shortest round-trip rendering, read back exactly.
            const Rational q = parse_rational(j.dump());
            return precision_bits > 0 ? snap(q, precision_bits) : q;
        }
    } catch (const Error& e) {
        fail(ErrorKind::Parse, field + ": " + e.what());
    } catch (const std::exception& e) {
        fail(ErrorKind::Parse, field + ": " + e.what());
    }
    fail(ErrorKind::Parse, field + ": expected a number or a numeric string");
}

double real(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    return number(j, field, 0).get_d();
}

Point point(const json& j, const std::string& field, int precision_bits) {
    if (!j.is_array() || j.size() != 2) fail(ErrorKind::Parse, field + ": expected a pair of coordinates");
    return {number(j[0], field + "[0]", precision_bits), number(j[1], field + "[1]", precision_bits)};
}

json exact(const Rational& q) { return to_string(q); }

json exact_point(const Point& p) { return json::array({exact(p.x), exact(p.y)}); }

json decimal_point(const Point& p) { return json::array({p.x.get_d(), p.y.get_d()}); }

/// Doubles as decimal plus the exact binary fraction they denote.
json certified_number(double v) { return json{{"decimal", v}, {"exact", to_string(Rational(v))}}; }

json interval(const Interval& i) { return json{{"lo", certified_number(i.lo)}, {"hi", certified_number(i.hi)}}; }

const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Parse, path + ": missing field '" + key + "'");
    return j.at(key);
}

json parse_json(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("malformed document: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Boundary maps

json trace_json(const BoundaryMap& phi) {
    json corners = json::array(), edges = json::array();
    for (std::size_t e = 0; e < phi.edge_count(); ++e) {
        corners.push_back(exact_point(phi.edge(e).a));
        json bps = json::array();
        for (const auto& b : phi.breakpoints(e)) bps.push_back(json::array({exact(b.t), exact_point(b.image)}));
        edges.push_back(std::move(bps));
    }
    return json{{"corners", corners}, {"edges", edges}};
}

BoundaryMap trace_from_json(const json& j) {
    const json& cs = member(j, "corners", "trace");
    const json& es = member(j, "edges", "trace");
    std::vector<Point> corners;
    for (std::size_t i = 0; i < cs.size(); ++i) corners.push_back(point(cs[i], "trace.corners[" + std::to_string(i) + "]", 0));
    std::vector<std::vector<Breakpoint>> pieces;
    for (std::size_t e = 0; e < es.size(); ++e) {
        std::vector<Breakpoint> bps;
        for (std::size_t k = 0; k < es[e].size(); ++k) {
            const std::string f = "trace.edges[" + std::to_string(e) + "][" + std::to_string(k) + "]";
            bps.push_back({number(es[e][k][0], f, 0), point(es[e][k][1], f, 0)});
        }
        pieces.push_back(std::move(bps));
    }
    return BoundaryMap::closed(std::move(corners), std::move(pieces));
}

} // namespace

// ---------------------------------------------------------------------------------------------
// Problems

ProblemFile parse_problem_text(std::string_view text, int precision_bits) {
    const json doc = parse_json(text);
    ProblemFile out;
    const json& poly = member(doc, "polygon", "problem");
    if (!poly.is_array() || poly.size() < 3) fail(ErrorKind::Validation, "polygon: needs at least three vertices");
    for (std::size_t i = 0; i < poly.size(); ++i)
        out.polygon.push_back(point(poly[i], "polygon[" + std::to_string(i) + "]", precision_bits));

    const double alpha = doc.contains("alpha") ? real(doc["alpha"], "alpha") : 0.0;
    if (!std::isfinite(alpha)) fail(ErrorKind::Validation, "alpha: must be finite");
    out.problem.direction = Direction::snapped(alpha);

    out.problem.eps = real(member(doc, "eps", "problem"), "eps");
    if (!(out.problem.eps > 0) || !std::isfinite(out.problem.eps)) fail(ErrorKind::Validation, "eps must be positive");

    const std::size_t n = out.polygon.size();
    std::vector<std::vector<Breakpoint>> pieces(n);
    const json& bps = member(doc, "boundary_map", "problem");
    if (!bps.is_array()) fail(ErrorKind::Parse, "boundary_map: expected a list of breakpoints");
    for (std::size_t k = 0; k < bps.size(); ++k) {
        const std::string f = "boundary_map[" + std::to_string(k) + "]";
        const json& b = bps[k];
        if (!b.is_array() || b.size() != 2 || !b[0].is_array() || b[0].size() != 2)
            fail(ErrorKind::Parse, f + ": expected [[edge_index, fraction], [x, y]]");
        if (!b[0][0].is_number_integer()) fail(ErrorKind::Parse, f + "[0][0]: edge index must be an integer");
        const long e = b[0][0].get<long>();
        if (e < 0 || static_cast<std::size_t>(e) >= n) fail(ErrorKind::Validation, f + "[0][0]: edge index out of range");
        const Rational t = number(b[0][1], f + "[0][1]", precision_bits);
        if (t < 0 || t > 1) fail(ErrorKind::Validation, f + "[0][1]: fraction must lie in [0, 1]");
        pieces[static_cast<std::size_t>(e)].push_back({t, point(b[1], f + "[1]", precision_bits)});
    }
    for (std::size_t e = 0; e < n; ++e) {
        auto& p = pieces[e];
        std::sort(p.begin(), p.end(), [](const Breakpoint& a, const Breakpoint& b) { return a.t < b.t; });
        if (p.empty() || p.front().t != 0)
            fail(ErrorKind::Validation, "boundary_map: edge " + std::to_string(e) + " lacks the image of its first vertex");
    }
    for (std::size_t e = 0; e < n; ++e) {
        auto& p = pieces[e];
        const Point end = pieces[(e + 1) % n].front().image;
        if (p.back().t == 1) {
            if (p.back().image != end)
                fail(ErrorKind::Validation, "boundary_map: edge " + std::to_string(e) + " ends away from the next vertex image");
        } else {
            p.push_back({Rational(1), end});
        }
        for (std::size_t k = 1; k < p.size(); ++k)
            if (p[k].t == p[k - 1].t)
                fail(ErrorKind::Validation, "boundary_map: duplicate fraction on edge " + std::to_string(e));
    }

    try {
        out.problem.q = ConvexPolygon(out.polygon);
    } catch (const Error& e) {
        fail(ErrorKind::Validation, std::string("polygon: ") + e.what());
    }
    try {
        out.problem.phi = BoundaryMap::closed(out.polygon, pieces);
        out.problem.validate();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotInjective) fail(ErrorKind::Validation, e.what());
        if (e.kind() == ErrorKind::SelfIntersecting)
            fail(ErrorKind::Validation, std::string("boundary map not injective: ") + e.what());
        if (e.kind() == ErrorKind::Validation) throw;
        fail(ErrorKind::Validation, std::string("boundary_map: ") + e.what());
    }

    if (doc.contains("budget")) {
        const json& b = doc["budget"];
        if (b.contains("max_refinements")) out.budget.max_refinements = b["max_refinements"].get<int>();
        if (b.contains("delta_shrink_factor")) out.budget.delta_shrink_factor = real(b["delta_shrink_factor"], "budget.delta_shrink_factor");
        if (b.contains("coarse_constant")) out.budget.coarse_constant = real(b["coarse_constant"], "budget.coarse_constant");
    }
    out.budget.eps = out.problem.eps;
    out.budget.validate();
    return out;
}

ProblemFile parse_problem(const std::filesystem::path& path, int precision_bits) {
    return parse_problem_text(read_text(path), precision_bits);
}

std::string write_problem(const ProblemFile& file) {
    json poly = json::array(), bps = json::array();
    for (const auto& p : file.polygon) poly.push_back(exact_point(p));
    for (std::size_t e = 0; e < file.problem.phi.edge_count(); ++e)
        for (const auto& b : file.problem.phi.breakpoints(e))
            if (b.t != 1) bps.push_back(json::array({json::array({e, exact(b.t)}), exact_point(b.image)}));
    json doc{{"polygon", poly},
             {"alpha", file.problem.direction.requested_alpha()},
             {"eps", file.problem.eps},
             {"boundary_map", bps},
             {"budget",
              {{"max_refinements", file.budget.max_refinements},
               {"delta_shrink_factor", file.budget.delta_shrink_factor},
               {"coarse_constant", file.budget.coarse_constant}}}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------------------------
// Meshes and reports

std::string write_mesh(const AffineMesh& mesh) {
    json verts = json::array(), tris = json::array();
    for (const auto& v : mesh.vertices)
        verts.push_back(json{{"pre", exact_point(v.pre)},
                             {"img", exact_point(v.img)},
                             {"pre_decimal", decimal_point(v.pre)},
                             {"img_decimal", decimal_point(v.img)}});
    for (const auto& t : mesh.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
    json doc{{"vertices", verts}, {"triangles", tris}};
    if (mesh.trace.edge_count() > 0) doc["trace"] = trace_json(mesh.trace);
    return doc.dump(2) + "\n";
}

AffineMesh read_mesh(std::string_view text) {
    const json doc = parse_json(text);
    AffineMesh mesh;
    const json& verts = member(doc, "vertices", "mesh");
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const std::string f = "vertices[" + std::to_string(i) + "]";
        mesh.vertices.push_back({point(member(verts[i], "pre", f), f + ".pre", 0), point(member(verts[i], "img", f), f + ".img", 0)});
    }
    const json& tris = member(doc, "triangles", "mesh");
    for (std::size_t i = 0; i < tris.size(); ++i) {
        const json& t = tris[i];
        if (!t.is_array() || t.size() != 3) fail(ErrorKind::Parse, "triangles[" + std::to_string(i) + "]: expected three indices");
        Triangle tri{t[0].get<std::size_t>(), t[1].get<std::size_t>(), t[2].get<std::size_t>()};
        for (std::size_t k : tri)
            if (k >= mesh.vertices.size()) fail(ErrorKind::Validation, "triangles[" + std::to_string(i) + "]: index out of range");
        mesh.triangles.push_back(tri);
    }
    if (doc.contains("trace")) mesh.trace = trace_from_json(doc["trace"]);
    return mesh;
}

namespace {

json psi_json(const PsiBreakdown& psi) {
    return json{{"horizontal", {{"value", certified_number(psi.horizontal.value)}, {"error", certified_number(psi.horizontal.error)}}},
                {"vertical", {{"value", certified_number(psi.vertical.value)}, {"error", certified_number(psi.vertical.error)}}},
                {"total", certified_number(psi.total())},
                {"error_bound", certified_number(psi.error_bound())},
                {"closed_form_pieces", psi.pieces},
                {"fallback_pieces", psi.fallbacks}};
}

json direction_json(const Direction& dir) {
    return json{{"requested_alpha", dir.requested_alpha()}, {"cos", exact(dir.cos())}, {"sin", exact(dir.sin())}};
}

} // namespace

std::string write_report(const ExtensionResult& r) {
    json checks = json::object();
    for (const auto& c : r.report.checks) checks[c.name] = json{{"ok", c.ok}, {"witness", c.witness}};
    json ledger = json::array();
    for (const auto& e : r.ledger)
        ledger.push_back(json{{"stage", e.stage}, {"detail", e.detail}, {"target", certified_number(e.target)},
                              {"achieved", certified_number(e.achieved)}});
    const auto [h, v] = std::pair{r.margins.along >= 0, r.margins.across >= 0};
    json doc{{"direction", direction_json(r.direction)},
             {"eps", certified_number(r.eps)},
             {"eta", certified_number(r.eta)},
             {"polygon_class", to_string(r.polygon_class)},
             {"psi", psi_json(r.psi)},
             {"variation",
              {{"along", interval(r.variation.along.value)},
               {"across", interval(r.variation.across.value)},
               {"manhattan", interval(r.variation.manhattan)}}},
             {"margins",
              {{"manhattan", certified_number(r.margins.manhattan)},
               {"along", certified_number(r.margins.along)},
               {"across", certified_number(r.margins.across)}}},
             {"inequalities", {{"manhattan", r.margins.manhattan >= 0}, {"along", h}, {"across", v}}},
             {"verification",
              {{"passed", r.report.passed()},
               {"image_sign", r.report.image_sign},
               {"preimage_area", exact(r.report.preimage_area)},
               {"image_area", exact(r.report.image_area)},
               {"checks", checks}}},
             {"mesh", {{"vertices", r.mesh.vertices.size()}, {"triangles", r.mesh.triangles.size()}}},
             {"refinements", r.refinements},
             {"certified", r.certified()},
             {"ledger", ledger}};
    return doc.dump(2) + "\n";
}

std::string write_psi_report(const PsiBreakdown& psi, const Direction& dir) {
    return json{{"direction", direction_json(dir)}, {"psi", psi_json(psi)}}.dump(2) + "\n";
}

// ---------------------------------------------------------------------------------------------
// Figures

namespace {

struct Panel {
    double x0, y0, scale, offset_x;
    double height;

    std::string at(const Point& p) const {
        std::ostringstream os;
        os.precision(6);
        os << std::fixed << offset_x + (p.x.get_d() - x0) * scale << "," << height - (p.y.get_d() - y0) * scale;
        return os.str();
    }
};

Panel panel_for(const std::vector<Point>& pts, double offset_x, double size, double margin) {
    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (const auto& p : pts) {
        xmin = std::min(xmin, p.x.get_d());
        xmax = std::max(xmax, p.x.get_d());
        ymin = std::min(ymin, p.y.get_d());
        ymax = std::max(ymax, p.y.get_d());
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = (size - 2 * margin) / span;
    return {xmin - margin / scale, ymin - margin / scale, scale, offset_x, size};
}

bool on_any(std::span<const std::array<Point, 2>> segments, const Point& a, const Point& b) {
    return std::any_of(segments.begin(), segments.end(),
                       [&](const auto& s) { return on_segment(a, s[0], s[1]) && on_segment(b, s[0], s[1]); });
}

} // namespace

std::string render_svg(const AffineMesh& mesh, std::span<const std::array<Point, 2>> skeleton) {
    constexpr double size = 480, margin = 20;
    std::vector<Point> pre, img;
    for (const auto& v : mesh.vertices) {
        pre.push_back(v.pre);
        img.push_back(v.img);
    }
    const Panel left = panel_for(pre, 0, size, margin), right = panel_for(img, size, size, margin);

    // Edge multiplicity separates boundary edges (one triangle) from interior ones.
    std::map<std::pair<std::size_t, std::size_t>, int> edges;
    for (const auto& t : mesh.triangles)
        for (int k = 0; k < 3; ++k) {
            auto a = t[k], b = t[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edges[{a, b}];
        }

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << 2 * size << "\" height=\"" << size
       << "\" viewBox=\"0 0 " << 2 * size << " " << size << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << 2 * size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
    for (const Panel* panel : {&left, &right}) {
        const bool image = panel == &right;
        os << "<g id=\"" << (image ? "image" : "preimage") << "\">\n";
        for (const auto& t : mesh.triangles) {
            os << "<polygon points=\"";
            for (int k = 0; k < 3; ++k) os << (k ? " " : "") << panel->at(image ? img[t[k]] : pre[t[k]]);
            os << "\" fill=\"#e8eef7\" stroke=\"#9aa7b8\" stroke-width=\"0.5\"/>\n";
        }
        for (const auto& [e, count] : edges) {
            const bool boundary = count == 1;
            const bool skel = !boundary && on_any(skeleton, pre[e.first], pre[e.second]);
            if (!boundary && !skel) continue;
            const Point& a = image ? img[e.first] : pre[e.first];
            const Point& b = image ? img[e.second] : pre[e.second];
            os << "<polyline points=\"" << panel->at(a) << " " << panel->at(b) << "\" fill=\"none\" stroke=\""
               << (boundary ? "#1b1b1b" : "#c0392b") << "\" stroke-width=\"" << (boundary ? 1.6 : 1.1) << "\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorKind::Io, "write failed for " + path.string());
}

void emit(const ExtensionResult& result, const std::filesystem::path& mesh_path, const std::filesystem::path& report_path,
          const std::optional<std::filesystem::path>& svg_path) {
    write_text(mesh_path, write_mesh(result.mesh));
    write_text(report_path, write_report(result));
    if (svg_path) write_text(*svg_path, render_svg(result.mesh, result.skeleton));
}

} // namespace minext
