#include "minext/pipeline.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace minext {

void Problem::validate() const {
    if (!(eps > 0) || !std::isfinite(eps)) fail(ErrorKind::Validation, "eps must be positive");
    if (!phi.is_closed()) fail(ErrorKind::Validation, "boundary map must be closed");
    std::set<Point, PointLess> corners, vertices(q.vertices().begin(), q.vertices().end());
    for (std::size_t e = 0; e < phi.edge_count(); ++e) corners.insert(phi.edge(e).a);
    // Straight corners of the map may subdivide polygon sides.
    for (const auto& v : vertices)
        if (!corners.count(v)) fail(ErrorKind::Validation, "polygon vertex without a boundary map corner");
    for (const auto& c : corners)
        if (q.locate(c) != Location::Boundary) fail(ErrorKind::Validation, "boundary map corner off the polygon boundary");
    validate_injective(phi);
}

bool ExtensionResult::certified() const {
    return report.passed() && margins.manhattan >= 0 && margins.along >= 0 && margins.across >= 0;
}

double tip_eta(double eps, double perimeter, double coarse_constant) {
    return 0.5 * std::min(1.0, eps / (coarse_constant + coarse_constant * perimeter));
}

namespace {

Loop counterclockwise(Loop loop) {
    std::vector<Point> pre;
    for (const auto& n : loop) pre.push_back(n.pre);
    if (signed_area2(pre) < 0) std::reverse(loop.begin(), loop.end());
    return loop;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

Margins margins_of(const PsiBreakdown& psi, const MeshVariation& v, double eps) {
    return {psi.horizontal.lower() + psi.vertical.lower() + eps - v.manhattan.hi,
            psi.horizontal.lower() + eps - v.along.value.hi, psi.vertical.lower() + eps - v.across.value.hi};
}

Interval sum_along(const std::vector<PieceExtension>& parts) {
    Interval s;
    for (const auto& p : parts) s += p.variation.along.value;
    return s;
}

Interval sum_across(const std::vector<PieceExtension>& parts) {
    Interval s;
    for (const auto& p : parts) s += p.variation.across.value;
    return s;
}

} // namespace

ExtensionResult extend_minimal(const Problem& problem, const ExtenderBudget& budget) {
    problem.validate();
    budget.validate();
    const double eps = problem.eps;
    const Direction& dir = problem.direction;

    ExtensionResult result;
    result.eps = eps;
    result.direction = dir;
    result.psi = psi_alpha(problem.q, dir, problem.phi);
    const PsiBreakdown& psi = result.psi;
    result.ledger.push_back({"psi", "horizontal " + fmt(psi.horizontal.value) + ", vertical " + fmt(psi.vertical.value) +
                                        ", error " + fmt(psi.error_bound()),
                             0.0, psi.total()});

    // Preimage coordinates in the alpha = 0 frame; images are untouched.
    Loop frame_loop;
    for (const auto& n : counterclockwise(problem.phi.loop())) frame_loop.push_back({dir.to_frame(n.pre), n.img});
    std::vector<Point> frame_vertices;
    for (const auto& v : problem.q.vertices()) frame_vertices.push_back(dir.to_frame(v));
    const ConvexPolygon q(frame_vertices);
    const BoundaryMap frame_trace = BoundaryMap::from_loop(frame_loop);
    result.polygon_class = classify_polygon(q, Direction());
    result.ledger.push_back({"classify", std::string("class ") + to_string(result.polygon_class), 0.0, 0.0});

    const double h_target = psi.horizontal.lower() + eps;
    const double v_target = psi.vertical.lower() + eps;
    const double total_target = psi.horizontal.lower() + psi.vertical.lower() + eps;
    auto fits = [&](const Interval& along, const Interval& across, const Interval& manhattan) {
        const double slack = 1e-12 * std::max(1.0, total_target);
        return along.hi <= h_target + slack && across.hi <= v_target + slack && manhattan.hi <= total_target + slack;
    };

    const double perimeter = problem.q.perimeter();
    double eta = tip_eta(eps, perimeter, budget.coarse_constant);
    std::vector<AffineMesh> parts;
    std::vector<std::array<Point, 2>> skeleton;
    for (int round = 0;; ++round) {
        parts.clear();
        std::vector<PieceExtension> tips;
        ConvexPolygon body = q;
        Loop body_loop = frame_loop;
        try {
            if (result.polygon_class == PolygonClass::OneParallel || result.polygon_class == PolygonClass::NoParallel) {
                const TipDecomposition tipped = remove_tips(q, frame_loop, eta);
                eta = tipped.eta;
                skeleton.clear();
                for (const auto& t : tipped.tips) {
                    skeleton.push_back({t.left, t.foot});
                    skeleton.push_back({t.foot, t.right});
                    skeleton.push_back({t.apex, t.foot});
                    tips.push_back(extend_triangle_direct(t.loop));
                    result.ledger.push_back({"tip", "apex (" + fmt(t.apex.x.get_d()) + ", " + fmt(t.apex.y.get_d()) + ")",
                                             tips.back().bound, tips.back().variation.manhattan.hi});
                }
                body = tipped.delta;
                body_loop = tipped.delta_loop;
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotInjective || round >= budget.max_refinements) throw;
            result.ledger.push_back({"tip", std::string("retry with smaller eta: ") + e.what(), 0.0, 0.0});
            eta /= 2;
            continue;
        }
        const Interval tip_along = sum_along(tips), tip_across = sum_across(tips);
        for (auto& t : tips) parts.push_back(std::move(t.mesh));

        GridOptions start;
        start.strips = 2;
        start.columns = 2;
        start.image_step = image_perimeter(body_loop) / 16;
        start.split = result.polygon_class != PolygonClass::Rectangle;
        const GridRun grid = extend_grid(body, body_loop, start, budget, [&](const MeshVariation& m) {
            return fits(m.along.value + tip_along, m.across.value + tip_across, m.manhattan + tip_along + tip_across);
        });
        for (const auto& n : grid.notes) result.ledger.push_back({"grid", n, 0.0, 0.0});
        result.ledger.push_back({"grid", "accepted " + std::to_string(grid.options.strips) + "x" +
                                             std::to_string(grid.options.columns) + " after " +
                                             std::to_string(grid.refinements) + " refinements, " +
                                             std::to_string(grid.triangle_cells) + " triangle cells (" +
                                             std::to_string(grid.tier2_cells) + " on the grid tier)",
                                 total_target - tip_along.hi - tip_across.hi, grid.variation.manhattan.hi});
        result.refinements = grid.refinements;
        skeleton.insert(skeleton.end(), grid.skeleton.begin(), grid.skeleton.end());
        parts.push_back(grid.mesh);
        break;
    }
    result.eta = eta;
    for (const auto& [a, b] : skeleton) result.skeleton.push_back({dir.from_frame(a), dir.from_frame(b)});

    AffineMesh merged = merge_meshes(parts, frame_trace);
    result.mesh = map_preimages(merged, dir, false);
    result.mesh.trace = problem.phi;
    result.report = verify_mesh(result.mesh, problem.phi);
    result.variation = mesh_variation(result.mesh, dir);
    result.margins = margins_of(psi, result.variation, eps);
    result.ledger.push_back({"certify", std::string("mesh audit ") + (result.report.passed() ? "passed" : "failed") +
                                            ", " + std::to_string(result.mesh.triangles.size()) + " triangles",
                             total_target, result.variation.manhattan.hi});
    if (!result.certified()) {
        std::string why;
        for (const auto& c : result.report.checks)
            if (!c.ok) why += " " + c.name + " (" + c.witness + ")";
        fail(ErrorKind::BudgetExhausted, "final certification failed: margins " + fmt(result.margins.manhattan) + ", " +
                                             fmt(result.margins.along) + ", " + fmt(result.margins.across) + why);
    }
    return result;
}

std::pair<bool, bool> componentwise_check(const ExtensionResult& result) {
    const MeshVariation v = mesh_variation(result.mesh, result.direction);
    const bool audit = verify_mesh(result.mesh, result.mesh.trace).passed();
    return {audit && v.along.value.hi <= result.psi.horizontal.lower() + result.eps,
            audit && v.across.value.hi <= result.psi.vertical.lower() + result.eps};
}

} // namespace minext
