#include "minext/extenders.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace minext {

void ExtenderBudget::validate() const {
    if (!(eps > 0)) fail(ErrorKind::Validation, "eps must be positive");
    if (max_refinements < 0) fail(ErrorKind::Validation, "max_refinements must be non-negative");
    if (!(delta_shrink_factor > 0 && delta_shrink_factor < 1))
        fail(ErrorKind::Validation, "delta_shrink_factor must lie in (0, 1)");
    if (!(coarse_constant > 0)) fail(ErrorKind::Validation, "coarse constant must be positive");
}

double preimage_perimeter(const Loop& loop) {
    double s = 0;
    for (std::size_t i = 0; i < loop.size(); ++i) s += length(loop[i].pre, loop[(i + 1) % loop.size()].pre);
    return s;
}

double image_perimeter(const Loop& loop) {
    double s = 0;
    for (std::size_t i = 0; i < loop.size(); ++i) s += length(loop[i].img, loop[(i + 1) % loop.size()].img);
    return s;
}

namespace {

struct EdgeLess {
    bool operator()(const std::pair<Point, Point>& a, const std::pair<Point, Point>& b) const {
        const PointLess less;
        if (less(a.first, b.first)) return true;
        if (less(b.first, a.first)) return false;
        return less(a.second, b.second);
    }
};

Loop counterclockwise(Loop loop) {
    std::vector<Point> pre;
    for (const auto& n : loop) pre.push_back(n.pre);
    if (signed_area2(pre) < 0) std::reverse(loop.begin(), loop.end());
    return loop;
}

/// Simultaneous triangulation of a preimage and an image polygon sharing vertex indices. Both are handled as
/// counterclockwise; an orientation-reversing image is mirrored first.
class DualTriangulator {
public:
    DualTriangulator(const Loop& loop, bool mirrored) : mirrored_(mirrored) {
        for (const auto& n : loop) {
            pre_.push_back(n.pre);
            img_.push_back(mirrored ? Point{-n.img.x, n.img.y} : n.img);
        }
    }

    void run(std::vector<std::size_t> poly) {
        while (poly.size() > 3) {
            if (clip_ear(poly)) continue;
            if (split(poly)) return;
            star(poly);
            return;
        }
        if (orient(pre_[poly[0]], pre_[poly[1]], pre_[poly[2]]) <= 0 ||
            orient(img_[poly[0]], img_[poly[1]], img_[poly[2]]) <= 0)
            fail(ErrorKind::DegenerateImage, "degenerate final triangle");
        triangles_.push_back({poly[0], poly[1], poly[2]});
    }

    std::vector<Node> nodes() const {
        std::vector<Node> out;
        for (std::size_t i = 0; i < pre_.size(); ++i)
            out.push_back({pre_[i], mirrored_ ? Point{-img_[i].x, img_[i].y} : img_[i]});
        return out;
    }
    const std::vector<Triangle>& triangles() const { return triangles_; }

private:
    static bool in_closed_triangle(const Point& p, const Point& a, const Point& b, const Point& c) {
        return orient(a, b, p) >= 0 && orient(b, c, p) >= 0 && orient(c, a, p) >= 0;
    }

    bool proper_ear(const std::vector<Point>& pts, const std::vector<std::size_t>& poly, std::size_t k) const {
        const std::size_t n = poly.size();
        const std::size_t a = poly[(k + n - 1) % n], b = poly[k], c = poly[(k + 1) % n];
        if (orient(pts[a], pts[b], pts[c]) <= 0) return false;
        for (std::size_t v : poly) {
            if (v == a || v == b || v == c) continue;
            if (in_closed_triangle(pts[v], pts[a], pts[b], pts[c])) return false;
        }
        return true;
    }

    bool clip_ear(std::vector<std::size_t>& poly) {
        for (std::size_t k = 0; k < poly.size(); ++k) {
            if (!proper_ear(img_, poly, k) || !proper_ear(pre_, poly, k)) continue;
            const std::size_t n = poly.size();
            triangles_.push_back({poly[(k + n - 1) % n], poly[k], poly[(k + 1) % n]});
            poly.erase(poly.begin() + static_cast<long>(k));
            return true;
        }
        return false;
    }

    static bool proper_diagonal(const std::vector<Point>& pts, const std::vector<std::size_t>& poly, std::size_t i,
                                std::size_t j) {
        const Point& p = pts[poly[i]];
        const Point& q = pts[poly[j]];
        const std::size_t n = poly.size();
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i && k != j && on_segment(pts[poly[k]], p, q)) return false;
            const std::size_t l = (k + 1) % n;
            if (k == i || k == j || l == i || l == j) continue;
            if (segment_contact(p, q, pts[poly[k]], pts[poly[l]]) != SegmentContact::None) return false;
        }
        std::vector<Point> ring;
        for (std::size_t v : poly) ring.push_back(pts[v]);
        return locate(ring, midpoint(p, q)) == Location::Inside;
    }

    bool split(const std::vector<std::size_t>& poly) {
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (!proper_diagonal(img_, poly, i, j) || !proper_diagonal(pre_, poly, i, j)) continue;
                std::vector<std::size_t> first(poly.begin() + static_cast<long>(i), poly.begin() + static_cast<long>(j) + 1);
                std::vector<std::size_t> second(poly.begin() + static_cast<long>(j), poly.end());
                second.insert(second.end(), poly.begin(), poly.begin() + static_cast<long>(i) + 1);
                run(std::move(first));
                run(std::move(second));
                return true;
            }
        return false;
    }

    static std::optional<Point> kernel_point(const std::vector<Point>& pts, const std::vector<std::size_t>& poly) {
        Rational lo_x = pts[poly[0]].x, hi_x = lo_x, lo_y = pts[poly[0]].y, hi_y = lo_y;
        for (std::size_t v : poly) {
            lo_x = std::min(lo_x, pts[v].x);
            hi_x = std::max(hi_x, pts[v].x);
            lo_y = std::min(lo_y, pts[v].y);
            hi_y = std::max(hi_y, pts[v].y);
        }
        std::vector<Point> kernel{{lo_x, lo_y}, {hi_x, lo_y}, {hi_x, hi_y}, {lo_x, hi_y}};
        for (std::size_t k = 0; k < poly.size() && kernel.size() >= 3; ++k)
            kernel = clip_halfplane(kernel, pts[poly[k]], pts[poly[(k + 1) % poly.size()]]);
        if (kernel.size() < 3 || signed_area2(kernel) <= 0) return std::nullopt;
        Point c{Rational(0), Rational(0)};
        for (const auto& p : kernel) c = c + p;
        const Rational m(static_cast<long>(kernel.size()));
        return Point{c.x / m, c.y / m};
    }

    void star(const std::vector<std::size_t>& poly) {
        const auto k_img = kernel_point(img_, poly);
        const auto k_pre = kernel_point(pre_, poly);
        if (!k_img || !k_pre) fail(ErrorKind::DegenerateImage, "no ear, common diagonal or kernel point for a cell");
        const std::size_t s = pre_.size();
        pre_.push_back(*k_pre);
        img_.push_back(*k_img);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const std::size_t a = poly[k], b = poly[(k + 1) % poly.size()];
            if (orient(pre_[s], pre_[a], pre_[b]) <= 0 || orient(img_[s], img_[a], img_[b]) <= 0)
                fail(ErrorKind::DegenerateImage, "degenerate fan triangle");
            triangles_.push_back({s, a, b});
        }
    }

    bool mirrored_;
    std::vector<Point> pre_, img_;
    std::vector<Triangle> triangles_;
};

AffineMesh dual_mesh(const Loop& input) {
    const Loop loop = counterclockwise(input);
    const ImagePolygon image = validate_injective(loop);
    DualTriangulator dual(loop, image.reversed);
    std::vector<std::size_t> all(loop.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    dual.run(all);
    AffineMesh mesh{dual.nodes(), dual.triangles(), BoundaryMap::from_loop(loop)};
    const auto report = verify_mesh(mesh, mesh.trace);
    if (!report.passed()) {
        for (const auto& c : report.checks)
            if (!c.ok) fail(ErrorKind::VerificationFailed, "cell mesh fails " + c.name + ": " + c.witness);
    }
    return mesh;
}

std::vector<Point> loop_preimages(const Loop& loop) {
    std::vector<Point> out;
    for (const auto& n : loop) out.push_back(n.pre);
    return out;
}

/// Certified comparison with a small relative allowance for the rounding of the double-valued bound itself.
bool within(double value, double bound) { return value <= bound + 1e-12 * std::max(1.0, std::abs(bound)); }

std::string describe(const MeshVariation& v) {
    std::ostringstream os;
    os.precision(10);
    os << "along " << v.along.value.hi << ", across " << v.across.value.hi << ", manhattan " << v.manhattan.hi;
    return os.str();
}

} // namespace

AffineMesh extend_cell(const Loop& loop) {
    if (loop.size() < 3) fail(ErrorKind::Validation, "a cell needs at least three nodes");
    const auto pre = loop_preimages(counterclockwise(loop));
    ConvexPolygon(drop_collinear(pre));  // validates convexity
    return dual_mesh(loop);
}

AffineMesh extend_cell(const ConvexPolygon& c, const BoundaryMap& phi) {
    (void)c;
    return extend_cell(phi.loop());
}

GridRun extend_grid(const ConvexPolygon& c, const Loop& loop, GridOptions options, const ExtenderBudget& budget,
                    const GridAcceptance& accept) {
    budget.validate();
    const BoundaryMap trace = BoundaryMap::from_loop(counterclockwise(loop));
    GridRun run;
    for (int attempt = 0; attempt <= budget.max_refinements; ++attempt) {
        try {
            const StripDecomposition d = slice_strips(c, trace.loop(), options);
            std::vector<AffineMesh> parts;
            std::size_t triangles = 0, tier2 = 0;
            for (const auto& cell : d.cells) {
                if (cell.kind == CellKind::Interior) {
                    parts.push_back(extend_cell(cell.loop));
                    continue;
                }
                ++triangles;
                ExtenderBudget inner = budget;
                inner.max_refinements = 0;
                auto piece = extend_triangle_indirect(cell.loop, inner);
                if (piece.tier == 2) ++tier2;
                parts.push_back(std::move(piece.mesh));
            }
            AffineMesh mesh = merge_meshes(parts, trace);
            const auto report = verify_mesh(mesh, trace);
            if (!report.passed()) {
                std::string why;
                for (const auto& ch : report.checks)
                    if (!ch.ok) why += ch.name + " (" + ch.witness + ") ";
                fail(ErrorKind::VerificationFailed, "merged grid mesh: " + why);
            }
            const MeshVariation v = mesh_variation(mesh, Direction());
            if (accept(v)) {
                std::set<std::pair<Point, Point>, EdgeLess> edges;
                for (const auto& cell : d.cells)
                    for (std::size_t k = 0; k < cell.polygon.size(); ++k) {
                        Point a = cell.polygon[k], b = cell.polygon.next(k);
                        if (c.locate(midpoint(a, b)) != Location::Inside) continue;
                        if (PointLess{}(b, a)) std::swap(a, b);
                        edges.insert({a, b});
                    }
                for (const auto& [a, b] : edges) run.skeleton.push_back({a, b});
                run.mesh = std::move(mesh);
                run.variation = v;
                run.options = options;
                run.refinements = attempt;
                run.triangle_cells = triangles;
                run.tier2_cells = tier2;
                return run;
            }
            run.notes.push_back("grid " + std::to_string(options.strips) + "x" + std::to_string(options.columns) +
                                " above target: " + describe(v));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotInjective || e.kind() == ErrorKind::Validation) throw;
            run.notes.push_back("grid " + std::to_string(options.strips) + "x" + std::to_string(options.columns) +
                                " failed: " + e.what());
        }
        options.strips *= 2;
        options.columns *= 2;
        options.delta = snap(options.delta.get_d() * budget.delta_shrink_factor, 60);
        if (options.image_step > 0) options.image_step /= 2;
    }
    std::string log;
    for (const auto& n : run.notes) log += "\n  " + n;
    fail(ErrorKind::BudgetExhausted, "grid refinement limit reached:" + log);
}

PieceExtension extend_rectangle(const ConvexPolygon& r, const BoundaryMap& phi, const ExtenderBudget& budget) {
    budget.validate();
    if (classify_polygon(r, Direction()) != PolygonClass::Rectangle)
        fail(ErrorKind::PreconditionViolated, "extend_rectangle needs an axis-aligned rectangle");
    const Loop loop = counterclockwise(phi.loop());
    const PsiBreakdown psi = psi_alpha(loop, Direction());
    const double h = psi.horizontal.lower() + budget.eps;
    const double v = psi.vertical.lower() + budget.eps;
    const double total = psi.horizontal.lower() + psi.vertical.lower() + budget.eps;
    GridOptions start;
    start.strips = 2;
    start.columns = 2;
    start.image_step = image_perimeter(loop) / 16;
    auto grid = extend_grid(r, loop, start, budget, [&](const MeshVariation& m) {
        return within(m.along.value.hi, h) && within(m.across.value.hi, v) && within(m.manhattan.hi, total);
    });
    PieceExtension out{std::move(grid.mesh), grid.variation, total, 2, grid.refinements, std::move(grid.notes)};
    return out;
}

PieceExtension extend_triangle_direct(const Loop& input, double foot_tolerance) {
    const Loop loop = counterclockwise(input);
    if (loop.size() != 4) fail(ErrorKind::PreconditionViolated, "direct triangle extension needs exactly four nodes");
    std::size_t foot = 4;
    for (std::size_t i = 0; i < 4; ++i)
        if (strictly_inside_segment(loop[i].pre, loop[(i + 3) % 4].pre, loop[(i + 1) % 4].pre)) foot = i;
    if (foot == 4) fail(ErrorKind::PreconditionViolated, "no node inside a side of the triangle");
    const Node& a = loop[(foot + 2) % 4];
    const Node& b = loop[(foot + 3) % 4];
    const Node& f = loop[foot];
    const Node& c = loop[(foot + 1) % 4];
    const double ab = length(a.pre, b.pre), ac = length(a.pre, c.pre);
    const Point bisector_foot = lerp(b.pre, c.pre, Rational(ab / (ab + ac)));
    const double side = length(b.pre, c.pre);
    if (length(bisector_foot, f.pre) > foot_tolerance * side)
        fail(ErrorKind::PreconditionViolated, "cut point is off the internal bisector at the apex");
    if (orient(a.pre, b.pre, c.pre) <= 0) fail(ErrorKind::PreconditionViolated, "degenerate triangle");

    PieceExtension out;
    out.mesh.vertices = {a, b, f, c};
    out.mesh.triangles = {{0, 1, 2}, {0, 2, 3}};
    out.mesh.trace = BoundaryMap::from_loop(loop);
    const auto report = verify_mesh(out.mesh, out.mesh.trace);
    if (!report.passed()) {
        for (const auto& ch : report.checks)
            if (!ch.ok) fail(ErrorKind::DegenerateImage, "two-piece tip extension fails " + ch.name + ": " + ch.witness);
    }
    out.variation = mesh_variation(out.mesh, Direction());
    out.bound = image_perimeter(loop) * preimage_perimeter(loop);
    if (!within(out.variation.manhattan.hi, out.bound))
        fail(ErrorKind::VerificationFailed, "two-piece tip extension exceeds the perimeter bound");
    return out;
}

PieceExtension extend_triangle_indirect(const Loop& input, const ExtenderBudget& budget) {
    budget.validate();
    const Loop loop = counterclockwise(input);
    const BoundaryMap phi = BoundaryMap::from_loop(loop);
    const auto corners = phi.corners();
    if (corners.size() != 3) fail(ErrorKind::PreconditionViolated, "indirect triangle extension needs a triangle");
    // Hypotenuse: the side that is neither horizontal nor vertical.
    std::size_t hyp = 3;
    int horizontal = 0, vertical = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const Point& p = corners[i];
        const Point& q = corners[(i + 1) % 3];
        if (p.y == q.y) ++horizontal;
        else if (p.x == q.x) ++vertical;
        else hyp = i;
    }
    if (horizontal != 1 || vertical != 1 || hyp == 3)
        fail(ErrorKind::PreconditionViolated, "triangle needs one horizontal and one vertical leg");
    const Point& ha = corners[hyp];
    const Point& hc = corners[(hyp + 1) % 3];
    const Point ia = phi.eval_at(ha), ic = phi.eval_at(hc);
    if (ia == ic) fail(ErrorKind::PreconditionViolated, "hypotenuse image is a single point");
    for (const auto& n : loop)
        if (strictly_inside_segment(n.pre, ha, hc) && n.img != lerp(ia, ic, param_on(n.pre, ha, hc)))
            fail(ErrorKind::PreconditionViolated, "boundary map is not linear on the hypotenuse");

    const PsiBreakdown psi = psi_alpha(loop, Direction());
    const double slack = 242.0 * preimage_perimeter(loop) * length(ia, ic);
    const double bound = psi.horizontal.lower() + psi.vertical.lower() + slack + budget.eps;

    PieceExtension out;
    out.bound = bound;
    if (!budget.force_tier2) {
        try {
            out.mesh = extend_cell(loop);
            out.variation = mesh_variation(out.mesh, Direction());
            if (within(out.variation.manhattan.hi, bound)) return out;
            out.notes.push_back("direct cell extension above bound: " + describe(out.variation));
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NotInjective) throw;
            out.notes.push_back(std::string("direct cell extension failed: ") + e.what());
        }
    }
    GridOptions start;
    start.strips = 2;
    start.columns = 2;
    start.image_step = image_perimeter(loop) / 16;
    auto grid = extend_grid(ConvexPolygon(loop_preimages(loop)), loop, start, budget,
                            [&](const MeshVariation& m) { return within(m.manhattan.hi, bound); });
    out.mesh = std::move(grid.mesh);
    out.variation = grid.variation;
    out.tier = 2;
    out.refinements = grid.refinements;
    out.notes.insert(out.notes.end(), grid.notes.begin(), grid.notes.end());
    return out;
}

PieceExtension extend_coarse(const SimplePolygon& piece, const BoundaryMap& phi, const ExtenderBudget& budget) {
    budget.validate();
    const Loop loop = counterclockwise(phi.loop());
    for (const auto& n : loop)
        if (piece.locate(n.pre) != Location::Boundary)
            fail(ErrorKind::PreconditionViolated, "boundary map node off the piece boundary");
    PieceExtension out;
    out.mesh = dual_mesh(loop);
    out.variation = mesh_variation(out.mesh, Direction());
    out.bound = budget.coarse_constant * piece.perimeter() * image_perimeter(loop);
    if (!within(out.variation.manhattan.hi, out.bound))
        fail(ErrorKind::BudgetExhausted, "coarse extension exceeds its bound: " + describe(out.variation));
    return out;
}

} // namespace minext
