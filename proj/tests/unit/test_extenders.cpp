#include "generators.hpp"

#include "minext/errors.hpp"
#include "minext/extenders.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace minext;

namespace {

Point P(long x, long y) { return {Rational(x), Rational(y)}; }

const std::vector<Point> kSquare{P(0, 0), P(1, 0), P(1, 1), P(0, 1)};

Loop mapped(const std::vector<Point>& poly, const std::function<Point(const Point&)>& f) {
    Loop out;
    for (const auto& p : poly) out.push_back({p, f(p)});
    return out;
}

Loop identity(const std::vector<Point>& poly) {
    return mapped(poly, [](const Point& p) { return p; });
}

/// Square boundary onto the L-hexagon with the right edge carrying three pieces.
Loop square_to_l() {
    return {{P(0, 0), P(0, 0)}, {P(1, 0), P(2, 0)}, {{Rational(1), ratio(1, 3)}, P(2, 1)},
            {{Rational(1), ratio(2, 3)}, P(1, 1)}, {P(1, 1), P(1, 2)}, {P(0, 1), P(0, 2)}};
}

double analytic_affine(const gen::Affine& a, double area, bool along) {
    return along ? area * std::hypot(a.m00.get_d(), a.m10.get_d()) : area * std::hypot(a.m01.get_d(), a.m11.get_d());
}

/// Segment between ring positions i and j is an edge or lies inside the ring without touching other vertices.
bool usable_segment(const std::vector<Point>& ring, std::size_t i, std::size_t j) {
    const std::size_t n = ring.size();
    if ((i + 1) % n == j || (j + 1) % n == i) return true;
    const Point& p = ring[i];
    const Point& q = ring[j];
    for (std::size_t k = 0; k < n; ++k) {
        if (k != i && k != j && on_segment(ring[k], p, q)) return false;
        const std::size_t l = (k + 1) % n;
        if (k == i || k == j || l == i || l == j) continue;
        if (segment_contact(p, q, ring[k], ring[l]) != SegmentContact::None) return false;
    }
    return locate(ring, midpoint(p, q)) == Location::Inside;
}

/// All triangulations of the sub-polygon poly (indices into the full ring) that use only its vertices.
std::vector<std::vector<Triangle>> triangulations(const std::vector<Point>& ring, const std::vector<std::size_t>& poly) {
    if (poly.size() < 3) return {{}};
    std::vector<std::vector<Triangle>> out;
    // The edge poly[0]-poly[1] lies in exactly one triangle; enumerate its apex.
    for (std::size_t k = 2; k < poly.size(); ++k) {
        if (orient(ring[poly[0]], ring[poly[1]], ring[poly[k]]) <= 0) continue;
        if (!usable_segment(ring, poly[1], poly[k]) || !usable_segment(ring, poly[k], poly[0])) continue;
        const std::vector<std::size_t> right(poly.begin() + 1, poly.begin() + static_cast<long>(k) + 1);
        std::vector<std::size_t> left(poly.begin() + static_cast<long>(k), poly.end());
        left.push_back(poly[0]);
        for (const auto& r : triangulations(ring, right))
            for (const auto& l : triangulations(ring, left)) {
                std::vector<Triangle> t{{poly[0], poly[1], poly[k]}};
                t.insert(t.end(), r.begin(), r.end());
                t.insert(t.end(), l.begin(), l.end());
                out.push_back(std::move(t));
            }
    }
    return out;
}

} // namespace

TEST_CASE("extend_cell") {
    SUBCASE("identity on the unit square") {
        const auto m = extend_cell(identity(kSquare));
        CHECK(m.triangles.size() == 2);
        for (const auto& v : m.vertices) CHECK(v.pre == v.img);
    }
    SUBCASE("affine map onto a convex quadrilateral") {
        const gen::Affine a{Rational(2), ratio(1, 2), Rational(-1), Rational(1), Rational(3), Rational(0)};
        const auto m = extend_cell(mapped(kSquare, a));
        const auto v = mesh_variation(m, Direction());
        CHECK(v.along.value.contains(std::hypot(2.0, -1.0)));
        CHECK(v.across.value.contains(std::hypot(0.5, 1.0)));
        for (const auto& t : m.triangles) {
            const auto j = jacobian(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
            CHECK(j.m00 == 2);
            CHECK(j.m01 == ratio(1, 2));
        }
    }
    SUBCASE("dart image") {
        // (1,1) maps to a reflex vertex of the image.
        Loop dart{{P(0, 0), P(0, 0)}, {P(1, 0), P(4, 0)}, {P(1, 1), P(1, 1)}, {P(0, 1), P(0, 4)}};
        const auto m = extend_cell(dart);
        CHECK(m.triangles.size() == 2);
        CHECK(verify_mesh(m, m.trace).passed());
        for (const auto& t : m.triangles) {
            // The diagonal of the dart must run through the reflex vertex.
            const bool uses = t[0] == 2 || t[1] == 2 || t[2] == 2;
            CHECK(uses);
        }
    }
    SUBCASE("orientation reversing image") {
        const auto m = extend_cell(mapped(kSquare, [](const Point& p) { return Point{p.x, -p.y}; }));
        CHECK(verify_mesh(m, m.trace).image_sign == -1);
    }
    SUBCASE("collinear preimage nodes") {
        // Preimage triangle with its base split in three; image is a non-convex pentagon.
        Loop loop{{P(0, 0), P(0, 0)}, {P(1, 0), P(1, 1)}, {P(2, 0), P(2, 1)}, {P(3, 0), P(3, 0)}, {P(0, 3), P(1, 3)}};
        const auto m = extend_cell(loop);
        CHECK(verify_mesh(m, m.trace).passed());
    }
    SUBCASE("errors") {
        Loop bow{{P(0, 0), P(0, 0)}, {P(1, 0), P(1, 1)}, {P(1, 1), P(1, 0)}, {P(0, 1), P(0, 1)}};
        CHECK_THROWS_AS(extend_cell(bow), Error);
        Loop flat{{P(0, 0), P(0, 0)}, {P(1, 0), P(1, 0)}, {P(1, 1), P(2, 0)}, {P(0, 1), P(3, 0)}};
        CHECK_THROWS_AS(extend_cell(flat), Error);
    }
}

TEST_CASE("replaying image triangulations in a convex preimage never crosses") {
    gen::Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = 4 + trial % 5;
        const auto img = gen::star_polygon(rng, n);
        // Convex preimage with the same number of vertices: points on a parabola.
        std::vector<Point> pre;
        for (int k = 0; k < n; ++k) pre.push_back({Rational(k), Rational(k * k - (n - 1) * k)});
        std::vector<Point> pre_ccw = pre;
        if (signed_area2(pre_ccw) < 0) std::reverse(pre_ccw.begin(), pre_ccw.end());
        std::vector<std::size_t> poly(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < poly.size(); ++i) poly[i] = i;
        const auto all = triangulations(img, poly);
        CHECK(!all.empty());
        for (const auto& tris : all) {
            Rational area = 0;
            for (const auto& t : tris) {
                CHECK(orient(pre_ccw[t[0]], pre_ccw[t[1]], pre_ccw[t[2]]) > 0);
                area += signed_area2(std::vector<Point>{pre_ccw[t[0]], pre_ccw[t[1]], pre_ccw[t[2]]});
            }
            CHECK(area == signed_area2(pre_ccw));
        }
    }
}

TEST_CASE("extend_rectangle") {
    const ConvexPolygon square(kSquare);
    ExtenderBudget budget;
    budget.eps = 1e-3;
    SUBCASE("identity") {
        const auto r = extend_rectangle(square, BoundaryMap::from_loop(identity(kSquare)), budget);
        CHECK(r.variation.manhattan.hi <= 2 + 1e-3);
        CHECK(r.variation.manhattan.contains(2.0));
    }
    SUBCASE("stretch") {
        const auto r = extend_rectangle(
            square, BoundaryMap::from_loop(mapped(kSquare, [](const Point& p) { return Point{2 * p.x, p.y}; })), budget);
        CHECK(r.variation.along.value.hi <= 2 + 1e-3);
        CHECK(r.variation.across.value.hi <= 1 + 1e-3);
    }
    SUBCASE("L-shaped image") {
        budget.eps = 0.05;
        const Loop loop = square_to_l();
        const auto psi = psi_alpha(loop, Direction());
        const auto r = extend_rectangle(square, BoundaryMap::from_loop(loop), budget);
        CAPTURE(r.refinements);
        CHECK(r.variation.manhattan.hi <= psi.total() + psi.error_bound() + 0.05);
        CHECK(r.variation.along.value.hi <= psi.horizontal.upper() + 0.05);
        CHECK(r.variation.across.value.hi <= psi.vertical.upper() + 0.05);
        // Lower half of the sandwich.
        CHECK(r.variation.along.value.hi >= psi.horizontal.lower());
        CHECK(r.variation.across.value.hi >= psi.vertical.lower());
    }
    SUBCASE("not a rectangle") {
        const std::vector<Point> tri{P(0, 0), P(1, 0), P(0, 1)};
        CHECK_THROWS_AS(extend_rectangle(ConvexPolygon(tri), BoundaryMap::from_loop(identity(tri)), budget), Error);
    }
}

TEST_CASE("extend_triangle_direct") {
    SUBCASE("worked example") {
        Loop loop{{P(-1, 0), P(-1, 0)}, {P(0, 0), P(0, 0)}, {P(1, 0), P(1, 0)}, {P(0, 1), P(0, 2)}};
        const auto r = extend_triangle_direct(loop);
        CHECK(r.mesh.triangles.size() == 2);
        CHECK(r.variation.manhattan.contains(3.0));
        CHECK(r.variation.manhattan.width() < 1e-12);
        const double bound = (2 + 2 * std::sqrt(5.0)) * (2 + 2 * std::sqrt(2.0));
        CHECK(r.bound == doctest::Approx(bound));
        CHECK(r.variation.manhattan.hi <= bound);
    }
    SUBCASE("identity") {
        Loop loop{{P(-1, 0), P(-1, 0)}, {P(0, 0), P(0, 0)}, {P(1, 0), P(1, 0)}, {P(0, 1), P(0, 1)}};
        CHECK(extend_triangle_direct(loop).variation.manhattan.contains(2.0));
    }
    SUBCASE("foot off the bisector") {
        Loop loop{{P(-1, 0), P(-1, 0)}, {{ratio(1, 4), Rational(0)}, {ratio(1, 4), Rational(0)}}, {P(1, 0), P(1, 0)},
                  {P(0, 1), P(0, 1)}};
        CHECK_THROWS_WITH_AS(extend_triangle_direct(loop), doctest::Contains("PreconditionViolated"), Error);
    }
}

TEST_CASE("extend_triangle_indirect") {
    const std::vector<Point> tri{P(0, 0), P(1, 0), P(1, 1)};
    ExtenderBudget budget;
    budget.eps = 1e-2;
    SUBCASE("affine boundary map takes the direct tier") {
        const gen::Affine a{Rational(1), ratio(1, 4), Rational(0), Rational(2), Rational(0), Rational(0)};
        const auto r = extend_triangle_indirect(mapped(tri, a), budget);
        CHECK(r.tier == 1);
        CHECK(r.variation.along.value.contains(analytic_affine(a, 0.5, true)));
        CHECK(r.variation.across.value.contains(analytic_affine(a, 0.5, false)));
        CHECK(r.variation.manhattan.hi <= r.bound);
    }
    SUBCASE("non-convex image through the grid tier") {
        // The vertical leg is pushed in towards the hypotenuse.
        Loop loop{{P(0, 0), P(0, 0)}, {P(1, 0), P(1, 0)}, {{Rational(1), ratio(1, 2)}, {ratio(1, 2), ratio(1, 4)}},
                  {P(1, 1), P(1, 1)}};
        budget.force_tier2 = true;
        const auto r = extend_triangle_indirect(loop, budget);
        CHECK(r.tier == 2);
        CHECK(verify_mesh(r.mesh, r.mesh.trace).passed());
        const auto psi = psi_alpha(loop, Direction());
        CHECK(r.variation.manhattan.hi <= psi.total() + 242 * (2 + std::sqrt(2.0)) * std::sqrt(2.0) + budget.eps);
    }
    SUBCASE("degenerate hypotenuse image") {
        Loop loop{{P(0, 0), P(0, 0)}, {P(1, 0), P(1, 0)}, {P(1, 1), P(0, 0)}};
        CHECK_THROWS_WITH_AS(extend_triangle_indirect(loop, budget), doctest::Contains("PreconditionViolated"), Error);
    }
    SUBCASE("not a right triangle") {
        CHECK_THROWS_AS(extend_triangle_indirect(identity({P(0, 0), P(2, 0), P(1, 1)}), budget), Error);
    }
}

TEST_CASE("extend_coarse") {
    ExtenderBudget budget;
    SUBCASE("identity square") {
        const auto r = extend_coarse(SimplePolygon(kSquare), BoundaryMap::from_loop(identity(kSquare)), budget);
        CHECK(r.variation.manhattan.contains(2.0));
        CHECK(r.bound == doctest::Approx(100.0 * 4 * 4));
    }
    SUBCASE("non-convex piece") {
        const std::vector<Point> l{P(0, 0), P(2, 0), P(2, 1), P(1, 1), P(1, 2), P(0, 2)};
        const gen::Affine a{Rational(1), ratio(1, 2), Rational(0), Rational(1), Rational(0), Rational(0)};
        const auto r = extend_coarse(SimplePolygon(l), BoundaryMap::from_loop(mapped(l, a)), budget);
        CHECK(verify_mesh(r.mesh, r.mesh.trace).passed());
        CHECK(r.variation.manhattan.contains(analytic_affine(a, 3, true) + analytic_affine(a, 3, false)));
    }
}
