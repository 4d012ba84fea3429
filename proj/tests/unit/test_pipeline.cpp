#include "generators.hpp"

#include "minext/errors.hpp"
#include "minext/pipeline.hpp"

#include <doctest.h>

#include <cmath>

using namespace minext;

namespace {

Point P(long x, long y) { return {Rational(x), Rational(y)}; }

BoundaryMap affine_map(const std::vector<Point>& poly, const gen::Affine& a) {
    Loop loop;
    for (const auto& p : poly) loop.push_back({p, a(p)});
    return BoundaryMap::from_loop(loop);
}

const gen::Affine kIdentity{Rational(1), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
const std::vector<Point> kSquare{P(0, 0), P(1, 0), P(1, 1), P(0, 1)};

} // namespace

TEST_CASE("identity square") {
    const Problem p{ConvexPolygon(kSquare), Direction(), affine_map(kSquare, kIdentity), 1e-3};
    const auto r = extend_minimal(p, ExtenderBudget{});
    CHECK(r.certified());
    CHECK(r.variation.manhattan.contains(2.0));
    CHECK(std::abs(r.psi.total() - 2) < 1e-9);
    CHECK(r.margins.manhattan >= 0);
    CHECK(r.margins.manhattan <= 1e-3);
    CHECK(r.polygon_class == PolygonClass::Rectangle);
    const auto [h, v] = componentwise_check(r);
    CHECK(h);
    CHECK(v);
}

TEST_CASE("identity square at a rotated direction") {
    const Direction dir = Direction::snapped(M_PI / 3);
    const Problem p{ConvexPolygon(kSquare), dir, affine_map(kSquare, kIdentity), 1e-3};
    const auto r = extend_minimal(p, ExtenderBudget{});
    CHECK(r.certified());
    // The square is a diamond-like polygon in the rotated frame.
    CHECK(r.polygon_class == PolygonClass::NoParallel);
    // Identity: every slice integral is the area.
    CHECK(r.psi.horizontal.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.psi.vertical.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.variation.manhattan.hi <= r.psi.total() + 1e-3);
    CHECK(r.variation.manhattan.lo >= r.psi.total() - r.psi.error_bound() - 1e-12);
}

TEST_CASE("stretch components") {
    const gen::Affine a{Rational(2), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
    const Problem p{ConvexPolygon(kSquare), Direction(), affine_map(kSquare, a), 1e-3};
    const auto r = extend_minimal(p, ExtenderBudget{});
    CHECK(r.variation.along.value.hi <= 2 + 1e-3);
    CHECK(r.variation.across.value.hi <= 1 + 1e-3);
    const auto [h, v] = componentwise_check(r);
    CHECK(h);
    CHECK(v);
}

TEST_CASE("diamond with a shear takes the two-tip path") {
    const std::vector<Point> dia{P(1, 0), P(0, 1), P(-1, 0), P(0, -1)};
    const gen::Affine a{Rational(1), Rational(1), Rational(0), Rational(1), Rational(0), Rational(0)};
    const Problem p{ConvexPolygon(dia), Direction(), affine_map(dia, a), 0.05};
    const auto r = extend_minimal(p, ExtenderBudget{});
    CHECK(r.polygon_class == PolygonClass::NoParallel);
    int tips = 0;
    for (const auto& e : r.ledger) tips += e.stage == "tip";
    CHECK(tips == 2);
    CHECK(r.certified());
    // Affine data: both components are area times the column norms of the matrix.
    CHECK(r.psi.horizontal.value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.psi.vertical.value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("rotation by a quarter turn swaps the components") {
    gen::Rng rng(17);
    const auto poly = gen::convex_polygon(rng, 5);
    const auto phi = affine_map(poly, kIdentity);
    const auto r0 = extend_minimal(Problem{ConvexPolygon(poly), Direction(), phi, 1e-2}, ExtenderBudget{});
    const auto r1 = extend_minimal(Problem{ConvexPolygon(poly), Direction::snapped(M_PI / 2), phi, 1e-2}, ExtenderBudget{});
    CHECK(r0.psi.horizontal.value == doctest::Approx(r1.psi.vertical.value).epsilon(1e-9));
    CHECK(r0.psi.vertical.value == doctest::Approx(r1.psi.horizontal.value).epsilon(1e-9));
}

TEST_CASE("perturbed problems certify both inequalities") {
    gen::Rng rng(23);
    const double alphas[] = {0.0, M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2};
    for (int k = 0; k < 5; ++k) {
        CAPTURE(k);
        const auto poly = gen::convex_polygon(rng, 7);
        const auto phi = gen::perturbed_affine_map(rng, poly, gen::affine(rng, k == 2), 1, 0.05);
        const Direction dir = Direction::snapped(alphas[k]);
        const double psi = psi_alpha(ConvexPolygon(poly), dir, phi).total();
        const auto r = extend_minimal(Problem{ConvexPolygon(poly), dir, phi, 0.05 * psi}, ExtenderBudget{});
        CHECK(r.certified());
        const auto [h, v] = componentwise_check(r);
        CHECK(h);
        CHECK(v);
        CHECK(r.variation.along.value.hi >= r.psi.horizontal.lower());
        CHECK(r.variation.across.value.hi >= r.psi.vertical.lower());
    }
}

TEST_CASE("problem validation") {
    const auto phi = affine_map(kSquare, kIdentity);
    CHECK_THROWS_WITH_AS(extend_minimal(Problem{ConvexPolygon(kSquare), Direction(), phi, 0.0}, ExtenderBudget{}),
                         doctest::Contains("eps must be positive"), Error);
    const std::vector<Point> other{P(0, 0), P(2, 0), P(2, 2), P(0, 2)};
    CHECK_THROWS_AS(extend_minimal(Problem{ConvexPolygon(other), Direction(), phi, 1e-3}, ExtenderBudget{}), Error);
}
