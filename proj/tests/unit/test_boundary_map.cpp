#include "generators.hpp"

#include "minext/boundary_map.hpp"
#include "minext/errors.hpp"

#include <doctest.h>

using namespace minext;

namespace {

Point P(long x, long y) { return {Rational(x), Rational(y)}; }

const std::vector<Point> kSquare{P(0, 0), P(1, 0), P(1, 1), P(0, 1)};

BoundaryMap square_map(const gen::Affine& a) {
    std::vector<std::vector<Breakpoint>> pieces;
    for (std::size_t e = 0; e < 4; ++e) pieces.push_back({{Rational(0), a(kSquare[e])}, {Rational(1), a(kSquare[(e + 1) % 4])}});
    return BoundaryMap::closed(kSquare, pieces);
}

const gen::Affine kIdentity{Rational(1), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};

} // namespace

TEST_CASE("eval") {
    const auto id = square_map(kIdentity);
    CHECK(id.eval({0, Rational(1, 2)}) == Point{Rational(1, 2), Rational(0)});
    const gen::Affine doubling{Rational(2), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
    CHECK(square_map(doubling).eval({0, Rational(1, 4)}) == Point{Rational(1, 2), Rational(0)});
    CHECK(id.eval({2, Rational(0)}) == P(1, 1));
    CHECK(id.eval({1, Rational(1)}) == id.eval({2, Rational(0)}));
    CHECK_THROWS_AS(id.eval({7, Rational(0)}), Error);
    CHECK(id.eval_at({Rational(1, 3), Rational(1)}) == Point{Rational(1, 3), Rational(1)});
    CHECK_THROWS_WITH_AS(id.eval_at({Rational(1, 3), Rational(1, 3)}), doctest::Contains("NotOnSkeleton"), Error);
}

TEST_CASE("validate_injective") {
    auto img = validate_injective(square_map(kIdentity));
    CHECK_FALSE(img.reversed);
    CHECK(img.polygon.vertices() == kSquare);
    CHECK(img.correspondence.size() == 4);

    const gen::Affine stretch{Rational(2), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
    CHECK(validate_injective(square_map(stretch)).polygon.area() == 2);

    const gen::Affine mirror{Rational(-1), Rational(0), Rational(0), Rational(1), Rational(0), Rational(0)};
    CHECK(validate_injective(square_map(mirror)).reversed);

    std::vector<std::vector<Breakpoint>> bow{{{Rational(0), P(0, 0)}, {Rational(1), P(1, 1)}},
                                             {{Rational(0), P(1, 1)}, {Rational(1), P(1, 0)}},
                                             {{Rational(0), P(1, 0)}, {Rational(1), P(0, 1)}},
                                             {{Rational(0), P(0, 1)}, {Rational(1), P(0, 0)}}};
    CHECK_THROWS_WITH_AS(validate_injective(BoundaryMap::closed(kSquare, bow)), doctest::Contains("NotInjective"), Error);
}

TEST_CASE("insert_breakpoints never changes values") {
    gen::Rng rng(3);
    const auto a = gen::affine(rng);
    const auto phi = gen::perturbed_affine_map(rng, kSquare, a, 2, 0.05);
    std::vector<SkeletonPoint> ins{{0, Rational(1, 2)}, {1, Rational(1, 5)}, {1, Rational(2, 5)}, {3, Rational(1, 3)}};
    const auto refined = phi.insert_breakpoints(ins);
    for (int i = 0; i < 1000; ++i) {
        SkeletonPoint p{static_cast<std::size_t>(i % 4), gen::dyadic(rng, 0, 1, 16)};
        CHECK(refined.eval(p) == phi.eval(p));
    }
    // Existing breakpoint: unchanged list.
    const auto same = phi.insert_breakpoints(std::vector<SkeletonPoint>{{0, Rational(1, 3)}});
    CHECK(same.breakpoints(0).size() == phi.breakpoints(0).size());
    const auto id = square_map(kIdentity).insert_breakpoints(ins);
    CHECK(id.breakpoints(1).size() == 4);
}

TEST_CASE("eval is continuous across breakpoints") {
    gen::Rng rng(4);
    const auto phi = gen::perturbed_affine_map(rng, kSquare, gen::affine(rng), 3, 0.05);
    for (std::size_t e = 0; e < 4; ++e) {
        const auto& bp = phi.breakpoints(e);
        for (std::size_t k = 1; k + 1 < bp.size(); ++k) {
            const Rational eps(1, mpz_class("1000000000000"));
            const Point l = phi.eval({e, bp[k].t - eps}), r = phi.eval({e, bp[k].t + eps});
            CHECK(dist2(l, bp[k].image) < Rational(1, 1000000));
            CHECK(dist2(r, bp[k].image) < Rational(1, 1000000));
        }
        CHECK(phi.eval({e, Rational(1)}) == phi.eval({(e + 1) % 4, Rational(0)}));
    }
}

TEST_CASE("restrict") {
    const auto id = square_map(kIdentity);
    const std::vector<std::size_t> bottom{0};
    const auto r = id.restrict(bottom);
    CHECK_FALSE(r.is_closed());
    CHECK(r.eval({0, Rational(1, 4)}) == Point{Rational(1, 4), Rational(0)});
    const auto single = id.restrict(P(1, 0), P(1, 0));
    CHECK(single.eval({0, Rational(1, 2)}) == P(1, 0));
    const auto piece = id.insert_breakpoints(std::vector<SkeletonPoint>{{0, Rational(1, 2)}})
                           .restrict(Point{Rational(3, 4), Rational(0)}, Point{Rational(1, 4), Rational(0)});
    REQUIRE(piece.breakpoints(0).size() == 3);
    CHECK(piece.breakpoints(0)[1].t == Rational(1, 2));
    CHECK(piece.eval({0, Rational(1)}) == Point{Rational(1, 4), Rational(0)});
    const std::vector<std::size_t> bad{9};
    CHECK_THROWS_WITH_AS(id.restrict(bad), doctest::Contains("NotSubSkeleton"), Error);
    CHECK_THROWS_AS(id.restrict(P(0, 0), P(1, 1)), Error);
}

TEST_CASE("from_loop round trip and image length") {
    gen::Rng rng(9);
    const auto phi = gen::perturbed_affine_map(rng, kSquare, gen::affine(rng), 2, 0.05);
    const auto loop = phi.loop();
    const auto back = BoundaryMap::from_loop(loop);
    CHECK(back.loop() == loop);
    double sum = 0;
    for (std::size_t k = 0; k < loop.size(); ++k) sum += length(loop[k].img, loop[(k + 1) % loop.size()].img);
    CHECK(phi.image_length() == doctest::Approx(sum));
    CHECK(validate_injective(phi).polygon.perimeter() == doctest::Approx(sum));
}
