#include "minext/psi.hpp"

#include "minext/errors.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

namespace minext {

namespace {

constexpr mpfr_prec_t kPrec = 200;
constexpr int kMaxDepth = 60;

class Mpfr {
public:
    Mpfr() { mpfr_init2(v_, kPrec); mpfr_set_zero(v_, 1); }
    explicit Mpfr(const Rational& q) { mpfr_init2(v_, kPrec); mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN); }
    ~Mpfr() { mpfr_clear(v_); }
    Mpfr(const Mpfr& o) { mpfr_init2(v_, kPrec); mpfr_set(v_, o.v_, MPFR_RNDN); }
    Mpfr& operator=(const Mpfr& o) { mpfr_set(v_, o.v_, MPFR_RNDN); return *this; }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

private:
    mpfr_t v_;
};

/// Antiderivative of sqrt(c u^2 + k) for c > 0, k >= 0.
Mpfr antiderivative(const Mpfr& c, const Mpfr& k, const Mpfr& sqrt_c, bool k_zero, const Rational& u_exact) {
    Mpfr u(u_exact), out, t, s;
    if (k_zero) {
        mpfr_abs(t.get(), u.get(), MPFR_RNDN);
        mpfr_mul(out.get(), u.get(), t.get(), MPFR_RNDN);
        mpfr_mul(out.get(), out.get(), sqrt_c.get(), MPFR_RNDN);
        mpfr_div_ui(out.get(), out.get(), 2, MPFR_RNDN);
        return out;
    }
    // (u/2) sqrt(c u^2 + k)
    mpfr_sqr(t.get(), u.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), c.get(), MPFR_RNDN);
    mpfr_add(t.get(), t.get(), k.get(), MPFR_RNDN);
    mpfr_sqrt(t.get(), t.get(), MPFR_RNDN);
    mpfr_mul(out.get(), t.get(), u.get(), MPFR_RNDN);
    mpfr_div_ui(out.get(), out.get(), 2, MPFR_RNDN);
    // k / (2 sqrt c) * asinh(u sqrt(c / k))
    mpfr_sqrt(s.get(), k.get(), MPFR_RNDN);
    mpfr_mul(t.get(), u.get(), sqrt_c.get(), MPFR_RNDN);
    mpfr_div(t.get(), t.get(), s.get(), MPFR_RNDN);
    mpfr_asinh(t.get(), t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), k.get(), MPFR_RNDN);
    mpfr_div(t.get(), t.get(), sqrt_c.get(), MPFR_RNDN);
    mpfr_div_ui(t.get(), t.get(), 2, MPFR_RNDN);
    mpfr_add(out.get(), out.get(), t.get(), MPFR_RNDN);
    return out;
}

/// Affine point-valued function p0 + t d.
struct Moving {
    Point p0;
    Point d;
    Point at(const Rational& t) const { return p0 + t * d; }
};

/// Coefficients of c2 t^2 + c1 t + c0.
struct Quadratic {
    Rational c2, c1, c0;
    Rational at(const Rational& t) const { return (c2 * t + c1) * t + c0; }
    bool zero() const { return c2 == 0 && c1 == 0 && c0 == 0; }
};

Quadratic cross_q(const Moving& u, const Moving& w) {
    return {cross(u.d, w.d), cross(u.p0, w.d) + cross(u.d, w.p0), cross(u.p0, w.p0)};
}
Quadratic dot_q(const Moving& u, const Moving& w) {
    return {dot(u.d, w.d), dot(u.p0, w.d) + dot(u.d, w.p0), dot(u.p0, w.p0)};
}

Moving minus(const Moving& u, const Moving& w) { return {u.p0 - w.p0, u.d - w.d}; }
Moving fixed(const Point& p) { return {p, {0, 0}}; }

/// A root of f in the open interval (lo, hi): exact when rational, approximate otherwise.
struct Root {
    std::optional<Rational> exact;
    double approx = 0.0;
};

std::vector<Root> roots_in(const Quadratic& f, const Rational& lo, const Rational& hi) {
    std::vector<Root> out;
    auto keep = [&](const Rational& r) {
        if (r > lo && r < hi) out.push_back({r, r.get_d()});
    };
    if (f.c2 == 0) {
        if (f.c1 != 0) keep(Rational(-f.c0 / f.c1));
        return out;
    }
    const Rational disc = f.c1 * f.c1 - 4 * f.c2 * f.c0;
    if (disc < 0) return out;
    Rational root;
    if (is_perfect_square(disc, &root)) {
        keep(Rational((-f.c1 - root) / (2 * f.c2)));
        if (disc != 0) keep(Rational((-f.c1 + root) / (2 * f.c2)));
        return out;
    }
    // Irrational roots: enclose and keep unless separated from (lo, hi).
    const Interval s = Interval::sqrt_of(disc);
    const Interval b = Interval::of(Rational(-f.c1));
    const Interval den = Interval::of(Rational(2 * f.c2));
    for (const Interval& num : {b - s, b + s}) {
        // num / den with den of fixed sign
        double q1 = num.lo / den.lo, q2 = num.lo / den.hi, q3 = num.hi / den.lo, q4 = num.hi / den.hi;
        Interval r{down(std::min({q1, q2, q3, q4})), up(std::max({q1, q2, q3, q4}))};
        if (r.hi < down(lo.get_d()) || r.lo > up(hi.get_d())) continue;
        out.push_back({std::nullopt, r.mid()});
    }
    return out;
}

/// True when some root of f in (lo, hi) has g/h in the open unit interval (possibly, for inexact roots).
bool enters(const Quadratic& f, const Quadratic& g, const Quadratic& h, const Rational& lo, const Rational& hi) {
    if (f.zero()) return false;
    for (const Root& r : roots_in(f, lo, hi)) {
        if (r.exact) {
            const Rational gv = g.at(*r.exact), hv = h.at(*r.exact);
            if (hv == 0) continue;
            if (gv > 0 && gv < hv) return true;
        } else {
            const double t = r.approx;
            const double gv = (g.c2.get_d() * t + g.c1.get_d()) * t + g.c0.get_d();
            const double hv = (h.c2.get_d() * t + h.c1.get_d()) * t + h.c0.get_d();
            if (hv <= 0) return true;
            const double ratio = gv / hv;
            if (ratio > -1e-9 && ratio < 1 + 1e-9) return true;
        }
    }
    return false;
}

/// Does a polygon vertex pass through the open segment from `from(t)` to `to(t)` for t in (lo, hi)?
bool sweeps_vertex(const SimplePolygon& poly, const Moving& from, const Moving& to, const Rational& lo,
                   const Rational& hi) {
    const Moving dir = minus(to, from);
    const Quadratic h = dot_q(dir, dir);
    for (const Point& v : poly.vertices()) {
        if (from.d == Point{0, 0} && from.p0 == v) continue;
        if (to.d == Point{0, 0} && to.p0 == v) continue;
        const Moving rel = minus(fixed(v), from);
        if (enters(cross_q(dir, rel), dot_q(rel, dir), h, lo, hi)) return true;
    }
    return false;
}

int sign_of(const Rational& q) { return sgn(q); }

/// Turn at X strictly nonzero with constant sign over the closed interval.
bool taut(const Quadratic& turn, const Rational& lo, const Rational& hi) {
    const int sa = sign_of(turn.at(lo)), sb = sign_of(turn.at(hi));
    if (sa == 0 || sa != sb) return false;
    if (turn.c2 != 0) {
        const Rational vertex = -turn.c1 / (2 * turn.c2);
        if (vertex > lo && vertex < hi && sign_of(turn.at(vertex)) != sa) return false;
    }
    return true;
}

struct Bent {
    std::vector<std::size_t> indices;
    std::vector<Point> points;
};

Bent bends(const Geodesic& g) {
    Bent out;
    for (std::size_t j = 1; j + 1 < g.path.size(); ++j) {
        if (orient(g.path[j - 1], g.path[j], g.path[j + 1]) != 0) {
            out.indices.push_back(g.vertices[j - 1]);
            out.points.push_back(g.path[j]);
        }
    }
    return out;
}

Certified enclosed(const LengthExpr& e) {
    const Interval i = e.enclosure();
    return {i.mid(), i.width() / 2 + std::abs(i.mid()) * 0x1p-52};
}

void accumulate(Certified& acc, const Certified& part) {
    acc.value += part.value;
    acc.error += part.error + std::abs(acc.value) * 0x1p-52;
}

struct SliceIntegrator {
    const PolygonGeodesics& geo;
    Moving a, b;
    double lipschitz;
    Rational min_width;
    std::size_t* pieces;
    std::size_t* fallbacks;

    Geodesic at(const Rational& t) const { return geo.shortest_path(a.at(t), b.at(t)); }

    // The candidate path is the geodesic at the midpoint; a vertex crossing in (lo, hi) is the only way to lose it.
    std::optional<Certified> closed_form(const Rational& lo, const Rational& hi, const Geodesic& g_lo,
                                         const Geodesic& g_mid, const Geodesic& g_hi) const {
        const Bent bl = bends(g_lo), bm = bends(g_mid), bh = bends(g_hi);
        if (bl.indices != bh.indices || bl.indices != bm.indices) return std::nullopt;
        const SimplePolygon& poly = geo.polygon();
        const auto& xs = bl.points;
        if (xs.empty()) {
            if (sweeps_vertex(poly, a, b, lo, hi)) return std::nullopt;
            return integrate_norm(b.p0 - a.p0, b.d - a.d, lo, hi);
        }
        const Moving first = fixed(xs.front()), last = fixed(xs.back());
        if (sweeps_vertex(poly, a, first, lo, hi) || sweeps_vertex(poly, last, b, lo, hi)) return std::nullopt;
        if (xs.size() == 1) {
            if (!taut(cross_q(minus(first, a), minus(b, first)), lo, hi)) return std::nullopt;
        } else {
            const Moving second = fixed(xs[1]), before_last = fixed(xs[xs.size() - 2]);
            if (!taut(cross_q(minus(first, a), minus(second, first)), lo, hi)) return std::nullopt;
            if (!taut(cross_q(minus(last, before_last), minus(b, last)), lo, hi)) return std::nullopt;
        }
        Certified out = integrate_norm(a.p0 - xs.front(), a.d, lo, hi);
        accumulate(out, integrate_norm(b.p0 - xs.back(), b.d, lo, hi));
        if (xs.size() > 1) {
            LengthExpr middle;
            for (std::size_t j = 0; j + 1 < xs.size(); ++j) middle.squares.push_back(dist2(xs[j], xs[j + 1]));
            Certified m = enclosed(middle);
            const double w = Rational(hi - lo).get_d();
            accumulate(out, {m.value * w, m.error * w + std::abs(m.value * w) * 0x1p-51});
        }
        return out;
    }

    Certified integrate(const Rational& lo, const Rational& hi, const Geodesic& g_lo, const Geodesic& g_hi,
                        int depth) const {
        const Rational mid = (lo + hi) / 2;
        const Geodesic g_mid = at(mid);
        if (auto c = closed_form(lo, hi, g_lo, g_mid, g_hi)) {
            ++*pieces;
            return *c;
        }
        const Rational w = hi - lo;
        if (depth >= kMaxDepth || w <= min_width) {
            ++*fallbacks;
            const Certified fa = enclosed(g_lo.length), fb = enclosed(g_hi.length);
            const double wd = w.get_d();
            return {wd * (fa.value + fb.value) / 2,
                    wd * (fa.error + fb.error) / 2 + lipschitz * wd * wd / 4 + wd * (fa.value + fb.value) * 0x1p-50};
        }
        Certified out = integrate(lo, mid, g_lo, g_mid, depth + 1);
        accumulate(out, integrate(mid, hi, g_mid, g_hi, depth + 1));
        return out;
    }
};

Rational coordinate(const Direction& dir, Axis axis, const Point& p) {
    const Point f = dir.to_frame(p);
    return axis == Axis::Parallel ? f.y : f.x;
}

Certified slice_integral(const ConvexPolygon& q, const Direction& dir, const BoundaryMap& phi,
                         const PolygonGeodesics& geo, Axis axis, std::size_t& pieces, std::size_t& fallbacks) {
    std::set<Rational> levels;
    for (const Node& n : phi.loop()) levels.insert(coordinate(dir, axis, n.pre));
    for (const Point& v : q.vertices()) levels.insert(coordinate(dir, axis, v));
    const std::vector<Rational> ev(levels.begin(), levels.end());
    const Rational range = ev.back() - ev.front();
    const Rational min_width = range / Rational(mpz_class(1) << 40);

    Certified total;
    for (std::size_t i = 0; i + 1 < ev.size(); ++i) {
        const Rational& lo = ev[i];
        const Rational& hi = ev[i + 1];
        const Rational w = hi - lo;
        const Rational t1 = lo + w / 3, t2 = lo + 2 * w / 3;
        const auto [h1a, h2a] = chord(q, dir, axis, t1);
        const auto [h1b, h2b] = chord(q, dir, axis, t2);
        const Point ia = phi.eval_at(h1a), ib = phi.eval_at(h1b);
        const Point ja = phi.eval_at(h2a), jb = phi.eval_at(h2b);
        const Rational inv = 1 / (t2 - t1);
        Moving a{{}, inv * (ib - ia)};
        a.p0 = ia - t1 * a.d;
        Moving b{{}, inv * (jb - ja)};
        b.p0 = ja - t1 * b.d;
        const double lip = (norm(approx(a.d)) + norm(approx(b.d))) * (1 + 1e-12);
        SliceIntegrator integ{geo, a, b, lip, min_width, &pieces, &fallbacks};
        accumulate(total, integ.integrate(lo, hi, integ.at(lo), integ.at(hi), 0));
    }
    return total;
}

} // namespace

LengthExpr rho(const SimplePolygon& polygon, const Point& a, const Point& b) {
    return shortest_path(polygon, a, b).length;
}

Certified integrate_norm(const Point& p, const Point& q, const Rational& lo, const Rational& hi) {
    const Rational c = dot(q, q);
    if (c == 0) {
        const Interval n = Interval::sqrt_of(dot(p, p)) * Interval::of(Rational(hi - lo));
        return {n.mid(), n.width() / 2 + std::abs(n.mid()) * 0x1p-52};
    }
    const Rational m = dot(p, q) / c;
    const Rational cr = cross(p, q);
    const Rational k = cr * cr / c;
    Mpfr cm(c), km(k), sqrt_c;
    mpfr_sqrt(sqrt_c.get(), cm.get(), MPFR_RNDN);
    const Mpfr fb = antiderivative(cm, km, sqrt_c, k == 0, Rational(hi + m));
    const Mpfr fa = antiderivative(cm, km, sqrt_c, k == 0, Rational(lo + m));
    Mpfr diff;
    mpfr_sub(diff.get(), fb.get(), fa.get(), MPFR_RNDN);
    const double value = diff.to_double();
    const double scale = std::abs(fa.to_double()) + std::abs(fb.to_double());
    return {value, scale * 0x1p-180 + std::abs(value) * 0x1p-52};
}

PsiBreakdown psi_alpha(const ConvexPolygon& q, const Direction& dir, const BoundaryMap& phi, double tol) {
    if (!(tol > 0)) fail(ErrorKind::Validation, "tolerance must be positive");
    const ImagePolygon image = validate_injective(phi);
    const PolygonGeodesics geo(image.polygon);
    PsiBreakdown out;
    out.horizontal = slice_integral(q, dir, phi, geo, Axis::Parallel, out.pieces, out.fallbacks);
    out.vertical = slice_integral(q, dir, phi, geo, Axis::Perpendicular, out.pieces, out.fallbacks);
    if (out.error_bound() > tol) {
        fail(ErrorKind::ToleranceUnreachable,
             "certified error " + std::to_string(out.error_bound()) + " exceeds " + std::to_string(tol));
    }
    return out;
}

PsiBreakdown psi_alpha(const Loop& loop, const Direction& dir, double tol) {
    std::vector<Point> pre;
    for (const Node& n : loop) pre.push_back(n.pre);
    return psi_alpha(ConvexPolygon(drop_collinear(pre)), dir, BoundaryMap::from_loop(loop), tol);
}

MeshVariation mesh_variation(const AffineMesh& mesh, const Direction& dir) {
    MeshVariation out;
    out.along.direction = dir.e_alpha();
    out.across.direction = dir.e_perp();
    for (const Triangle& t : mesh.triangles) {
        const Node& a = mesh.vertices.at(t[0]);
        const Node& b = mesh.vertices.at(t[1]);
        const Node& c = mesh.vertices.at(t[2]);
        const Rational area2 = cross(b.pre - a.pre, c.pre - a.pre);
        if (area2 <= 0) fail(ErrorKind::InvalidMesh, "non-positive preimage triangle");
        const Jacobian j = jacobian(a, b, c);
        const Interval area = Interval::of(Rational(area2 / 2));
        const Point ja = j.apply(dir.e_alpha()), jp = j.apply(dir.e_perp());
        out.along.value += area * Interval::sqrt_of(dot(ja, ja));
        out.across.value += area * Interval::sqrt_of(dot(jp, jp));
    }
    out.manhattan = out.along.value + out.across.value;
    return out;
}

} // namespace minext
