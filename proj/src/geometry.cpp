#include "minext/geometry.hpp"

#include "minext/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace minext {

int orient(const Point& p, const Point& q, const Point& r) {
    const double ax = p.x.get_d(), ay = p.y.get_d();
    const double bx = q.x.get_d(), by = q.y.get_d();
    const double cx = r.x.get_d(), cy = r.y.get_d();
    const double det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    const double scale = (std::fabs(bx) + std::fabs(ax)) * (std::fabs(cy) + std::fabs(ay)) +
                         (std::fabs(by) + std::fabs(ay)) * (std::fabs(cx) + std::fabs(ax));
    if (std::fabs(det) > 1e-14 * scale) return det > 0 ? 1 : -1;
    return sgn(cross(q - p, r - p));
}

bool on_segment(const Point& p, const Point& a, const Point& b) {
    if (orient(a, b, p) != 0) return false;
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool strictly_inside_segment(const Point& p, const Point& a, const Point& b) {
    return a != b && p != a && p != b && on_segment(p, a, b);
}

namespace {

// Projection onto the dominant axis of a collinear configuration.
const Rational& key(const Point& p, bool use_x) { return use_x ? p.x : p.y; }

} // namespace

SegmentContact segment_contact(const Point& a, const Point& b, const Point& c, const Point& d) {
    if (a == b) return on_segment(a, c, d) ? SegmentContact::Touch : SegmentContact::None;
    if (c == d) return on_segment(c, a, b) ? SegmentContact::Touch : SegmentContact::None;
    const int o1 = orient(a, b, c), o2 = orient(a, b, d);
    if (o1 == 0 && o2 == 0) {
        const bool use_x = a.x != b.x;
        Rational lo1 = std::min(key(a, use_x), key(b, use_x)), hi1 = std::max(key(a, use_x), key(b, use_x));
        Rational lo2 = std::min(key(c, use_x), key(d, use_x)), hi2 = std::max(key(c, use_x), key(d, use_x));
        Rational lo = std::max(lo1, lo2), hi = std::min(hi1, hi2);
        if (lo < hi) return SegmentContact::Overlap;
        if (lo == hi) return SegmentContact::Touch;
        return SegmentContact::None;
    }
    if (o1 * o2 > 0) return SegmentContact::None;
    const int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o3 * o4 > 0) return SegmentContact::None;
    if (o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) return SegmentContact::Proper;
    return SegmentContact::Touch;
}

Rational line_param(const Point& a, const Point& b, const Point& c, const Point& d) {
    const Point dc = d - c;
    return cross(c - a, dc) / cross(b - a, dc);
}

Rational signed_area2(std::span<const Point> pts) {
    Rational s = 0;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) s += cross(pts[i], pts[(i + 1) % n]);
    return s;
}

Location locate(std::span<const Point> polygon, const Point& p) {
    const std::size_t n = polygon.size();
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& u = polygon[i];
        const Point& v = polygon[(i + 1) % n];
        if (on_segment(p, u, v)) return Location::Boundary;
        if (u.y <= p.y) {
            if (v.y > p.y && orient(u, v, p) > 0) ++winding;
        } else if (v.y <= p.y && orient(u, v, p) < 0) {
            --winding;
        }
    }
    return winding != 0 ? Location::Inside : Location::Outside;
}

Box Box::of(const Point& a, const Point& b) {
    const double ax = a.x.get_d(), ay = a.y.get_d(), bx = b.x.get_d(), by = b.y.get_d();
    auto lo = [](double u, double v) {
        double m = std::min(u, v);
        return m - 1e-12 * std::fabs(m) - 1e-290;
    };
    auto hi = [](double u, double v) {
        double m = std::max(u, v);
        return m + 1e-12 * std::fabs(m) + 1e-290;
    };
    return {lo(ax, bx), lo(ay, by), hi(ax, bx), hi(ay, by)};
}

Direction Direction::from_unit(Rational c, Rational s, double requested_alpha) {
    if (c * c + s * s != 1) fail(ErrorKind::Validation, "direction is not a unit vector");
    Direction d;
    d.c_ = std::move(c);
    d.s_ = std::move(s);
    d.requested_ = requested_alpha;
    return d;
}

Direction Direction::snapped(double alpha, long max_den) {
    if (!std::isfinite(alpha)) fail(ErrorKind::Validation, "alpha must be finite");
    const double quarter = std::numbers::pi / 2;
    const double k = std::round(alpha / quarter);
    const double residual = alpha - k * quarter;
    const Rational m = best_rational(std::tan(residual / 2), max_den);
    const Rational m2 = m * m;
    Rational c = (1 - m2) / (1 + m2), s = 2 * m / (1 + m2);
    long turns = static_cast<long>(k) % 4;
    if (turns < 0) turns += 4;
    for (long i = 0; i < turns; ++i) {
        Rational nc = -s;
        s = c;
        c = nc;
    }
    return from_unit(std::move(c), std::move(s), alpha);
}

double Direction::alpha() const {
    double a = std::atan2(s_.get_d(), c_.get_d());
    if (a < 0) a += 2 * std::numbers::pi;
    return a;
}

PolygonReport validate_polygon(std::span<const Point> input) {
    const std::size_t n = input.size();
    if (n < 3) fail(ErrorKind::Degenerate, "polygon needs at least 3 vertices");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (input[i] == input[j]) fail(ErrorKind::Degenerate, "repeated vertex " + std::to_string(i));
    if (std::all_of(input.begin() + 2, input.end(), [&](const Point& p) { return orient(input[0], input[1], p) == 0; }))
        fail(ErrorKind::Degenerate, "all vertices collinear");

    std::vector<Box> boxes(n);
    for (std::size_t i = 0; i < n; ++i) boxes[i] = Box::of(input[i], input[(i + 1) % n]);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!boxes[i].overlaps(boxes[j])) continue;
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            const auto contact = segment_contact(input[i], input[(i + 1) % n], input[j], input[(j + 1) % n]);
            if (contact == SegmentContact::None) continue;
            if (adjacent && contact == SegmentContact::Touch) continue;
            fail(ErrorKind::SelfIntersecting,
                 "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
    }
    PolygonReport rep;
    Rational a2 = signed_area2(input);
    if (a2 == 0) fail(ErrorKind::Degenerate, "zero area");
    rep.was_clockwise = a2 < 0;
    rep.area = abs(a2) / 2;
    rep.convex = true;
    // Reflex indices refer to the counterclockwise ordering.
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = rep.was_clockwise ? n - 1 - k : k;
        const Point& prev = input[(i + n - 1) % n];
        const Point& next = input[(i + 1) % n];
        const int turn = rep.was_clockwise ? orient(next, input[i], prev) : orient(prev, input[i], next);
        if (turn < 0) {
            rep.convex = false;
            rep.reflex.push_back(k);
        }
    }
    return rep;
}

namespace {

std::vector<Point> counterclockwise(std::vector<Point> v, const PolygonReport& rep) {
    if (rep.was_clockwise) std::reverse(v.begin(), v.end());
    return v;
}

double loop_length(const std::vector<Point>& v) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i) s += length(v[i], v[(i + 1) % v.size()]);
    return s;
}

} // namespace

SimplePolygon::SimplePolygon(std::vector<Point> vertices) {
    const auto rep = validate_polygon(vertices);
    v_ = counterclockwise(std::move(vertices), rep);
}

SimplePolygon SimplePolygon::trusted(std::vector<Point> ccw_vertices) {
    SimplePolygon p;
    p.v_ = std::move(ccw_vertices);
    return p;
}

std::vector<std::size_t> SimplePolygon::reflex_vertices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < v_.size(); ++i)
        if (orient(prev(i), v_[i], next(i)) < 0) out.push_back(i);
    return out;
}

double SimplePolygon::perimeter() const { return loop_length(v_); }

ConvexPolygon::ConvexPolygon(std::vector<Point> vertices) {
    const auto rep = validate_polygon(vertices);
    if (!rep.convex) fail(ErrorKind::Validation, "polygon is not convex");
    v_ = drop_collinear(counterclockwise(std::move(vertices), rep));
}

double ConvexPolygon::perimeter() const { return loop_length(v_); }

std::vector<Point> drop_collinear(std::span<const Point> loop) {
    std::vector<Point> v(loop.begin(), loop.end());
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
            const Point& prev = v[(i + v.size() - 1) % v.size()];
            const Point& next = v[(i + 1) % v.size()];
            if (v[i] == next || strictly_inside_segment(v[i], prev, next)) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return v;
}

BoundingFrame frame(const ConvexPolygon& q, const Direction& dir) {
    BoundingFrame f;
    bool first = true;
    for (const auto& p : q.vertices()) {
        const Point r = dir.to_frame(p);
        if (first) {
            f.a_minus = f.a_plus = r.x;
            f.b_minus = f.b_plus = r.y;
            first = false;
            continue;
        }
        if (r.x < f.a_minus) f.a_minus = r.x;
        if (r.x > f.a_plus) f.a_plus = r.x;
        if (r.y < f.b_minus) f.b_minus = r.y;
        if (r.y > f.b_plus) f.b_plus = r.y;
    }
    return f;
}

namespace {

Rational level(const Direction& dir, Axis axis, const Point& p) {
    return axis == Axis::Parallel ? dot(p, dir.e_perp()) : dot(p, dir.e_alpha());
}

Rational transverse(const Direction& dir, Axis axis, const Point& p) {
    return axis == Axis::Parallel ? dot(p, dir.e_alpha()) : dot(p, dir.e_perp());
}

void require_interior(const ConvexPolygon& q, const Direction& dir, Axis axis, const Rational& value) {
    const auto f = frame(q, dir);
    const Rational& lo = axis == Axis::Parallel ? f.b_minus : f.a_minus;
    const Rational& hi = axis == Axis::Parallel ? f.b_plus : f.a_plus;
    if (!(lo < value && value < hi))
        fail(ErrorKind::OutOfRange, "value " + to_string(value) + " outside open extent (" + to_string(lo) + ", " +
                                        to_string(hi) + ")");
}

// Sutherland-Hodgman against {h >= 0} for a convex loop.
std::vector<Point> clip_by(std::span<const Point> poly, const std::function<Rational(const Point&)>& h) {
    std::vector<Point> out;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& u = poly[i];
        const Point& v = poly[(i + 1) % n];
        const Rational hu = h(u), hv = h(v);
        if (sgn(hu) >= 0) out.push_back(u);
        if ((sgn(hu) > 0 && sgn(hv) < 0) || (sgn(hu) < 0 && sgn(hv) > 0)) out.push_back(lerp(u, v, hu / (hu - hv)));
    }
    std::vector<Point> dedup;
    for (auto& p : out)
        if (dedup.empty() || dedup.back() != p) dedup.push_back(std::move(p));
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    return dedup;
}

} // namespace

std::pair<Point, Point> chord(const ConvexPolygon& q, const Direction& dir, Axis axis, const Rational& value) {
    require_interior(q, dir, axis, value);
    std::vector<Point> hits;
    const auto& v = q.vertices();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point& a = v[i];
        const Point& b = q.next(i);
        const Rational fa = level(dir, axis, a) - value, fb = level(dir, axis, b) - value;
        if (sgn(fa) == 0) {
            hits.push_back(a);
        } else if (sgn(fa) * sgn(fb) < 0) {
            hits.push_back(lerp(a, b, fa / (fa - fb)));
        }
    }
    std::sort(hits.begin(), hits.end(), PointLess{});
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    if (hits.size() != 2) fail(ErrorKind::Internal, "chord of convex polygon does not have two endpoints");
    if (transverse(dir, axis, hits[0]) > transverse(dir, axis, hits[1])) std::swap(hits[0], hits[1]);
    return {hits[0], hits[1]};
}

ConvexPolygon clip_below(const ConvexPolygon& q, const Direction& dir, const Rational& value) {
    require_interior(q, dir, Axis::Parallel, value);
    auto pts = clip_by(q.vertices(), [&](const Point& p) -> Rational { return value - level(dir, Axis::Parallel, p); });
    return ConvexPolygon(std::move(pts));
}

ConvexPolygon clip_above(const ConvexPolygon& q, const Direction& dir, const Rational& value) {
    require_interior(q, dir, Axis::Parallel, value);
    auto pts = clip_by(q.vertices(), [&](const Point& p) -> Rational { return level(dir, Axis::Parallel, p) - value; });
    return ConvexPolygon(std::move(pts));
}

std::vector<Point> clip_halfplane(std::span<const Point> convex, const Point& a, const Point& b) {
    const Point d = b - a;
    return clip_by(convex, [&](const Point& p) -> Rational { return cross(d, p - a); });
}

double length(const Point& a, const Point& b) { return std::sqrt(dist2(a, b).get_d()); }

} // namespace minext
