#pragma once

#include "minext/rational.hpp"

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace minext {

struct Point {
    Rational x;
    Rational y;

    friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(const Rational& k, const Point& a) { return {k * a.x, k * a.y}; }
    friend bool operator==(const Point& a, const Point& b) { return a.x == b.x && a.y == b.y; }
    friend bool operator!=(const Point& a, const Point& b) { return !(a == b); }
};

/// Lexicographic (x, then y); used for exact vertex deduplication.
struct PointLess {
    bool operator()(const Point& a, const Point& b) const {
        int c = cmp(a.x, b.x);
        return c != 0 ? c < 0 : a.y < b.y;
    }
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 approx(const Point& p) { return {p.x.get_d(), p.y.get_d()}; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

inline Rational cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline Rational dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline Rational dist2(const Point& a, const Point& b) {
    Rational dx = a.x - b.x, dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline Point lerp(const Point& a, const Point& b, const Rational& t) {
    return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}
inline Point midpoint(const Point& a, const Point& b) { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }

/// Sign of (q-p) x (r-p). Floating-point filter, exact fallback.
int orient(const Point& p, const Point& q, const Point& r);

/// p on the closed segment [a,b].
bool on_segment(const Point& p, const Point& a, const Point& b);
/// p on the open segment (a,b); false when a == b.
bool strictly_inside_segment(const Point& p, const Point& a, const Point& b);

enum class SegmentContact { None, Proper, Touch, Overlap };

/// Classifies the intersection of closed segments [a,b] and [c,d].
/// Proper: single point interior to both. Touch: single point that is an endpoint of one.
/// Overlap: collinear with a shared sub-segment of positive length.
SegmentContact segment_contact(const Point& a, const Point& b, const Point& c, const Point& d);

/// Intersection point of non-parallel lines ab and cd, as parameter along ab.
Rational line_param(const Point& a, const Point& b, const Point& c, const Point& d);

/// Twice the signed area.
Rational signed_area2(std::span<const Point> pts);

enum class Location { Outside, Boundary, Inside };
Location locate(std::span<const Point> polygon, const Point& p);

struct Box {
    double xlo, ylo, xhi, yhi;
    static Box of(const Point& a, const Point& b);
    bool overlaps(const Box& o) const {
        return xlo <= o.xhi && o.xlo <= xhi && ylo <= o.yhi && o.ylo <= yhi;
    }
};

/// Rotation by a rational unit vector (c, s), c^2 + s^2 = 1 exactly.
class Direction {
public:
    Direction() = default;
    /// Snaps alpha to a rational rotation using denominators up to max_den for tan(alpha/2).
    static Direction snapped(double alpha, long max_den = 10000);
    static Direction from_unit(Rational c, Rational s, double requested_alpha);

    double requested_alpha() const { return requested_; }
    double alpha() const;
    const Rational& cos() const { return c_; }
    const Rational& sin() const { return s_; }
    Point e_alpha() const { return {c_, s_}; }
    Point e_perp() const { return {-s_, c_}; }

    /// Coordinates in the frame (e_alpha, e_perp).
    Point to_frame(const Point& p) const { return {c_ * p.x + s_ * p.y, c_ * p.y - s_ * p.x}; }
    Point from_frame(const Point& q) const { return {c_ * q.x - s_ * q.y, s_ * q.x + c_ * q.y}; }
    bool is_identity() const { return c_ == 1 && s_ == 0; }

private:
    Rational c_{1};
    Rational s_{0};
    double requested_ = 0.0;
};

struct PolygonReport {
    bool convex = false;
    Rational area;  // positive after normalization to counterclockwise
    bool was_clockwise = false;
    std::vector<std::size_t> reflex;  // indices (counterclockwise order) with interior angle > pi
};

/// Checks simplicity and reports convexity/area/reflex vertices for the counterclockwise version.
/// Throws SelfIntersecting or Degenerate.
PolygonReport validate_polygon(std::span<const Point> vertices);

class SimplePolygon {
public:
    SimplePolygon() = default;
    /// Validates; reorders to counterclockwise.
    explicit SimplePolygon(std::vector<Point> vertices);
    static SimplePolygon trusted(std::vector<Point> ccw_vertices);

    const std::vector<Point>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }
    const Point& operator[](std::size_t i) const { return v_[i]; }
    const Point& next(std::size_t i) const { return v_[(i + 1) % v_.size()]; }
    const Point& prev(std::size_t i) const { return v_[(i + v_.size() - 1) % v_.size()]; }
    Rational area() const { return signed_area2(v_) / 2; }
    Location locate(const Point& p) const { return minext::locate(v_, p); }
    std::vector<std::size_t> reflex_vertices() const;
    double perimeter() const;

private:
    std::vector<Point> v_;
};

class ConvexPolygon {
public:
    ConvexPolygon() = default;
    /// Validates convexity, merges collinear runs, reorders to counterclockwise.
    explicit ConvexPolygon(std::vector<Point> vertices);

    const std::vector<Point>& vertices() const { return v_; }
    std::size_t size() const { return v_.size(); }
    const Point& operator[](std::size_t i) const { return v_[i]; }
    const Point& next(std::size_t i) const { return v_[(i + 1) % v_.size()]; }
    Rational area() const { return signed_area2(v_) / 2; }
    double perimeter() const;
    Location locate(const Point& p) const { return minext::locate(v_, p); }
    SimplePolygon as_simple() const { return SimplePolygon::trusted(v_); }

private:
    std::vector<Point> v_;
};

struct BoundingFrame {
    Rational a_minus, a_plus;  // extent along e_alpha
    Rational b_minus, b_plus;  // extent along e_perp
    Rational ell() const { return a_plus - a_minus; }
    Rational h() const { return b_plus - b_minus; }
};

BoundingFrame frame(const ConvexPolygon& q, const Direction& dir);

enum class Axis {
    Parallel,       // lines parallel to e_alpha: <x, e_perp> = value (the H_t family)
    Perpendicular,  // lines parallel to e_perp: <x, e_alpha> = value (the V_s family)
};

/// Boundary points on the line of constant coordinate; ordered by increasing transverse coordinate.
std::pair<Point, Point> chord(const ConvexPolygon& q, const Direction& dir, Axis axis, const Rational& value);

ConvexPolygon clip_below(const ConvexPolygon& q, const Direction& dir, const Rational& value);
ConvexPolygon clip_above(const ConvexPolygon& q, const Direction& dir, const Rational& value);

/// Keeps the closed half-plane left of the directed line a->b. May return fewer than 3 points.
std::vector<Point> clip_halfplane(std::span<const Point> convex, const Point& a, const Point& b);

/// Removes vertices where the boundary goes straight on (angle pi) and repeated points.
std::vector<Point> drop_collinear(std::span<const Point> loop);

double length(const Point& a, const Point& b);

} // namespace minext
