#pragma once

#include "minext/boundary_map.hpp"
#include "minext/geometry.hpp"

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace minext {

/// Sum of square roots of the listed squared segment lengths.
struct LengthExpr {
    std::vector<Rational> squares;

    Interval enclosure() const;
    double approx() const { return enclosure().mid(); }
    friend bool operator==(const LengthExpr&, const LengthExpr&) = default;
};

/// -1 when sum sqrt(a) < sum sqrt(b), 0 when equal, +1 otherwise.
/// Exact for up to two terms per side; otherwise multi-precision enclosures with growing precision.
int compare(const LengthExpr& a, const LengthExpr& b);

/// Shortest path in a closed simple polygon, in canonical form: `path` is A, X_1, ..., X_N, B where the
/// X_j are all polygon vertices met by the path in its relative interior.
struct Geodesic {
    Point a;
    Point b;
    std::vector<Point> path;            // size 1 when a == b
    std::vector<std::size_t> vertices;  // polygon indices of X_1..X_N
    LengthExpr length;

    bool straight() const;  // no bend at any X_j
};

struct ModifiedGeodesic {
    Geodesic base;
    Rational delta;
    std::vector<Point> path;  // A, moved X_1, ..., moved X_N, B
};

/// Triangulation-backed shortest path queries in one polygon.
class PolygonGeodesics {
public:
    explicit PolygonGeodesics(SimplePolygon polygon);

    const SimplePolygon& polygon() const { return poly_; }
    const std::vector<std::array<std::size_t, 3>>& triangles() const { return tris_; }

    /// Throws PointOutside.
    Geodesic shortest_path(const Point& a, const Point& b) const;

private:
    std::vector<std::size_t> containing(const Point& p) const;
    std::vector<std::size_t> sleeve(const std::vector<std::size_t>& from, const std::vector<std::size_t>& to) const;

    SimplePolygon poly_;
    std::vector<std::array<std::size_t, 3>> tris_;       // indices into poly_, counterclockwise
    std::vector<std::array<long, 3>> nbr_;               // neighbour across edge (k, k+1)
    std::vector<Box> boxes_;
};

Geodesic shortest_path(const SimplePolygon& polygon, const Point& a, const Point& b);

/// Canonical form of a polyline inside the polygon (straight joints removed, met vertices inserted).
Geodesic canonical_geodesic(const SimplePolygon& polygon, std::vector<Point> polyline);

/// Exact triangulation of a simple polygon by ear clipping; straight-angle vertices are skipped.
std::vector<std::array<std::size_t, 3>> triangulate(const SimplePolygon& polygon);

struct SafeDelta {
    bool infinite = false;
    Rational value;
};

SafeDelta safe_delta(const SimplePolygon& polygon);

/// Unit internal bisector at vertex k of a counterclockwise polygon (floating point).
Vec2 internal_bisector(const SimplePolygon& polygon, std::size_t k);

/// Point on the internal bisector at distance ~r from vertex k, on a dyadic grid fine relative to r.
Point push_inward(const SimplePolygon& polygon, std::size_t k, double r);

/// Each X_j moved by delta/2 along its bisector; throws DeltaTooLarge unless the interior is open-inside.
ModifiedGeodesic modify(const Geodesic& g, const Rational& delta, const SimplePolygon& polygon);

/// Modifies a family of pairwise non-crossing geodesics with endpoints on the boundary. At a vertex met by
/// several members, the member cutting off the smallest boundary arc around it is moved least.
/// Shrinks delta by half up to `attempts` times; throws DeltaTooLarge if no attempt verifies.
std::vector<std::vector<Point>> modify_family(const SimplePolygon& polygon, std::span<const Geodesic> family,
                                              Rational delta, int attempts = 12);

/// Position along the boundary: edge index + fraction. Empty when p is not on the boundary.
std::optional<Rational> boundary_position(const SimplePolygon& polygon, const Point& p);

/// Interior of the polyline lies in the open polygon; its two ends may lie on the boundary.
bool open_polyline_inside(const SimplePolygon& polygon, std::span<const Point> polyline);
bool polyline_simple(std::span<const Point> polyline);
bool polylines_disjoint(std::span<const Point> a, std::span<const Point> b);

struct CrossingResult {
    enum class Kind { Empty, Point, Points, Overlap } kind = Kind::Empty;
    std::vector<Point> points;  // contact points (overlap ends included), ordered along the first curve
    // Last contact along the first curve: segment index and fraction on that segment.
    std::size_t last_segment = 0;
    Rational last_param;
    Point last;
};

CrossingResult crossing(std::span<const Point> first, std::span<const Point> second);

/// Arc between loop node indices `from` and `to` (cyclic, counterclockwise).
struct Arc {
    std::size_t from;
    std::size_t to;
};

/// Replaces each arc of the closed map psi by the chord of its ends and checks the three
/// linearization conditions. Arcs may not contain a corner of the source polygon in their interior.
BoundaryMap delta_linearize(const BoundaryMap& psi, std::span<const Arc> arcs, double delta,
                            bool check_injectivity = true);

} // namespace minext
