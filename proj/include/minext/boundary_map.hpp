#pragma once

#include "minext/geometry.hpp"

#include <optional>
#include <span>
#include <vector>

namespace minext {

/// Point of a skeleton: fraction t along segment `edge`.
struct SkeletonPoint {
    std::size_t edge = 0;
    Rational t;
};

struct Breakpoint {
    Rational t;
    Point image;
};

/// Preimage/image pair; a closed boundary map is a cyclic list of these.
struct Node {
    Point pre;
    Point img;
    friend bool operator==(const Node&, const Node&) = default;
};

using Loop = std::vector<Node>;

struct Segment {
    Point a;
    Point b;
};

/// Piecewise-linear map on a union of segments, linear between consecutive breakpoints.
/// Every edge carries breakpoints at t = 0 and t = 1.
class BoundaryMap {
public:
    BoundaryMap() = default;

    /// Closed map over polygon corners: edge i runs corner i -> corner i+1.
    static BoundaryMap closed(std::vector<Point> corners, std::vector<std::vector<Breakpoint>> per_edge);
    /// Closed map from a cyclic node list; corners are the non-straight preimage nodes.
    static BoundaryMap from_loop(std::span<const Node> loop);
    /// Open map on independent segments.
    static BoundaryMap open(std::vector<Segment> edges, std::vector<std::vector<Breakpoint>> per_edge);
    /// Open single-segment map from nodes lying in order on one preimage segment.
    static BoundaryMap along_segment(std::span<const Node> path);

    bool is_closed() const { return closed_; }
    std::size_t edge_count() const { return edges_.size(); }
    const Segment& edge(std::size_t i) const { return edges_.at(i); }
    const std::vector<Breakpoint>& breakpoints(std::size_t edge) const { return pieces_.at(edge); }
    std::vector<Point> corners() const;

    /// Canonical form: t = 1 on a closed edge becomes t = 0 on its successor.
    SkeletonPoint canonical(SkeletonPoint p) const;
    Point preimage(const SkeletonPoint& p) const;
    Point eval(const SkeletonPoint& p) const;
    std::optional<SkeletonPoint> find(const Point& pre) const;
    /// Evaluates at a preimage point of the skeleton; throws NotOnSkeleton otherwise.
    Point eval_at(const Point& pre) const;

    BoundaryMap insert_breakpoints(std::span<const SkeletonPoint> points) const;
    /// Restriction to a subset of edges (open result unless all edges of a closed map are kept).
    BoundaryMap restrict(std::span<const std::size_t> edges) const;
    /// Restriction to a sub-segment [p, q] of one edge.
    BoundaryMap restrict(const Point& p, const Point& q) const;

    /// All breakpoints as nodes, edge by edge; closed maps omit each edge's t = 1 duplicate.
    Loop loop() const;
    /// Node path along one edge (all breakpoints including both ends).
    Loop path(std::size_t edge) const;

    double image_length() const;
    double preimage_length() const;

private:
    void check() const;

    std::vector<Segment> edges_;
    std::vector<std::vector<Breakpoint>> pieces_;
    bool closed_ = false;
};

/// Jordan image of a closed boundary map; vertices are the breakpoint images in counterclockwise order.
struct ImagePolygon {
    SimplePolygon polygon;
    bool reversed = false;                     // phi reverses orientation
    std::vector<SkeletonPoint> correspondence;  // polygon vertex -> skeleton point
};

ImagePolygon validate_injective(const BoundaryMap& phi);
/// Same check on a raw loop; returns the counterclockwise image polygon and whether it was reversed.
ImagePolygon validate_injective(std::span<const Node> loop);

/// Parameter of p along segment a -> b (p assumed on the line).
Rational param_on(const Point& p, const Point& a, const Point& b);

} // namespace minext
