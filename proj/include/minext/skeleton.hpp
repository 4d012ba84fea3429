#pragma once

#include "minext/boundary_map.hpp"
#include "minext/geodesics.hpp"
#include "minext/geometry.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

// Skeleton constructions work in the frame where alpha = 0: slicing lines are horizontal (constant y) and
// vertical (constant x). The pipeline rotates into that frame first.

namespace minext {

enum class PolygonClass {
    Rectangle,    // Q equals its bounding rectangle
    TwoParallel,  // two sides parallel to e_alpha
    OneParallel,  // one side parallel to e_alpha
    NoParallel,   // no side parallel to e_alpha
};

const char* to_string(PolygonClass c) noexcept;

PolygonClass classify_polygon(const ConvexPolygon& q, const Direction& dir);

/// Exact preimage -> image assignments on skeleton points. Loops of pieces are read back from it, so pieces that
/// share an edge see the same breakpoints.
class NodeRegistry {
public:
    /// Throws Internal when p already carries a different image.
    void add(const Point& pre, const Point& img);
    std::optional<Point> find(const Point& pre) const;
    std::size_t size() const { return count_; }

    /// Registered nodes on the boundary of a counterclockwise polygon, in boundary order starting at vertex 0.
    /// Every polygon vertex must be registered; edges must be horizontal, vertical or carry nodes only at rows.
    Loop loop_of(std::span<const Point> polygon) const;

private:
    std::map<Rational, std::map<Rational, Point>> by_y_;  // y -> x -> image
    std::map<Rational, std::map<Rational, Point>> by_x_;  // x -> y -> image
    std::size_t count_ = 0;
};

/// Removed corner triangle: apex W, chord ends on the two sides at W, chord point on the bisector at W.
struct Tip {
    Point apex;
    Point left;   // chord end with smaller x
    Point right;  // chord end with larger x
    Point foot;   // chord point on the internal bisector at the apex (rational approximation)
    Point foot_image;
    Loop loop;    // counterclockwise boundary of the tip with images
};

struct TipDecomposition {
    ConvexPolygon delta;  // remaining polygon with horizontal top and bottom sides
    Loop delta_loop;      // counterclockwise boundary map of delta
    std::vector<Tip> tips;
    double eta = 0.0;     // size bound actually used
};

/// Cuts off the lowest and/or highest vertex so that the remainder has horizontal top and bottom sides.
/// Chord images bend through a point near the apex image. `loop` is counterclockwise over q.
/// Throws PreconditionViolated for polygons that already have two horizontal sides.
TipDecomposition remove_tips(const ConvexPolygon& q, const Loop& loop, double eta);

struct GridOptions {
    int strips = 4;             // uniform cut levels (node levels are always added)
    int columns = 4;            // uniform column positions
    double image_step = 0.0;    // > 0: densify cuts so boundary image pieces between cuts are shorter
    Rational delta{1, 64};      // initial modification size; halved on failed verification
    bool split = false;         // triangle / rectangle / triangle split of every strip
};

/// Monotone piecewise-linear parametrization of one cut curve by the x coordinate of its preimage.
struct CrossingParam {
    std::vector<Rational> xs;      // strictly increasing preimage abscissae, ends included
    std::vector<Rational> params;  // polyline parameters (segment index + fraction), strictly increasing
    std::vector<Point> curve;      // image polyline
};

enum class CellKind { Interior, LeftTriangle, RightTriangle };

struct Cell {
    ConvexPolygon polygon;
    Loop loop;
    CellKind kind = CellKind::Interior;
    std::size_t strip = 0;
};

/// Right triangles over the slanted sides plus the inscribed rectangle of one strip.
struct StripSplit {
    std::optional<ConvexPolygon> left;
    ConvexPolygon rectangle;
    std::optional<ConvexPolygon> right;
    Rational x_left, x_right;
};

StripSplit split_strip(const ConvexPolygon& strip);

struct StripDecomposition {
    std::vector<Rational> cuts;                 // t_0 < ... < t_M including the extreme levels
    std::vector<ConvexPolygon> strips;
    std::vector<Loop> strip_loops;              // counterclockwise, read from the registry after all columns
    std::vector<std::vector<Point>> cut_curves; // image of every interior cut
    std::vector<CrossingParam> params;          // one per interior cut
    std::vector<Cell> cells;
    NodeRegistry registry;
};

/// Slices a convex polygon by horizontal cuts whose images are modified geodesics of the image polygon, then
/// each strip by vertical columns whose images are modified geodesics of the strip image. Every produced loop is
/// simple and the skeleton image is injective.
StripDecomposition slice_strips(const ConvexPolygon& c, const Loop& loop, const GridOptions& options);

} // namespace minext
