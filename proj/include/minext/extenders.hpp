#pragma once

#include "minext/boundary_map.hpp"
#include "minext/geometry.hpp"
#include "minext/mesh.hpp"
#include "minext/psi.hpp"
#include "minext/skeleton.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

// Extenders work in the alpha = 0 frame and return meshes that already passed verify_mesh.

namespace minext {

struct ExtenderBudget {
    double eps = 1e-3;
    int max_refinements = 6;
    double delta_shrink_factor = 0.5;  // applied to the modification size on every refinement
    double coarse_constant = 100.0;    // constant of the coarse bound
    bool force_tier2 = false;          // skip the direct attempt in extend_triangle_indirect

    void validate() const;
};

struct PieceExtension {
    AffineMesh mesh;
    MeshVariation variation;
    double bound = 0.0;   // the certified manhattan variation is at most this
    int tier = 1;         // 1: direct cell extension, 2: grid construction
    int refinements = 0;  // grid refinements spent
    std::vector<std::string> notes;
};

/// Piecewise-affine extension of a boundary loop over a convex preimage polygon (counterclockwise nodes).
/// Ear clipping that accepts an ear only when both the image and the preimage triangle are proper ears; falls back
/// to splitting along a diagonal valid on both sides and then to a fan from a common kernel point.
/// Throws NotInjective, DegenerateImage.
AffineMesh extend_cell(const Loop& loop);
AffineMesh extend_cell(const ConvexPolygon& c, const BoundaryMap& phi);

/// Decides whether a grid extension is good enough.
using GridAcceptance = std::function<bool(const MeshVariation&)>;

struct GridRun {
    AffineMesh mesh;
    MeshVariation variation;
    GridOptions options;   // options of the accepted grid
    int refinements = 0;
    std::vector<std::string> notes;  // one line per rejected attempt
    std::size_t triangle_cells = 0;
    std::size_t tier2_cells = 0;
    std::vector<std::array<Point, 2>> skeleton;  // interior cell edges of the accepted grid
};

/// Slices c by modified geodesic cuts and columns, extends every cell, merges and verifies; refines the grid and
/// shrinks the modification size until `accept` holds. Triangle cells of a split grid go through
/// extend_triangle_indirect. Throws BudgetExhausted after budget.max_refinements refinements.
GridRun extend_grid(const ConvexPolygon& c, const Loop& loop, GridOptions start, const ExtenderBudget& budget,
                    const GridAcceptance& accept);

/// Axis-aligned rectangle: certified |D1 v| <= Psi_h + eps, |D2 v| <= Psi_v + eps and ||Dv|| <= Psi + eps.
PieceExtension extend_rectangle(const ConvexPolygon& r, const BoundaryMap& phi, const ExtenderBudget& budget);

/// Two affine pieces over a triangle whose loop is apex, side end, bisector foot, side end (any rotation).
/// The bound is H1(phi(dT)) * H1(dT). `foot_tolerance` is relative to the length of the cut side.
/// Throws PreconditionViolated when the foot is off the bisector or phi has further breakpoints.
PieceExtension extend_triangle_direct(const Loop& loop, double foot_tolerance = 1e-6);

/// Right triangle with a horizontal and a vertical leg and phi linear on the hypotenuse. Bound:
/// Psi + 242 * H1(dT) * H1(phi(hypotenuse)) + eps. Tier 1 is extend_cell; tier 2 the grid construction.
PieceExtension extend_triangle_indirect(const Loop& loop, const ExtenderBudget& budget);

/// Any simple preimage polygon; bound coarse_constant * H1(dP) * H1(phi(dP)).
PieceExtension extend_coarse(const SimplePolygon& piece, const BoundaryMap& phi, const ExtenderBudget& budget);

/// Boundary lengths of a loop: preimage and image.
double preimage_perimeter(const Loop& loop);
double image_perimeter(const Loop& loop);

} // namespace minext
