#pragma once

#include "minext/boundary_map.hpp"
#include "minext/geodesics.hpp"
#include "minext/geometry.hpp"
#include "minext/mesh.hpp"

namespace minext {

/// Value with an absolute error bound.
struct Certified {
    double value = 0.0;
    double error = 0.0;

    double lower() const { return value - error; }
    double upper() const { return value + error; }
};

struct PsiBreakdown {
    Certified horizontal;  // integral over lines parallel to e_alpha
    Certified vertical;    // integral over lines parallel to e_alpha^perp
    std::size_t pieces = 0;    // closed-form integration pieces
    std::size_t fallbacks = 0; // tiny pieces bounded by the Lipschitz estimate

    double total() const { return horizontal.value + vertical.value; }
    double error_bound() const { return horizontal.error + vertical.error; }
};

/// Geodesic distance inside the closed polygon.
LengthExpr rho(const SimplePolygon& polygon, const Point& a, const Point& b);

/// Integral over [lo, hi] of |p + t q| dt, in closed form.
Certified integrate_norm(const Point& p, const Point& q, const Rational& lo, const Rational& hi);

/// Both slice integrals of geodesic distances in the image polygon. Throws NotInjective for a non-injective phi and
/// ToleranceUnreachable if the certified error exceeds tol.
PsiBreakdown psi_alpha(const ConvexPolygon& q, const Direction& dir, const BoundaryMap& phi, double tol = 1e-9);

/// Same functional for a boundary map given as a closed loop whose preimage is convex.
PsiBreakdown psi_alpha(const Loop& loop, const Direction& dir, double tol = 1e-9);

struct DirectionalVariation {
    Point direction;
    Interval value;
};

struct MeshVariation {
    DirectionalVariation along;   // |<Dv, e_alpha>|
    DirectionalVariation across;  // |<Dv, e_alpha^perp>|
    Interval manhattan;
};

/// Exact per-triangle accumulation of area * |J e|, enclosed in floating point.
MeshVariation mesh_variation(const AffineMesh& mesh, const Direction& dir);

} // namespace minext
