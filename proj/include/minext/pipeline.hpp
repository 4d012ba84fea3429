#pragma once

#include "minext/boundary_map.hpp"
#include "minext/extenders.hpp"
#include "minext/geometry.hpp"
#include "minext/mesh.hpp"
#include "minext/psi.hpp"
#include "minext/skeleton.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace minext {

struct Problem {
    ConvexPolygon q;
    Direction direction;
    BoundaryMap phi;  // closed map whose corners are the vertices of q
    double eps = 1e-3;

    /// Throws Validation or NotInjective.
    void validate() const;
};

/// One budget record of a pipeline stage.
struct LedgerEntry {
    std::string stage;
    std::string detail;
    double target = 0.0;    // bound the stage had to meet (0 when not applicable)
    double achieved = 0.0;  // certified value reached
};

struct Margins {
    double manhattan = 0.0;  // psi lower bound + eps - certified variation upper bound
    double along = 0.0;
    double across = 0.0;
};

struct ExtensionResult {
    AffineMesh mesh;  // on the original polygon
    PsiBreakdown psi;
    MeshVariation variation;
    Margins margins;
    Direction direction;
    PolygonClass polygon_class = PolygonClass::Rectangle;
    double eps = 0.0;
    double eta = 0.0;
    int refinements = 0;
    std::vector<LedgerEntry> ledger;
    VerificationReport report;
    std::vector<std::array<Point, 2>> skeleton;  // interior skeleton segments on the original polygon

    /// All three variation inequalities and the mesh audit hold.
    bool certified() const;
};

/// Rotates into the alpha = 0 frame, removes tips, slices, extends every piece, merges, rotates back and certifies
/// ||Dv||_alpha <= Psi_alpha + eps together with the two componentwise inequalities.
/// Throws NotInjective, Validation, BudgetExhausted.
ExtensionResult extend_minimal(const Problem& problem, const ExtenderBudget& budget);

/// Certified truth of the two componentwise inequalities, re-derived from the mesh.
std::pair<bool, bool> componentwise_check(const ExtensionResult& result);

/// The tip size used for a given eps: half the largest admissible value of min{1, eps / (C + C H1(dQ))}.
double tip_eta(double eps, double perimeter, double coarse_constant);

} // namespace minext
