#pragma once

#include "minext/boundary_map.hpp"
#include "minext/geometry.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace minext {

using Triangle = std::array<std::size_t, 3>;

/// Piecewise-affine map: affine on each triangle, given by vertex preimage/image pairs.
struct AffineMesh {
    std::vector<Node> vertices;
    std::vector<Triangle> triangles;
    BoundaryMap trace;  // boundary values the mesh must reproduce
};

/// Derivative of the affine map on one triangle, as a 2x2 matrix acting on column vectors.
struct Jacobian {
    Rational m00, m01, m10, m11;

    Point apply(const Point& v) const { return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y}; }
    Rational det() const { return m00 * m11 - m01 * m10; }
};

/// Preimage triangle must be non-degenerate.
Jacobian jacobian(const Node& a, const Node& b, const Node& c);

/// Image of p under the affine map through three nodes.
Point affine_image(const Node& a, const Node& b, const Node& c, const Point& p);

struct MeshCheck {
    std::string name;
    bool ok = true;
    std::string witness;  // first offending element when !ok
};

struct VerificationReport {
    std::vector<MeshCheck> checks;
    int image_sign = 0;  // +1 orientation preserving, -1 reversing
    Rational preimage_area;
    Rational image_area;

    bool passed() const;
    const MeshCheck& check(const std::string& name) const;
};

/// Exact audit of every homeomorphism invariant. Check names: "tiling", "orientation",
/// "image_orientation", "continuity", "boundary_trace", "image_area".
VerificationReport verify_mesh(const AffineMesh& mesh, const BoundaryMap& phi);

/// Joins meshes of essentially disjoint pieces. Vertices with equal preimage are identified and must carry the same
/// image. Vertices of one piece lying inside a boundary edge of another are inserted by re-fanning that triangle.
AffineMesh merge_meshes(std::span<const AffineMesh> parts, BoundaryMap trace);

/// Applies a rigid motion to every preimage (images untouched).
AffineMesh map_preimages(const AffineMesh& mesh, const Direction& dir, bool to_frame);

} // namespace minext
