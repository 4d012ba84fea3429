#pragma once
// Independent reference computations used to cross-check the library.

#include "minext/boundary_map.hpp"
#include "minext/geometry.hpp"

#include <vector>

namespace oracle {

using minext::Point;

/// Closed-polygon visibility: segment pq lies in the closed polygon.
bool visible(const std::vector<Point>& polygon, const Point& p, const Point& q);

/// Shortest path by Dijkstra over the visibility graph of {a, b, vertices}, canonicalized
/// (straight joints removed, every polygon vertex met in the relative interior listed).
std::vector<Point> shortest_path(const std::vector<Point>& polygon, const Point& a, const Point& b);

/// Squared lengths of consecutive segments.
std::vector<minext::Rational> squared_lengths(const std::vector<Point>& path);

double path_length(const std::vector<Point>& path);

} // namespace oracle

namespace oracle {

/// Slice integral of geodesic image distance by adaptive Gauss-Kronrod (7/15) quadrature; shortest paths via the
/// visibility-graph oracle. `parallel` selects lines of constant e_perp coordinate.
double psi_quadrature(const std::vector<minext::Node>& loop, const minext::Direction& dir, bool parallel,
                      double tol);

} // namespace oracle
