#pragma once

#include <cstdint>
#include <vector>

#include "tessera/geo/geopoint.hpp"

namespace tessera::geo {

/// Adjacency of the Voronoi diagram of `centroids`, computed as the Delaunay
/// triangulation dual (Bowyer-Watson with a super-triangle). Returns an N x N
/// symmetric 0/1 matrix (row-major, diagonal zero).
///
/// Cocircular degeneracies are resolved deterministically by a tiny
/// index-keyed symbolic perturbation of the sites, so repeated calls always
/// produce the same adjacency.
///
/// Requires >= 3 non-collinear centroids; throws GeometryError otherwise.
std::vector<std::uint8_t> voronoi_adjacency(const std::vector<ProjectedPoint>& centroids);

/// Per-cell degree of an N x N 0/1 adjacency matrix.
std::vector<int> adjacency_degrees(const std::vector<std::uint8_t>& adjacency, int n);

}  // namespace tessera::geo
