#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tessera/geo/geohash.hpp"
#include "tessera/geo/geopoint.hpp"
#include "tessera/geo/kmeans.hpp"

namespace tessera::geo {

/// A partition of the study area into N regions, either a geohash lattice or
/// a K-Means-seeded Voronoi diagram, plus the first-order-neighbor edges.
///
/// Region order contract: geohash regions are row-major from the northwest
/// corner (rows by descending latitude, columns by ascending longitude);
/// Voronoi regions follow K-Means centroid order.
struct Tessellation {
    enum class Scheme { kGeohash, kVoronoi };

    Scheme scheme = Scheme::kVoronoi;
    int level = 0;  // geohash level (code length)
    int k = 0;      // Voronoi centroid count

    std::vector<GeoPoint> centroids;            // cell centers / K-Means centroids
    std::vector<std::pair<int, int>> edges;     // sorted, i < j

    // geohash lattice extent
    int grid_rows = 0;
    int grid_cols = 0;

    // Voronoi projection origin (needed to reproduce point assignment)
    GeoPoint projection_ref{0.0, 0.0};

    int n() const { return static_cast<int>(centroids.size()); }

    /// Dense symmetric 0/1 adjacency (row-major, zero diagonal).
    std::vector<std::uint8_t> dense_adjacency() const;
    std::vector<std::vector<int>> neighbor_lists() const;

    /// Region index containing `p`, or -1 if outside the study area
    /// (geohash only; Voronoi assigns every point to its nearest centroid).
    int locate(const GeoPoint& p) const;

    /// Geohash lattice coordinates of a region (row-major contract).
    std::pair<int, int> grid_position(int region) const;
    /// Region at lattice (row, col), or -1 outside the grid.
    int region_at(int row, int col) const;
    /// Geohash code of a region.
    std::string code_of(int region) const;

    std::string to_json(std::uint64_t seed, const std::string& config_hash) const;
    static Tessellation from_json(const std::string& text);

    void save(const std::string& path, std::uint64_t seed, const std::string& config_hash) const;
    static Tessellation load(const std::string& path);
};

/// Lattice of all level-`level` geohash cells intersecting the bounding box
/// of `points` ("expanded to whole cells").
Tessellation build_geohash_tessellation(const std::vector<GeoPoint>& points, int level);

struct VoronoiBuild {
    Tessellation tessellation;
    KMeansResult kmeans;
};

/// K-Means (k, seed) on the equirectangular projection of `points`, then the
/// Delaunay-dual adjacency of the centroid Voronoi diagram.
VoronoiBuild build_voronoi_tessellation(const std::vector<GeoPoint>& points, int k,
                                        std::uint64_t seed);

}  // namespace tessera::geo
