#pragma once

#include <cstdint>
#include <vector>

#include "tessera/geo/geopoint.hpp"

namespace tessera::geo {

struct KMeansResult {
    std::vector<ProjectedPoint> centroids;
    std::vector<int> assignments;   // point index -> cluster index
    double inertia = 0.0;           // J = sum of squared point-to-centroid distances
    std::vector<double> inertia_history;  // J after each Lloyd iteration
    int iterations = 0;
};

/// Index of the nearest centroid (squared Euclidean); ties go to the lowest
/// index.
int assign_nearest(const ProjectedPoint& p, const std::vector<ProjectedPoint>& centroids);

/// Lloyd's algorithm with k-means++ seeding. Runs until the assignment
/// fixpoint or `max_iterations`; empty clusters are repaired by stealing the
/// point farthest from its current centroid. Deterministic given `seed`.
KMeansResult kmeans_cluster(const std::vector<ProjectedPoint>& points, int k, std::uint64_t seed,
                            int max_iterations = 300);

}  // namespace tessera::geo
