#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "tessera/geo/geopoint.hpp"
#include "tessera/nn/params.hpp"

namespace tessera::test {

/// Geohash encoding by the arithmetic route (floor-scaled axis indices, then
/// bit interleaving); independent of the bisection implementation.
std::string geohash_encode_oracle(double lat, double lon, int level);

/// Brute-force Voronoi adjacency: assign a dense grid of sample points to
/// their nearest centroid and mark 4-neighbor sample pairs with different
/// assignments. The grid covers the centroids and every empty-circumcircle
/// center (the Voronoi vertices, found by O(N^3) enumeration) plus a margin.
std::vector<std::uint8_t> voronoi_adjacency_grid_oracle(
    const std::vector<geo::ProjectedPoint>& centroids, double pitch_divisor = 50.0);

/// Uniform points in the unit square with a minimum separation, by seeded
/// dart throwing.
std::vector<geo::ProjectedPoint> separated_random_points(int count, double min_separation,
                                                         std::uint64_t seed);

/// Straight-line re-implementation of the six LSTM cell equations.
void lstm_step_reference(const nn::GateBlock& p, const nn::Vector& x, const nn::Vector& h_prev,
                         const nn::Vector& c_prev, nn::Vector& h_out, nn::Vector& c_out);

struct GradCheck {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    std::size_t checked = 0;
};

/// Central finite differences (step 1e-5) against the analytic gradients of
/// one sample; relative error is |a - n| / (|a| + |n| + 1e-6).
GradCheck finite_difference_check(nn::SequenceModel& model, const nn::Sample& sample,
                                  double step = 1e-5);

}  // namespace tessera::test
