#pragma once

#include <vector>

#include <Eigen/Core>

#include "tessera/geo/tessellation.hpp"

namespace tessera::data {

/// Channel source markers for neighbor feature tensors.
inline constexpr int kSentinelChannel = -1;  // padded slot, constant -1 in scaled space
inline constexpr int kZeroChannel = -2;      // off-grid geohash neighbor, zero-filled

/// Per-region channel sources for the spatial LSTM features. Channel 0 is
/// always the region itself; the rest are neighbors. Voronoi neighbors are
/// ranked by descending Pearson correlation on the training span and padded
/// with sentinel channels up to `cap`; geohash channels are the 8 lattice
/// neighbors in compass order (N, NE, E, SE, S, SW, W, NW).
struct FeatureSpec {
    std::vector<std::vector<int>> channels;  // [region][channel] -> source region or marker
    int cap = 8;

    int channel_count() const { return cap + 1; }
};

/// Pearson correlation of two equally long spans; returns 0 and sets
/// `*defined = false` when either side has zero variance.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* defined = nullptr);

/// Build the channel table from raw counts. Correlations use columns
/// [0, train_end) only.
FeatureSpec build_feature_spec(const Eigen::MatrixXd& counts,
                               const geo::Tessellation& tessellation, int train_end, int cap = 8);

/// Assemble the S-channel feature series of one region from a scaled matrix:
/// a T x (cap + 1) matrix whose column 0 is the region's own series.
Eigen::MatrixXd neighbor_features(const Eigen::MatrixXd& scaled, const FeatureSpec& spec,
                                  int region);

/// Per-region frame pixel sources for ConvLSTM: 9 entries per region in
/// row-major frame order (NW N NE / W C E / SW S SE); kZeroChannel marks
/// off-grid pixels. Geohash tessellations only.
std::vector<std::array<int, 9>> build_frame_spec(const geo::Tessellation& tessellation);

/// T x 9 matrix of 3x3 single-channel frames for one region (row t = frame
/// at step t, pixel-major). Throws InvalidArgument for non-geohash input.
Eigen::MatrixXd frame_tensor(const Eigen::MatrixXd& scaled,
                             const std::vector<std::array<int, 9>>& frames, int region);

}  // namespace tessera::data
