#include "tessera/data/features.hpp"

#include <algorithm>
#include <cmath>

#include "tessera/errors.hpp"

namespace tessera::data {

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b, bool* defined) {
    if (a.size() != b.size() || a.size() < 2) throw InvalidArgument("pearson: bad spans");
    const Eigen::ArrayXd da = a.array() - a.mean();
    const Eigen::ArrayXd db = b.array() - b.mean();
    const double va = (da * da).sum();
    const double vb = (db * db).sum();
    if (va <= 0.0 || vb <= 0.0) {
        if (defined) *defined = false;
        return 0.0;
    }
    if (defined) *defined = true;
    return (da * db).sum() / std::sqrt(va * vb);
}

FeatureSpec build_feature_spec(const Eigen::MatrixXd& counts,
                               const geo::Tessellation& tessellation, int train_end, int cap) {
    if (counts.rows() != tessellation.n())
        throw InvalidArgument("feature spec: matrix/tessellation region mismatch");
    if (train_end < 2 || train_end > counts.cols())
        throw InvalidArgument("feature spec: bad training span");
    if (cap < 0) throw InvalidArgument("feature spec: cap must be >= 0");

    FeatureSpec spec;
    spec.cap = cap;
    const int n = tessellation.n();
    spec.channels.resize(n);

    if (tessellation.scheme == geo::Tessellation::Scheme::kGeohash) {
        // fixed compass order; zero-filled outside the study grid
        static constexpr int kLatStep[8] = {-1, -1, 0, 1, 1, 1, 0, -1};  // grid rows grow south
        static constexpr int kLonStep[8] = {0, 1, 1, 1, 0, -1, -1, -1};
        for (int r = 0; r < n; ++r) {
            auto& ch = spec.channels[r];
            ch.push_back(r);
            const auto [row, col] = tessellation.grid_position(r);
            for (int d = 0; d < 8; ++d) {
                const int neighbor = tessellation.region_at(row + kLatStep[d], col + kLonStep[d]);
                ch.push_back(neighbor < 0 ? kZeroChannel : neighbor);
            }
            while (static_cast<int>(ch.size()) < spec.channel_count()) ch.push_back(kZeroChannel);
            ch.resize(spec.channel_count());
        }
        return spec;
    }

    const auto neighbor_lists = tessellation.neighbor_lists();
    for (int r = 0; r < n; ++r) {
        auto& ch = spec.channels[r];
        ch.push_back(r);
        std::vector<std::pair<double, int>> ranked;
        for (int nb : neighbor_lists[r]) {
            bool defined = true;
            const double rho = pearson(counts.row(r).head(train_end).transpose(),
                                       counts.row(nb).head(train_end).transpose(), &defined);
            if (!defined || rho <= 0.0) continue;  // only positively correlated neighbors
            ranked.emplace_back(rho, nb);
        }
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < cap; ++i)
            ch.push_back(ranked[i].second);
        while (static_cast<int>(ch.size()) < spec.channel_count()) ch.push_back(kSentinelChannel);
    }
    return spec;
}

Eigen::MatrixXd neighbor_features(const Eigen::MatrixXd& scaled, const FeatureSpec& spec,
                                  int region) {
    if (region < 0 || region >= static_cast<int>(spec.channels.size()))
        throw InvalidArgument("neighbor_features: bad region");
    const auto& ch = spec.channels[region];
    Eigen::MatrixXd out(scaled.cols(), ch.size());
    for (std::size_t c = 0; c < ch.size(); ++c) {
        if (ch[c] == kSentinelChannel)
            out.col(c).setConstant(-1.0);
        else if (ch[c] == kZeroChannel)
            out.col(c).setZero();
        else
            out.col(c) = scaled.row(ch[c]).transpose();
    }
    return out;
}

std::vector<std::array<int, 9>> build_frame_spec(const geo::Tessellation& tessellation) {
    if (tessellation.scheme != geo::Tessellation::Scheme::kGeohash)
        throw InvalidArgument("frame_tensor: geohash tessellation required");
    std::vector<std::array<int, 9>> frames(tessellation.n());
    for (int r = 0; r < tessellation.n(); ++r) {
        const auto [row, col] = tessellation.grid_position(r);
        int p = 0;
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc)
                frames[r][p++] = tessellation.region_at(row + dr, col + dc);
    }
    return frames;
}

Eigen::MatrixXd frame_tensor(const Eigen::MatrixXd& scaled,
                             const std::vector<std::array<int, 9>>& frames, int region) {
    if (region < 0 || region >= static_cast<int>(frames.size()))
        throw InvalidArgument("frame_tensor: bad region");
    Eigen::MatrixXd out(scaled.cols(), 9);
    for (int p = 0; p < 9; ++p) {
        const int src = frames[region][p];
        if (src < 0)
            out.col(p).setZero();
        else
            out.col(p) = scaled.row(src).transpose();
    }
    return out;
}

}  // namespace tessera::data
