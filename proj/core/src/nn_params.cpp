#include "tessera/nn/params.hpp"

#include <cmath>

#include "tessera/nn/loss.hpp"

namespace tessera::nn {

double glorot_limit(int fan_in, int fan_out) { return std::sqrt(6.0 / (fan_in + fan_out)); }

void glorot_fill(Matrix& m, int fan_in, int fan_out, Rng& rng) {
    const double limit = glorot_limit(fan_in, fan_out);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
}

void init_gate_block(GateBlock& block, int hidden, int input, Rng& rng) {
    for (int g = 0; g < 4; ++g) {
        block.w[g].resize(hidden, input);
        glorot_fill(block.w[g], input, hidden, rng);
        block.r[g].resize(hidden, hidden);
        glorot_fill(block.r[g], hidden, hidden, rng);
        block.b[g] = Vector::Zero(hidden);
    }
    block.b[kForget].setOnes();  // start with the memory path open
}

void append_gate_tensors(std::vector<TensorRef>& out, GateBlock& block, const std::string& prefix) {
    for (int g = 0; g < 4; ++g) {
        Matrix& w = block.w[g];
        out.push_back({prefix + "w_" + kGateNames[g], w.data(), static_cast<int>(w.rows()),
                       static_cast<int>(w.cols()), nullptr});
    }
    for (int g = 0; g < 4; ++g) {
        Matrix& r = block.r[g];
        out.push_back({prefix + "r_" + kGateNames[g], r.data(), static_cast<int>(r.rows()),
                       static_cast<int>(r.cols()), nullptr});
    }
    for (int g = 0; g < 4; ++g) {
        Vector& b = block.b[g];
        out.push_back(
            {prefix + "b_" + kGateNames[g], b.data(), static_cast<int>(b.size()), 1, nullptr});
    }
}

double SequenceModel::sample_loss(const Sample& sample, OpCounter* ops) const {
    return compute_loss(sample.target, forward(sample.window, ops));
}

std::size_t SequenceModel::parameter_count() {
    std::size_t total = 0;
    for (const auto& t : tensors()) total += t.size();
    return total;
}

}  // namespace tessera::nn
