#pragma once

#include <cstdint>

#include "tessera/nn/params.hpp"

namespace tessera::nn {

/// Filter banks for one convolutional LSTM layer. Spatial frames are 3 x 3;
/// a frame with `ch` channels is stored as a (9 x ch) matrix whose row p is
/// the pixel at (p / 3, p % 3).
///
/// Input filters w[g] are (9 * c_in x k): row (tap * c_in + ch) holds the
/// kernel weight of tap (tap / 3 - 1, tap % 3 - 1) for input channel ch and
/// output filter given by the column. Recurrent filters r[g] are
/// (9 * k x k); biases are per filter, broadcast over pixels.
struct ConvGateBlock {
    std::array<Matrix, 4> w;
    std::array<Matrix, 4> r;
    std::array<Vector, 4> b;
    int c_in = 0;
    int k = 0;
};

/// Same-padding stride-1 3x3 convolution on a 3x3 frame:
///   out(p, f) = sum_{tap, ch valid} input(p + tap offset, ch) * bank(tap * ch_in + ch, f).
Matrix conv3x3(const Matrix& input, const Matrix& bank, int ch_in, int k);

struct ConvState {
    Matrix h;  // 9 x k
    Matrix c;  // 9 x k
};

/// ConvLSTM cell update: the LSTM gate algebra with convolutions in place of
/// the matrix products.
ConvState convlstm_step(const ConvGateBlock& p, const Matrix& frame, const ConvState& s);

/// Stacked ConvLSTM with a flatten + affine + rectifier head producing the
/// center-cell forecast.
class ConvLstmModel final : public SequenceModel {
public:
    ConvLstmModel(int c_in, int filters, int layers, std::uint64_t seed);

    std::string kind() const override { return "convlstm"; }
    int input_dim() const override { return 9 * c_in_; }
    int output_dim() const override { return 1; }
    int filters() const { return k_; }
    int layer_count() const { return layers_; }

    std::vector<TensorRef> tensors() override;
    std::unique_ptr<SequenceModel> clone() const override;
    std::unique_ptr<SequenceModel> zeros_like() const override;

    Vector forward(const Matrix& window, OpCounter* ops = nullptr) const override;
    double accumulate_gradients(const Sample& sample, SequenceModel& grads, double dropout,
                                Rng* rng, OpCounter* ops) override;

    std::vector<ConvGateBlock> cells;
    Matrix w_out;  // 1 x 9k
    Vector b_out;  // 1

private:
    Matrix frame_from_row(const Eigen::RowVectorXd& row) const;

    int c_in_;
    int k_;
    int layers_;
};

}  // namespace tessera::nn
