#pragma once

#include <cstdint>

#include "tessera/nn/params.hpp"

namespace tessera::nn {

/// Hidden/cell state pair of one recurrent layer.
struct CellState {
    Vector h;
    Vector c;
};

/// One LSTM cell update:
///   f,i,o = sigmoid(W x + R h + b),  g = tanh(W_c x + R_c h + b_c),
///   c' = f.c + i.g,  h' = o.tanh(c').
/// Throws NumericError on non-finite input.
CellState lstm_step(const GateBlock& p, const Vector& x, const CellState& s);

/// Stacked vanilla LSTM with a rectified scalar regression head.
class LstmModel final : public SequenceModel {
public:
    LstmModel(int input, int hidden, int layers, std::uint64_t seed);

    std::string kind() const override { return "lstm"; }
    int input_dim() const override { return input_; }
    int output_dim() const override { return 1; }
    int hidden_size() const { return hidden_; }
    int layer_count() const { return layers_; }

    std::vector<TensorRef> tensors() override;
    std::unique_ptr<SequenceModel> clone() const override;
    std::unique_ptr<SequenceModel> zeros_like() const override;

    Vector forward(const Matrix& window, OpCounter* ops = nullptr) const override;
    double accumulate_gradients(const Sample& sample, SequenceModel& grads, double dropout,
                                Rng* rng, OpCounter* ops) override;

    std::vector<GateBlock> cells;  // one per layer
    Matrix w_out;                  // 1 x hidden
    Vector b_out;                  // 1

private:
    int input_;
    int hidden_;
    int layers_;
};

}  // namespace tessera::nn
