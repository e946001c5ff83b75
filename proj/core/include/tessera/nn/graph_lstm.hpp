#pragma once

#include <cstdint>

#include "tessera/nn/lstm.hpp"
#include "tessera/nn/params.hpp"

namespace tessera::nn {

/// Parameters of one GraphLSTM layer: an edge-masked 1-hop convolution
/// weight w_gc feeding the four LSTM gates, plus the edge-masked neighbor
/// cell-state weight w_n. Off-support entries of w_gc and w_n (where the
/// augmented adjacency is zero) are exactly zero at all times.
struct GraphLstmLayer {
    Matrix w_gc;       // n x n, support within a_tilde
    GateBlock gates;   // w: n x n on gc, r: n x n on h, b: n
    Matrix w_n;        // n x n, support within a_tilde
};

/// One GraphLSTM cell update:
///   gc   = (w_gc . A~) x
///   f,i,o = sigmoid(W gc + R h + b),  g = tanh(W_c gc + R_c h + b_c)
///   c*   = (w_n . A~) c
///   c'   = f.c* + i.g,   h' = o.tanh(c').
/// Throws Error("support violation") if w_gc or w_n has mass off-support.
CellState graphlstm_step(const GraphLstmLayer& p, const Matrix& a_tilde, const Vector& x,
                         const CellState& s);

/// Stacked GraphLSTM over a fixed graph; hidden dimension equals the node
/// count and the head is an n x n affine map with a rectifier, so one forward
/// pass forecasts every region at once.
class GraphLstmModel final : public SequenceModel {
public:
    GraphLstmModel(Matrix a_tilde, int layers, std::uint64_t seed);

    std::string kind() const override { return "graphlstm"; }
    int input_dim() const override { return n_; }
    int output_dim() const override { return n_; }
    int node_count() const { return n_; }
    int layer_count() const { return layers_; }
    const Matrix& a_tilde() const { return a_tilde_; }

    std::vector<TensorRef> tensors() override;
    std::unique_ptr<SequenceModel> clone() const override;
    std::unique_ptr<SequenceModel> zeros_like() const override;
    void apply_masks() override;

    Vector forward(const Matrix& window, OpCounter* ops = nullptr) const override;
    double accumulate_gradients(const Sample& sample, SequenceModel& grads, double dropout,
                                Rng* rng, OpCounter* ops) override;

    std::vector<GraphLstmLayer> cells;
    Matrix w_out;  // n x n
    Vector b_out;  // n

private:
    Matrix a_tilde_;
    int n_;
    int layers_;
};

}  // namespace tessera::nn
