#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tessera/flops.hpp"
#include "tessera/rng.hpp"

namespace tessera::nn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Flat named view of one parameter tensor. `mask`, when set, marks the
/// support: entries where mask == 0 must stay exactly zero.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    int rows = 0;
    int cols = 0;
    const double* mask = nullptr;

    std::size_t size() const { return static_cast<std::size_t>(rows) * cols; }
};

/// Gate order used everywhere: forget, input, output, candidate.
enum Gate : int { kForget = 0, kInput = 1, kOutput = 2, kCandidate = 3 };
inline constexpr std::array<const char*, 4> kGateNames = {"f", "i", "o", "c"};

/// Input weights W, recurrent weights R and bias b for the four gates.
struct GateBlock {
    std::array<Matrix, 4> w;
    std::array<Matrix, 4> r;
    std::array<Vector, 4> b;
};

double glorot_limit(int fan_in, int fan_out);
void glorot_fill(Matrix& m, int fan_in, int fan_out, Rng& rng);

/// Glorot-uniform weights, zero biases, forget-gate bias 1.
void init_gate_block(GateBlock& block, int hidden, int input, Rng& rng);

void append_gate_tensors(std::vector<TensorRef>& out, GateBlock& block, const std::string& prefix);

inline Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

/// One training sample: an L-step input window (row t = flattened input at
/// step t) and the regression target.
struct Sample {
    Matrix window;
    Vector target;
};

/// Common surface of the three recurrent forecasters. Concrete models own
/// their parameters; gradients live in a zeroed clone of the same type.
class SequenceModel {
public:
    virtual ~SequenceModel() = default;

    virtual std::string kind() const = 0;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;

    /// Named views of every parameter tensor, in a fixed order.
    virtual std::vector<TensorRef> tensors() = 0;

    virtual std::unique_ptr<SequenceModel> clone() const = 0;
    virtual std::unique_ptr<SequenceModel> zeros_like() const = 0;

    /// Inference pass over one window (dropout disabled).
    virtual Vector forward(const Matrix& window, OpCounter* ops = nullptr) const = 0;

    /// Loss for one sample plus gradient accumulation into `grads` (must be
    /// a zeros_like/compatible instance of the same concrete type). With
    /// dropout > 0 and rng != nullptr, inverted dropout is applied between
    /// stacked layers.
    virtual double accumulate_gradients(const Sample& sample, SequenceModel& grads, double dropout,
                                        Rng* rng, OpCounter* ops) = 0;

    /// Zero any off-support entries (no-op for unmasked models).
    virtual void apply_masks() {}

    double sample_loss(const Sample& sample, OpCounter* ops = nullptr) const;

    std::size_t parameter_count();
};

}  // namespace tessera::nn
