#include "tessera/nn/lstm.hpp"

#include <cmath>

#include "tessera/errors.hpp"
#include "tessera/nn/loss.hpp"

namespace tessera::nn {

namespace {

struct StepTape {
    Vector x, h_prev, c_prev;
    Vector f, i, o, g, c, tanh_c;
};

StepTape step_with_tape(const GateBlock& p, const Vector& x, const CellState& s) {
    StepTape t;
    t.x = x;
    t.h_prev = s.h;
    t.c_prev = s.c;
    t.f = sigmoid((p.w[kForget] * x + p.r[kForget] * s.h + p.b[kForget]).array());
    t.i = sigmoid((p.w[kInput] * x + p.r[kInput] * s.h + p.b[kInput]).array());
    t.o = sigmoid((p.w[kOutput] * x + p.r[kOutput] * s.h + p.b[kOutput]).array());
    t.g = (p.w[kCandidate] * x + p.r[kCandidate] * s.h + p.b[kCandidate]).array().tanh();
    t.c = (t.f.array() * s.c.array() + t.i.array() * t.g.array()).matrix();
    t.tanh_c = t.c.array().tanh().matrix();
    return t;
}

std::uint64_t gate_forward_macs(int hidden, int input) {
    // four gates of (W x + R h + b) plus the cell/hidden elementwise products
    return 4ull * hidden * (input + hidden) + 3ull * hidden;
}

}  // namespace

CellState lstm_step(const GateBlock& p, const Vector& x, const CellState& s) {
    if (!x.allFinite()) throw NumericError("lstm_step: non-finite input");
    if (p.w[kForget].cols() != x.size() || p.r[kForget].cols() != s.h.size() ||
        s.h.size() != s.c.size())
        throw InvalidArgument("lstm_step: shape mismatch");
    const StepTape t = step_with_tape(p, x, s);
    return {(t.o.array() * t.tanh_c.array()).matrix(), t.c};
}

LstmModel::LstmModel(int input, int hidden, int layers, std::uint64_t seed)
    : input_(input), hidden_(hidden), layers_(layers) {
    if (input < 1 || hidden < 1 || layers < 1) throw InvalidArgument("lstm: bad dimensions");
    Rng rng(mix_seed(seed));
    cells.resize(layers);
    for (int l = 0; l < layers; ++l)
        init_gate_block(cells[l], hidden, l == 0 ? input : hidden, rng);
    w_out.resize(1, hidden);
    glorot_fill(w_out, hidden, 1, rng);
    b_out = Vector::Zero(1);
}

std::vector<TensorRef> LstmModel::tensors() {
    std::vector<TensorRef> out;
    for (int l = 0; l < layers_; ++l)
        append_gate_tensors(out, cells[l], "layer" + std::to_string(l) + ".");
    out.push_back({"head.w", w_out.data(), 1, hidden_, nullptr});
    out.push_back({"head.b", b_out.data(), 1, 1, nullptr});
    return out;
}

std::unique_ptr<SequenceModel> LstmModel::clone() const {
    return std::make_unique<LstmModel>(*this);
}

std::unique_ptr<SequenceModel> LstmModel::zeros_like() const {
    auto z = std::make_unique<LstmModel>(*this);
    for (auto& cell : z->cells)
        for (int g = 0; g < 4; ++g) {
            cell.w[g].setZero();
            cell.r[g].setZero();
            cell.b[g].setZero();
        }
    z->w_out.setZero();
    z->b_out.setZero();
    return z;
}

Vector LstmModel::forward(const Matrix& window, OpCounter* ops) const {
    if (window.cols() != input_) throw InvalidArgument("lstm forward: window width mismatch");
    const int steps = static_cast<int>(window.rows());
    std::vector<CellState> state(layers_, {Vector::Zero(hidden_), Vector::Zero(hidden_)});
    for (int t = 0; t < steps; ++t) {
        Vector x = window.row(t).transpose();
        for (int l = 0; l < layers_; ++l) {
            state[l] = lstm_step(cells[l], x, state[l]);
            x = state[l].h;
            if (ops) ops->forward_macs += gate_forward_macs(hidden_, l == 0 ? input_ : hidden_);
        }
    }
    const Vector z = w_out * state[layers_ - 1].h + b_out;
    if (ops) ops->forward_macs += static_cast<std::uint64_t>(hidden_) + 1;
    return z.array().max(0.0).matrix();
}

double LstmModel::accumulate_gradients(const Sample& sample, SequenceModel& grads, double dropout,
                                       Rng* rng, OpCounter* ops) {
    auto& g = dynamic_cast<LstmModel&>(grads);
    const int steps = static_cast<int>(sample.window.rows());
    if (steps < 1) throw InvalidArgument("lstm: empty window");
    const bool use_dropout = dropout > 0.0 && rng != nullptr && layers_ > 1;
    const double keep = 1.0 - dropout;

    // forward with tape
    std::vector<std::vector<StepTape>> tape(layers_);
    std::vector<std::vector<Vector>> drop_mask(layers_ - 1);
    std::vector<CellState> state(layers_, {Vector::Zero(hidden_), Vector::Zero(hidden_)});
    for (int l = 0; l < layers_; ++l) tape[l].reserve(steps);
    for (int t = 0; t < steps; ++t) {
        Vector x = sample.window.row(t).transpose();
        for (int l = 0; l < layers_; ++l) {
            tape[l].push_back(step_with_tape(cells[l], x, state[l]));
            const StepTape& st = tape[l].back();
            state[l].c = st.c;
            state[l].h = (st.o.array() * st.tanh_c.array()).matrix();
            x = state[l].h;
            if (ops) ops->forward_macs += gate_forward_macs(hidden_, l == 0 ? input_ : hidden_);
            if (l + 1 < layers_ && use_dropout) {
                Vector mask(hidden_);
                for (int u = 0; u < hidden_; ++u)
                    mask(u) = rng->uniform() < dropout ? 0.0 : 1.0 / keep;
                drop_mask[l].push_back(mask);
                x = (x.array() * mask.array()).matrix();
            }
        }
    }

    const Vector z = w_out * state[layers_ - 1].h + b_out;
    const Vector y_hat = z.array().max(0.0).matrix();
    const double loss = compute_loss(sample.target, y_hat);

    // head backward
    Vector dz = loss_gradient(sample.target, y_hat);
    for (Eigen::Index u = 0; u < dz.size(); ++u)
        if (z(u) <= 0.0) dz(u) = 0.0;
    g.w_out.noalias() += dz * state[layers_ - 1].h.transpose();
    g.b_out += dz;
    if (ops) ops->backward_macs += 2ull * hidden_;

    // reverse sweep, top layer first; dout[t] = gradient w.r.t. layer output
    std::vector<Vector> dout(steps, Vector::Zero(hidden_));
    dout[steps - 1] = w_out.transpose() * dz;
    for (int l = layers_ - 1; l >= 0; --l) {
        const int in_dim = l == 0 ? input_ : hidden_;
        std::vector<Vector> dx(steps);
        Vector dh_carry = Vector::Zero(hidden_);
        Vector dc_carry = Vector::Zero(hidden_);
        for (int t = steps - 1; t >= 0; --t) {
            const StepTape& st = tape[l][t];
            const Eigen::ArrayXd dh = dout[t].array() + dh_carry.array();
            const Eigen::ArrayXd d_o = dh * st.tanh_c.array();
            const Eigen::ArrayXd da_o = d_o * st.o.array() * (1.0 - st.o.array());
            const Eigen::ArrayXd dc =
                dc_carry.array() + dh * st.o.array() * (1.0 - st.tanh_c.array().square());
            const Eigen::ArrayXd da_f =
                dc * st.c_prev.array() * st.f.array() * (1.0 - st.f.array());
            const Eigen::ArrayXd da_i = dc * st.g.array() * st.i.array() * (1.0 - st.i.array());
            const Eigen::ArrayXd da_g = dc * st.i.array() * (1.0 - st.g.array().square());
            dc_carry = (dc * st.f.array()).matrix();

            const Vector va_f = da_f.matrix(), va_i = da_i.matrix(), va_o = da_o.matrix(),
                         va_g = da_g.matrix();
            GateBlock& gb = g.cells[l];
            const GateBlock& pb = cells[l];
            gb.w[kForget].noalias() += va_f * st.x.transpose();
            gb.w[kInput].noalias() += va_i * st.x.transpose();
            gb.w[kOutput].noalias() += va_o * st.x.transpose();
            gb.w[kCandidate].noalias() += va_g * st.x.transpose();
            gb.r[kForget].noalias() += va_f * st.h_prev.transpose();
            gb.r[kInput].noalias() += va_i * st.h_prev.transpose();
            gb.r[kOutput].noalias() += va_o * st.h_prev.transpose();
            gb.r[kCandidate].noalias() += va_g * st.h_prev.transpose();
            gb.b[kForget] += va_f;
            gb.b[kInput] += va_i;
            gb.b[kOutput] += va_o;
            gb.b[kCandidate] += va_g;

            dx[t] = pb.w[kForget].transpose() * va_f + pb.w[kInput].transpose() * va_i +
                    pb.w[kOutput].transpose() * va_o + pb.w[kCandidate].transpose() * va_g;
            dh_carry = pb.r[kForget].transpose() * va_f + pb.r[kInput].transpose() * va_i +
                       pb.r[kOutput].transpose() * va_o + pb.r[kCandidate].transpose() * va_g;
            if (ops) ops->backward_macs += 2ull * gate_forward_macs(hidden_, in_dim);
        }
        if (l > 0) {
            for (int t = 0; t < steps; ++t) {
                if (use_dropout)
                    dout[t] = (dx[t].array() * drop_mask[l - 1][t].array()).matrix();
                else
                    dout[t] = dx[t];
            }
        }
    }
    return loss;
}

}  // namespace tessera::nn
