#include "tessera/nn/conv_lstm.hpp"

#include <cmath>

#include "tessera/errors.hpp"
#include "tessera/nn/loss.hpp"

namespace tessera::nn {

namespace {

// 49 valid (pixel, tap) pairs on a 3x3 frame with a same-padded 3x3 kernel
std::uint64_t conv_macs(int ch_in, int k) { return 49ull * ch_in * k; }

std::uint64_t cell_forward_macs(int ch_in, int k) {
    return 4ull * (conv_macs(ch_in, k) + conv_macs(k, k)) + 3ull * 9 * k;
}

struct StepTape {
    Matrix x, h_prev, c_prev;
    Matrix f, i, o, g, c, tanh_c;
};

Matrix gate_preactivation(const ConvGateBlock& p, int gate, const Matrix& x, const Matrix& h) {
    Matrix a = conv3x3(x, p.w[gate], p.c_in, p.k) + conv3x3(h, p.r[gate], p.k, p.k);
    a.rowwise() += p.b[gate].transpose();
    return a;
}

StepTape step_with_tape(const ConvGateBlock& p, const Matrix& x, const ConvState& s) {
    StepTape t;
    t.x = x;
    t.h_prev = s.h;
    t.c_prev = s.c;
    t.f = sigmoid(gate_preactivation(p, kForget, x, s.h).array());
    t.i = sigmoid(gate_preactivation(p, kInput, x, s.h).array());
    t.o = sigmoid(gate_preactivation(p, kOutput, x, s.h).array());
    t.g = gate_preactivation(p, kCandidate, x, s.h).array().tanh();
    t.c = (t.f.array() * s.c.array() + t.i.array() * t.g.array()).matrix();
    t.tanh_c = t.c.array().tanh().matrix();
    return t;
}

/// dInput for conv3x3: scatter dOut back through the bank.
Matrix conv3x3_backward_input(const Matrix& d_out, const Matrix& bank, int ch_in, int k) {
    Matrix d_in = Matrix::Zero(9, ch_in);
    for (int p = 0; p < 9; ++p) {
        const int pr = p / 3, pc = p % 3;
        for (int tap = 0; tap < 9; ++tap) {
            const int qr = pr + tap / 3 - 1, qc = pc + tap % 3 - 1;
            if (qr < 0 || qr > 2 || qc < 0 || qc > 2) continue;
            d_in.row(qr * 3 + qc).noalias() +=
                d_out.row(p) * bank.middleRows(tap * ch_in, ch_in).transpose();
        }
    }
    return d_in;
}

/// dBank for conv3x3.
void conv3x3_backward_bank(const Matrix& input, const Matrix& d_out, Matrix& d_bank, int ch_in) {
    for (int p = 0; p < 9; ++p) {
        const int pr = p / 3, pc = p % 3;
        for (int tap = 0; tap < 9; ++tap) {
            const int qr = pr + tap / 3 - 1, qc = pc + tap % 3 - 1;
            if (qr < 0 || qr > 2 || qc < 0 || qc > 2) continue;
            d_bank.middleRows(tap * ch_in, ch_in).noalias() +=
                input.row(qr * 3 + qc).transpose() * d_out.row(p);
        }
    }
}

void init_conv_block(ConvGateBlock& block, int c_in, int k, Rng& rng) {
    block.c_in = c_in;
    block.k = k;
    for (int g = 0; g < 4; ++g) {
        block.w[g].resize(9 * c_in, k);
        glorot_fill(block.w[g], 9 * c_in, 9 * k, rng);
        block.r[g].resize(9 * k, k);
        glorot_fill(block.r[g], 9 * k, 9 * k, rng);
        block.b[g] = Vector::Zero(k);
    }
    block.b[kForget].setOnes();
}

}  // namespace

Matrix conv3x3(const Matrix& input, const Matrix& bank, int ch_in, int k) {
    if (input.rows() != 9 || input.cols() != ch_in || bank.rows() != 9 * ch_in || bank.cols() != k)
        throw InvalidArgument("conv3x3: shape mismatch");
    Matrix out = Matrix::Zero(9, k);
    for (int p = 0; p < 9; ++p) {
        const int pr = p / 3, pc = p % 3;
        for (int tap = 0; tap < 9; ++tap) {
            const int qr = pr + tap / 3 - 1, qc = pc + tap % 3 - 1;
            if (qr < 0 || qr > 2 || qc < 0 || qc > 2) continue;
            out.row(p).noalias() += input.row(qr * 3 + qc) * bank.middleRows(tap * ch_in, ch_in);
        }
    }
    return out;
}

ConvState convlstm_step(const ConvGateBlock& p, const Matrix& frame, const ConvState& s) {
    if (frame.rows() != 9 || frame.cols() != p.c_in)
        throw InvalidArgument("convlstm_step: frame must be 9 x c_in");
    if (s.h.rows() != 9 || s.h.cols() != p.k || s.c.rows() != 9 || s.c.cols() != p.k)
        throw InvalidArgument("convlstm_step: state must be 9 x k");
    if (!frame.allFinite()) throw NumericError("convlstm_step: non-finite input");
    const StepTape t = step_with_tape(p, frame, s);
    return {(t.o.array() * t.tanh_c.array()).matrix(), t.c};
}

ConvLstmModel::ConvLstmModel(int c_in, int filters, int layers, std::uint64_t seed)
    : c_in_(c_in), k_(filters), layers_(layers) {
    if (c_in < 1 || filters < 1 || layers < 1) throw InvalidArgument("convlstm: bad dimensions");
    Rng rng(mix_seed(seed));
    cells.resize(layers);
    for (int l = 0; l < layers; ++l) init_conv_block(cells[l], l == 0 ? c_in : filters, filters, rng);
    w_out.resize(1, 9 * filters);
    glorot_fill(w_out, 9 * filters, 1, rng);
    b_out = Vector::Zero(1);
}

std::vector<TensorRef> ConvLstmModel::tensors() {
    std::vector<TensorRef> out;
    for (int l = 0; l < layers_; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        ConvGateBlock& cell = cells[l];
        for (int g = 0; g < 4; ++g)
            out.push_back({prefix + "w_" + kGateNames[g], cell.w[g].data(),
                           static_cast<int>(cell.w[g].rows()), static_cast<int>(cell.w[g].cols()),
                           nullptr});
        for (int g = 0; g < 4; ++g)
            out.push_back({prefix + "r_" + kGateNames[g], cell.r[g].data(),
                           static_cast<int>(cell.r[g].rows()), static_cast<int>(cell.r[g].cols()),
                           nullptr});
        for (int g = 0; g < 4; ++g)
            out.push_back({prefix + "b_" + kGateNames[g], cell.b[g].data(),
                           static_cast<int>(cell.b[g].size()), 1, nullptr});
    }
    out.push_back({"head.w", w_out.data(), 1, 9 * k_, nullptr});
    out.push_back({"head.b", b_out.data(), 1, 1, nullptr});
    return out;
}

std::unique_ptr<SequenceModel> ConvLstmModel::clone() const {
    return std::make_unique<ConvLstmModel>(*this);
}

std::unique_ptr<SequenceModel> ConvLstmModel::zeros_like() const {
    auto z = std::make_unique<ConvLstmModel>(*this);
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

Matrix ConvLstmModel::frame_from_row(const Eigen::RowVectorXd& row) const {
    // window rows are pixel-major: index = pixel * c_in + channel
    Matrix frame(9, c_in_);
    for (int p = 0; p < 9; ++p)
        for (int ch = 0; ch < c_in_; ++ch) frame(p, ch) = row(p * c_in_ + ch);
    return frame;
}

Vector ConvLstmModel::forward(const Matrix& window, OpCounter* ops) const {
    if (window.cols() != input_dim())
        throw InvalidArgument("convlstm forward: window width mismatch");
    const int steps = static_cast<int>(window.rows());
    std::vector<ConvState> state(layers_, {Matrix::Zero(9, k_), Matrix::Zero(9, k_)});
    for (int t = 0; t < steps; ++t) {
        Matrix x = frame_from_row(window.row(t));
        for (int l = 0; l < layers_; ++l) {
            state[l] = convlstm_step(cells[l], x, state[l]);
            x = state[l].h;
            if (ops) ops->forward_macs += cell_forward_macs(l == 0 ? c_in_ : k_, k_);
        }
    }
    const Matrix& h = state[layers_ - 1].h;
    const Eigen::Map<const Vector> h_flat(h.data(), 9 * k_);
    const Vector z = w_out * h_flat + b_out;
    if (ops) ops->forward_macs += 9ull * k_ + 1;
    return z.array().max(0.0).matrix();
}

double ConvLstmModel::accumulate_gradients(const Sample& sample, SequenceModel& grads,
                                           double dropout, Rng* rng, OpCounter* ops) {
    auto& g = dynamic_cast<ConvLstmModel&>(grads);
    const int steps = static_cast<int>(sample.window.rows());
    if (steps < 1) throw InvalidArgument("convlstm: empty window");
    const bool use_dropout = dropout > 0.0 && rng != nullptr && layers_ > 1;
    const double keep = 1.0 - dropout;

    std::vector<std::vector<StepTape>> tape(layers_);
    std::vector<std::vector<Matrix>> drop_mask(layers_ - 1);
    std::vector<ConvState> state(layers_, {Matrix::Zero(9, k_), Matrix::Zero(9, k_)});
    for (int t = 0; t < steps; ++t) {
        Matrix x = frame_from_row(sample.window.row(t));
        for (int l = 0; l < layers_; ++l) {
            tape[l].push_back(step_with_tape(cells[l], x, state[l]));
            const StepTape& st = tape[l].back();
            state[l].c = st.c;
            state[l].h = (st.o.array() * st.tanh_c.array()).matrix();
            x = state[l].h;
            if (ops) ops->forward_macs += cell_forward_macs(l == 0 ? c_in_ : k_, k_);
            if (l + 1 < layers_ && use_dropout) {
                Matrix mask(9, k_);
                for (int pix = 0; pix < 9; ++pix)
                    for (int f = 0; f < k_; ++f)
                        mask(pix, f) = rng->uniform() < dropout ? 0.0 : 1.0 / keep;
                drop_mask[l].push_back(mask);
                x = (x.array() * mask.array()).matrix();
            }
        }
    }

    const Matrix& h_last = state[layers_ - 1].h;
    const Eigen::Map<const Vector> h_flat(h_last.data(), 9 * k_);
    const Vector z = w_out * h_flat + b_out;
    const Vector y_hat = z.array().max(0.0).matrix();
    const double loss = compute_loss(sample.target, y_hat);

    Vector dz = loss_gradient(sample.target, y_hat);
    for (Eigen::Index u = 0; u < dz.size(); ++u)
        if (z(u) <= 0.0) dz(u) = 0.0;
    g.w_out.noalias() += dz * h_flat.transpose();
    g.b_out += dz;
    if (ops) ops->backward_macs += 2ull * 9 * k_;

    std::vector<Matrix> dout(steps, Matrix::Zero(9, k_));
    {
        const Vector dh_flat = w_out.transpose() * dz;
        dout[steps - 1] = Eigen::Map<const Matrix>(dh_flat.data(), 9, k_);
    }

    for (int l = layers_ - 1; l >= 0; --l) {
        const int in_ch = l == 0 ? c_in_ : k_;
        std::vector<Matrix> dx(steps);
        Matrix dh_carry = Matrix::Zero(9, k_);
        Matrix dc_carry = Matrix::Zero(9, k_);
        for (int t = steps - 1; t >= 0; --t) {
            const StepTape& st = tape[l][t];
            const Eigen::ArrayXXd dh = dout[t].array() + dh_carry.array();
            const Eigen::ArrayXXd da_o =
                dh * st.tanh_c.array() * st.o.array() * (1.0 - st.o.array());
            const Eigen::ArrayXXd dc =
                dc_carry.array() + dh * st.o.array() * (1.0 - st.tanh_c.array().square());
            const Eigen::ArrayXXd da_f =
                dc * st.c_prev.array() * st.f.array() * (1.0 - st.f.array());
            const Eigen::ArrayXXd da_i = dc * st.g.array() * st.i.array() * (1.0 - st.i.array());
            const Eigen::ArrayXXd da_g = dc * st.i.array() * (1.0 - st.g.array().square());
            dc_carry = (dc * st.f.array()).matrix();

            const Matrix ma_f = da_f.matrix(), ma_i = da_i.matrix(), ma_o = da_o.matrix(),
                         ma_g = da_g.matrix();
            ConvGateBlock& gb = g.cells[l];
            const ConvGateBlock& pb = cells[l];
            const Matrix* das[4] = {&ma_f, &ma_i, &ma_o, &ma_g};
            const int gate_ids[4] = {kForget, kInput, kOutput, kCandidate};
            dx[t] = Matrix::Zero(9, in_ch);
            dh_carry.setZero();
            for (int gi = 0; gi < 4; ++gi) {
                const int gate = gate_ids[gi];
                const Matrix& da = *das[gi];
                conv3x3_backward_bank(st.x, da, gb.w[gate], in_ch);
                conv3x3_backward_bank(st.h_prev, da, gb.r[gate], k_);
                gb.b[gate] += da.colwise().sum().transpose();
                dx[t] += conv3x3_backward_input(da, pb.w[gate], in_ch, k_);
                dh_carry += conv3x3_backward_input(da, pb.r[gate], k_, k_);
            }
            if (ops) ops->backward_macs += 2ull * cell_forward_macs(in_ch, k_);
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
