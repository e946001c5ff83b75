#include "tessera/nn/graph_lstm.hpp"

#include <cmath>

#include "tessera/errors.hpp"
#include "tessera/nn/loss.hpp"

namespace tessera::nn {

namespace {

struct StepTape {
    Vector x, gc, h_prev, c_prev, c_star;
    Vector f, i, o, g, c, tanh_c;
};

StepTape step_with_tape(const GraphLstmLayer& p, const Matrix& a_tilde, const Vector& x,
                        const CellState& s) {
    StepTape t;
    t.x = x;
    t.h_prev = s.h;
    t.c_prev = s.c;
    t.gc = (p.w_gc.array() * a_tilde.array()).matrix() * x;
    const GateBlock& gb = p.gates;
    t.f = sigmoid((gb.w[kForget] * t.gc + gb.r[kForget] * s.h + gb.b[kForget]).array());
    t.i = sigmoid((gb.w[kInput] * t.gc + gb.r[kInput] * s.h + gb.b[kInput]).array());
    t.o = sigmoid((gb.w[kOutput] * t.gc + gb.r[kOutput] * s.h + gb.b[kOutput]).array());
    t.g = (gb.w[kCandidate] * t.gc + gb.r[kCandidate] * s.h + gb.b[kCandidate]).array().tanh();
    t.c_star = (p.w_n.array() * a_tilde.array()).matrix() * s.c;
    t.c = (t.f.array() * t.c_star.array() + t.i.array() * t.g.array()).matrix();
    t.tanh_c = t.c.array().tanh().matrix();
    return t;
}

std::uint64_t cell_forward_macs(int n) {
    // gc + four gates + neighbor cell state + elementwise products
    return static_cast<std::uint64_t>(n) * n + 4ull * n * (n + n) +
           static_cast<std::uint64_t>(n) * n + 3ull * n;
}

void check_support(const Matrix& w, const Matrix& a_tilde, const char* name) {
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            if (a_tilde(i, j) == 0.0 && w(i, j) != 0.0)
                throw Error(std::string("graphlstm: support violation in ") + name);
}

}  // namespace

CellState graphlstm_step(const GraphLstmLayer& p, const Matrix& a_tilde, const Vector& x,
                         const CellState& s) {
    const Eigen::Index n = a_tilde.rows();
    if (a_tilde.cols() != n || x.size() != n || s.h.size() != n || s.c.size() != n ||
        p.w_gc.rows() != n || p.w_gc.cols() != n || p.w_n.rows() != n || p.w_n.cols() != n)
        throw InvalidArgument("graphlstm_step: shape mismatch");
    if (!x.allFinite()) throw NumericError("graphlstm_step: non-finite input");
    check_support(p.w_gc, a_tilde, "w_gc");
    check_support(p.w_n, a_tilde, "w_n");
    const StepTape t = step_with_tape(p, a_tilde, x, s);
    return {(t.o.array() * t.tanh_c.array()).matrix(), t.c};
}

GraphLstmModel::GraphLstmModel(Matrix a_tilde, int layers, std::uint64_t seed)
    : a_tilde_(std::move(a_tilde)), n_(static_cast<int>(a_tilde_.rows())), layers_(layers) {
    if (a_tilde_.rows() != a_tilde_.cols() || n_ < 1)
        throw InvalidArgument("graphlstm: adjacency must be square");
    if (layers < 1) throw InvalidArgument("graphlstm: bad layer count");
    for (Eigen::Index i = 0; i < n_; ++i)
        if (a_tilde_(i, i) != 1.0)
            throw InvalidArgument("graphlstm: augmented adjacency needs a unit diagonal");

    Rng rng(mix_seed(seed));
    cells.resize(layers);
    for (int l = 0; l < layers; ++l) {
        GraphLstmLayer& cell = cells[l];
        cell.w_gc.resize(n_, n_);
        glorot_fill(cell.w_gc, n_, n_, rng);
        init_gate_block(cell.gates, n_, n_, rng);
        cell.w_n.resize(n_, n_);
        glorot_fill(cell.w_n, n_, n_, rng);
    }
    w_out.resize(n_, n_);
    glorot_fill(w_out, n_, n_, rng);
    b_out = Vector::Zero(n_);
    apply_masks();
}

void GraphLstmModel::apply_masks() {
    for (auto& cell : cells) {
        cell.w_gc = (cell.w_gc.array() * a_tilde_.array()).matrix();
        cell.w_n = (cell.w_n.array() * a_tilde_.array()).matrix();
    }
}

std::vector<TensorRef> GraphLstmModel::tensors() {
    std::vector<TensorRef> out;
    for (int l = 0; l < layers_; ++l) {
        const std::string prefix = "layer" + std::to_string(l) + ".";
        GraphLstmLayer& cell = cells[l];
        out.push_back({prefix + "w_gc", cell.w_gc.data(), n_, n_, a_tilde_.data()});
        append_gate_tensors(out, cell.gates, prefix);
        out.push_back({prefix + "w_n", cell.w_n.data(), n_, n_, a_tilde_.data()});
    }
    out.push_back({"head.w", w_out.data(), n_, n_, nullptr});
    out.push_back({"head.b", b_out.data(), n_, 1, nullptr});
    return out;
}

std::unique_ptr<SequenceModel> GraphLstmModel::clone() const {
    return std::make_unique<GraphLstmModel>(*this);
}

std::unique_ptr<SequenceModel> GraphLstmModel::zeros_like() const {
    auto z = std::make_unique<GraphLstmModel>(*this);
    for (auto& cell : z->cells) {
        cell.w_gc.setZero();
        cell.w_n.setZero();
        for (int g = 0; g < 4; ++g) {
            cell.gates.w[g].setZero();
            cell.gates.r[g].setZero();
            cell.gates.b[g].setZero();
        }
    }
    z->w_out.setZero();
    z->b_out.setZero();
    return z;
}

Vector GraphLstmModel::forward(const Matrix& window, OpCounter* ops) const {
    if (window.cols() != n_) throw InvalidArgument("graphlstm forward: window width mismatch");
    const int steps = static_cast<int>(window.rows());
    std::vector<CellState> state(layers_, {Vector::Zero(n_), Vector::Zero(n_)});
    for (int t = 0; t < steps; ++t) {
        Vector x = window.row(t).transpose();
        for (int l = 0; l < layers_; ++l) {
            const StepTape st = step_with_tape(cells[l], a_tilde_, x, state[l]);
            state[l].c = st.c;
            state[l].h = (st.o.array() * st.tanh_c.array()).matrix();
            x = state[l].h;
            if (ops) ops->forward_macs += cell_forward_macs(n_);
        }
    }
    const Vector z = w_out * state[layers_ - 1].h + b_out;
    if (ops) ops->forward_macs += static_cast<std::uint64_t>(n_) * n_ + n_;
    return z.array().max(0.0).matrix();
}

double GraphLstmModel::accumulate_gradients(const Sample& sample, SequenceModel& grads,
                                            double dropout, Rng* rng, OpCounter* ops) {
    auto& g = dynamic_cast<GraphLstmModel&>(grads);
    const int steps = static_cast<int>(sample.window.rows());
    if (steps < 1) throw InvalidArgument("graphlstm: empty window");
    const bool use_dropout = dropout > 0.0 && rng != nullptr && layers_ > 1;
    const double keep = 1.0 - dropout;

    std::vector<std::vector<StepTape>> tape(layers_);
    std::vector<std::vector<Vector>> drop_mask(layers_ - 1);
    std::vector<CellState> state(layers_, {Vector::Zero(n_), Vector::Zero(n_)});
    for (int t = 0; t < steps; ++t) {
        Vector x = sample.window.row(t).transpose();
        for (int l = 0; l < layers_; ++l) {
            tape[l].push_back(step_with_tape(cells[l], a_tilde_, x, state[l]));
            const StepTape& st = tape[l].back();
            state[l].c = st.c;
            state[l].h = (st.o.array() * st.tanh_c.array()).matrix();
            x = state[l].h;
            if (ops) ops->forward_macs += cell_forward_macs(n_);
            if (l + 1 < layers_ && use_dropout) {
                Vector mask(n_);
                for (int u = 0; u < n_; ++u) mask(u) = rng->uniform() < dropout ? 0.0 : 1.0 / keep;
                drop_mask[l].push_back(mask);
                x = (x.array() * mask.array()).matrix();
            }
        }
    }

    const Vector z = w_out * state[layers_ - 1].h + b_out;
    const Vector y_hat = z.array().max(0.0).matrix();
    const double loss = compute_loss(sample.target, y_hat);

    Vector dz = loss_gradient(sample.target, y_hat);
    for (Eigen::Index u = 0; u < dz.size(); ++u)
        if (z(u) <= 0.0) dz(u) = 0.0;
    g.w_out.noalias() += dz * state[layers_ - 1].h.transpose();
    g.b_out += dz;
    if (ops) ops->backward_macs += 2ull * n_ * n_;

    std::vector<Vector> dout(steps, Vector::Zero(n_));
    dout[steps - 1] = w_out.transpose() * dz;

    for (int l = layers_ - 1; l >= 0; --l) {
        std::vector<Vector> dx(steps);
        Vector dh_carry = Vector::Zero(n_);
        Vector dc_carry = Vector::Zero(n_);
        for (int t = steps - 1; t >= 0; --t) {
            const StepTape& st = tape[l][t];
            const Eigen::ArrayXd dh = dout[t].array() + dh_carry.array();
            const Eigen::ArrayXd da_o = dh * st.tanh_c.array() * st.o.array() * (1.0 - st.o.array());
            const Eigen::ArrayXd dc =
                dc_carry.array() + dh * st.o.array() * (1.0 - st.tanh_c.array().square());
            const Eigen::ArrayXd da_f =
                dc * st.c_star.array() * st.f.array() * (1.0 - st.f.array());
            const Eigen::ArrayXd da_i = dc * st.g.array() * st.i.array() * (1.0 - st.i.array());
            const Eigen::ArrayXd da_g = dc * st.i.array() * (1.0 - st.g.array().square());
            const Vector dc_star = (dc * st.f.array()).matrix();

            const Vector va_f = da_f.matrix(), va_i = da_i.matrix(), va_o = da_o.matrix(),
                         va_g = da_g.matrix();
            GraphLstmLayer& gl = g.cells[l];
            const GraphLstmLayer& pl = cells[l];

            // neighbor cell-state path: c* = (w_n . A~) c_prev
            gl.w_n.noalias() += dc_star * st.c_prev.transpose();
            dc_carry = (pl.w_n.array() * a_tilde_.array()).matrix().transpose() * dc_star;

            GateBlock& gb = gl.gates;
            const GateBlock& pb = pl.gates;
            gb.w[kForget].noalias() += va_f * st.gc.transpose();
            gb.w[kInput].noalias() += va_i * st.gc.transpose();
            gb.w[kOutput].noalias() += va_o * st.gc.transpose();
            gb.w[kCandidate].noalias() += va_g * st.gc.transpose();
            gb.r[kForget].noalias() += va_f * st.h_prev.transpose();
            gb.r[kInput].noalias() += va_i * st.h_prev.transpose();
            gb.r[kOutput].noalias() += va_o * st.h_prev.transpose();
            gb.r[kCandidate].noalias() += va_g * st.h_prev.transpose();
            gb.b[kForget] += va_f;
            gb.b[kInput] += va_i;
            gb.b[kOutput] += va_o;
            gb.b[kCandidate] += va_g;

            const Vector dgc = pb.w[kForget].transpose() * va_f + pb.w[kInput].transpose() * va_i +
                               pb.w[kOutput].transpose() * va_o +
                               pb.w[kCandidate].transpose() * va_g;
            gl.w_gc.noalias() += dgc * st.x.transpose();
            dx[t] = (pl.w_gc.array() * a_tilde_.array()).matrix().transpose() * dgc;
            dh_carry = pb.r[kForget].transpose() * va_f + pb.r[kInput].transpose() * va_i +
                       pb.r[kOutput].transpose() * va_o + pb.r[kCandidate].transpose() * va_g;
            if (ops) ops->backward_macs += 2ull * cell_forward_macs(n_);
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

    // masked parameters receive masked gradients
    for (auto& cell : g.cells) {
        cell.w_gc = (cell.w_gc.array() * a_tilde_.array()).matrix();
        cell.w_n = (cell.w_n.array() * a_tilde_.array()).matrix();
    }
    return loss;
}

}  // namespace tessera::nn
