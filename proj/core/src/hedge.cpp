#include "tessera/hedge/hedge.hpp"

#include <cmath>

#include "tessera/errors.hpp"

namespace tessera::hedge {

namespace {

void require_params(double gamma, double beta) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw InvalidArgument("hedge: gamma must be in (0, 1]");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("hedge: beta must be in (0, 1)");
}

}  // namespace

HedgeState init_weights(const std::vector<double>& validation_losses,
                        const std::vector<std::string>& expert_ids, double gamma, double beta,
                        double lambda) {
    require_params(gamma, beta);
    const std::size_t k = expert_ids.empty() ? validation_losses.size() : expert_ids.size();
    if (k == 0) throw InvalidArgument("hedge: need at least one expert");
    if (!validation_losses.empty() && validation_losses.size() != k)
        throw InvalidArgument("hedge: loss/expert count mismatch");

    HedgeState state;
    state.gamma = gamma;
    state.beta = beta;
    state.expert_ids = expert_ids;
    if (state.expert_ids.empty())
        for (std::size_t i = 0; i < k; ++i) state.expert_ids.push_back("expert" + std::to_string(i));

    state.weights.resize(static_cast<Eigen::Index>(k));
    if (validation_losses.empty()) {
        state.weights.setConstant(1.0 / static_cast<double>(k));
    } else {
        for (std::size_t i = 0; i < k; ++i) {
            if (!std::isfinite(validation_losses[i]))
                throw InvalidArgument("hedge: non-finite validation loss");
            state.weights(static_cast<Eigen::Index>(i)) = std::exp(-lambda * validation_losses[i]);
        }
        state.weights /= state.weights.sum();
    }
    return state;
}

void hedge_step(HedgeState& state, const Eigen::VectorXd& losses) {
    require_params(state.gamma, state.beta);
    if (losses.size() != state.weights.size())
        throw InvalidArgument("hedge_step: loss count mismatch");
    if (!losses.allFinite()) throw InvalidArgument("hedge_step: non-finite loss");

    for (Eigen::Index i = 0; i < state.weights.size(); ++i)
        state.weights(i) = std::pow(state.weights(i), state.gamma) * std::pow(state.beta, losses(i));
    const double total = state.weights.sum();
    if (total <= 0.0) throw NumericError("hedge_step: weights collapsed to zero");
    state.weights /= total;
}

int select_expert(const HedgeState& state) {
    int best = 0;
    for (Eigen::Index i = 1; i < state.weights.size(); ++i)
        if (state.weights(i) > state.weights(best)) best = static_cast<int>(i);
    return best;
}

Eigen::VectorXd normalize_losses(const Eigen::VectorXd& raw_errors) {
    const double top = raw_errors.maxCoeff() + 1e-9;
    return (raw_errors.array() / top).cwiseMin(1.0).cwiseMax(0.0).matrix();
}

CombineResult combine_forecasts(const std::vector<Eigen::MatrixXd>& expert_forecasts,
                                const Eigen::MatrixXd& truth, HedgeState state) {
    const std::size_t k = expert_forecasts.size();
    if (k == 0) throw InvalidArgument("combine: no experts");
    if (state.weights.size() != static_cast<Eigen::Index>(k))
        throw InvalidArgument("combine: state/expert count mismatch");
    for (const auto& f : expert_forecasts)
        if (f.rows() != truth.rows() || f.cols() != truth.cols())
            throw InvalidArgument("combine: misaligned expert forecasts");

    const int h = static_cast<int>(truth.cols());
    CombineResult result;
    result.forecast.resize(truth.rows(), h);

    for (int t = 0; t < h; ++t) {
        SelectionStep step;
        step.t = t;
        step.selected = select_expert(state);
        step.weights = state.weights;
        result.forecast.col(t) = expert_forecasts[step.selected].col(t);

        Eigen::VectorXd raw(static_cast<Eigen::Index>(k));
        for (std::size_t e = 0; e < k; ++e)
            raw(static_cast<Eigen::Index>(e)) =
                (expert_forecasts[e].col(t) - truth.col(t)).cwiseAbs().mean();
        step.losses = normalize_losses(raw);
        hedge_step(state, step.losses);
        result.trace.push_back(std::move(step));
    }
    return result;
}

}  // namespace tessera::hedge
