#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace tessera::hedge {

/// Discounted-HEDGE weights over a pool of forecasting experts.
struct HedgeState {
    Eigen::VectorXd weights;  // positive, normalized to sum 1
    double gamma = 0.9;       // discount exponent, (0, 1]
    double beta = 0.5;        // learning factor, (0, 1)
    std::vector<std::string> expert_ids;
};

/// w_i = exp(-lambda * loss_i), normalized. Uniform when `validation_losses`
/// is empty.
HedgeState init_weights(const std::vector<double>& validation_losses,
                        const std::vector<std::string>& expert_ids, double gamma = 0.9,
                        double beta = 0.5, double lambda = 1.0);

/// One weight update: w_i <- w_i^gamma * beta^(l_i), then renormalize
/// (renormalization does not change the argmax). Losses must be finite and
/// are expected in [0, 1].
void hedge_step(HedgeState& state, const Eigen::VectorXd& losses);

/// Index of the heaviest expert; ties go to the lowest index.
int select_expert(const HedgeState& state);

/// Per-step normalized losses from raw absolute errors:
///   l_i = err_i / (max_j err_j + 1e-9), clamped to [0, 1].
Eigen::VectorXd normalize_losses(const Eigen::VectorXd& raw_errors);

struct SelectionStep {
    int t = 0;
    int selected = 0;
    Eigen::VectorXd weights;  // weights used for the selection at t
    Eigen::VectorXd losses;   // normalized losses observed at t
};

struct CombineResult {
    Eigen::MatrixXd forecast;          // N x h, the selected expert's columns
    std::vector<SelectionStep> trace;  // one entry per step
};

/// Online combination over a horizon: at each step emit the argmax expert's
/// forecast for that step, observe the truth, update the weights with the
/// normalized city-mean absolute errors.
///
/// `expert_forecasts` holds one N x h matrix per expert; `truth` is N x h.
CombineResult combine_forecasts(const std::vector<Eigen::MatrixXd>& expert_forecasts,
                                const Eigen::MatrixXd& truth, HedgeState state);

}  // namespace tessera::hedge
