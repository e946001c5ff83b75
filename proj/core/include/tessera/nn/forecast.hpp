#pragma once

#include <Eigen/Core>

#include "tessera/nn/checkpoint.hpp"

namespace tessera::nn {

/// Recursive one-step multi-step forecast: predict every region for the next
/// step, append the (scaled) predictions to the rolling window, repeat h
/// times. `history_counts` is the unscaled N x T history; the result is the
/// unscaled N x h forecast, clamped at zero.
///
/// The window length, scaler and spatial wiring come from the checkpoint;
/// `model` must be the checkpoint's instantiated model.
Eigen::MatrixXd predict_horizon(const Checkpoint& ckpt, const SequenceModel& model,
                                const Eigen::MatrixXd& history_counts, int h,
                                OpCounter* ops = nullptr);

}  // namespace tessera::nn
