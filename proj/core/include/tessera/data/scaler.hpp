#pragma once

#include <vector>

#include <Eigen/Core>

namespace tessera::data {

/// Per-region min/max fitted on the training span only.
struct ScalerParams {
    std::vector<double> min;
    std::vector<double> max;
};

/// Fit on columns [0, fit_end) of an N x T matrix.
ScalerParams minmax_fit(const Eigen::MatrixXd& values, int fit_end);

/// Map each region row to [0, 1]; constant regions (max == min) map to 0.
Eigen::MatrixXd minmax_apply(const Eigen::MatrixXd& values, const ScalerParams& params);
Eigen::MatrixXd minmax_invert(const Eigen::MatrixXd& scaled, const ScalerParams& params);

double minmax_apply_value(double v, const ScalerParams& params, int region);
double minmax_invert_value(double v, const ScalerParams& params, int region);

}  // namespace tessera::data
