#pragma once

#include <Eigen/Core>

namespace tessera::nn {

/// Training loss: mean over elements of squared error plus absolute error,
///   L = (1/N) * sum_t [ (y_t - yhat_t)^2 + |y_t - yhat_t| ].
double compute_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

/// dL/dyhat for compute_loss; the |.| subgradient at 0 is taken as 0.
Eigen::VectorXd loss_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

}  // namespace tessera::nn
