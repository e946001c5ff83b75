#include "tessera/nn/loss.hpp"

#include <cmath>

#include "tessera/errors.hpp"

namespace tessera::nn {

double compute_loss(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() == 0) throw InvalidArgument("compute_loss: empty input");
    if (y.size() != y_hat.size()) throw InvalidArgument("compute_loss: length mismatch");
    const Eigen::ArrayXd e = y.array() - y_hat.array();
    return (e.square() + e.abs()).mean();
}

Eigen::VectorXd loss_gradient(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() == 0) throw InvalidArgument("loss_gradient: empty input");
    if (y.size() != y_hat.size()) throw InvalidArgument("loss_gradient: length mismatch");
    const double inv_n = 1.0 / static_cast<double>(y.size());
    Eigen::VectorXd g(y.size());
    for (Eigen::Index t = 0; t < y.size(); ++t) {
        const double r = y_hat(t) - y(t);
        const double sign = r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
        g(t) = inv_n * (2.0 * r + sign);
    }
    return g;
}

}  // namespace tessera::nn
