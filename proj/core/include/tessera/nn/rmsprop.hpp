#pragma once

#include <vector>

#include <Eigen/Core>

#include "tessera/flops.hpp"
#include "tessera/nn/params.hpp"

namespace tessera::nn {

/// Elementwise RMSprop update:
///   s' = rho * s + (1 - rho) * g^2,  theta' = theta - lr * g / (sqrt(s') + eps).
void rmsprop_update(double* theta, const double* grad, double* state, std::size_t size, double lr,
                    double rho = 0.9, double eps = 1e-8);

/// RMSprop over a model's tensor list; accumulator state is kept per tensor.
/// Off-support entries of masked tensors remain exactly zero.
class RmsProp {
public:
    explicit RmsProp(double lr, double rho = 0.9, double eps = 1e-8)
        : lr_(lr), rho_(rho), eps_(eps) {}

    void step(std::vector<TensorRef> params, std::vector<TensorRef> grads, OpCounter* ops = nullptr);

    double learning_rate() const { return lr_; }

private:
    double lr_, rho_, eps_;
    std::vector<std::vector<double>> state_;
};

}  // namespace tessera::nn
