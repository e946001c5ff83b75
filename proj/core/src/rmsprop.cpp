#include "tessera/nn/rmsprop.hpp"

#include <cmath>

#include "tessera/errors.hpp"

namespace tessera::nn {

void rmsprop_update(double* theta, const double* grad, double* state, std::size_t size, double lr,
                    double rho, double eps) {
    for (std::size_t i = 0; i < size; ++i) {
        const double g = grad[i];
        state[i] = rho * state[i] + (1.0 - rho) * g * g;
        theta[i] -= lr * g / (std::sqrt(state[i]) + eps);
    }
}

void RmsProp::step(std::vector<TensorRef> params, std::vector<TensorRef> grads, OpCounter* ops) {
    if (params.size() != grads.size()) throw InvalidArgument("rmsprop: tensor list mismatch");
    if (state_.empty()) {
        state_.resize(params.size());
        for (std::size_t i = 0; i < params.size(); ++i) state_[i].assign(params[i].size(), 0.0);
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].size() != grads[i].size() || params[i].size() != state_[i].size())
            throw InvalidArgument("rmsprop: shape mismatch for " + params[i].name);
        rmsprop_update(params[i].data, grads[i].data, state_[i].data(), params[i].size(), lr_,
                       rho_, eps_);
        if (params[i].mask != nullptr) {
            for (std::size_t u = 0; u < params[i].size(); ++u)
                if (params[i].mask[u] == 0.0) params[i].data[u] = 0.0;
        }
        if (ops) ops->update_macs += 3ull * params[i].size();
    }
}

}  // namespace tessera::nn
