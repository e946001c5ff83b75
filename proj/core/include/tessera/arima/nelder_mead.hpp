#pragma once

#include <functional>

#include <Eigen/Core>

namespace tessera::arima {

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    int max_iterations = 500;
    double tolerance = 1e-8;  // relative f-spread of the simplex
    double initial_step = 0.1;
};

struct NelderMeadResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Downhill-simplex minimization; deterministic for a given start point.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& start, const NelderMeadOptions& opt = {});

}  // namespace tessera::arima
