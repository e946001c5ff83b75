#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace tessera::metrics {

/// SMAPE = (100/h) * sum_t |y_t - yhat_t| / (yhat_t + y_t + 1).
/// The +1 in the denominator guards the zero-demand case.
double smape(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

/// MASE: mean absolute test error scaled by the in-sample seasonal-naive
/// mean absolute error with period m. Throws UndefinedMetricError when the
/// training series is perfectly m-periodic (zero denominator).
double mase(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_hat,
            const Eigen::VectorXd& y_train, int m);

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat);

struct ForecastEvaluation {
    double smape = 0.0;
    double mase = 0.0;
    double rmse = 0.0;
    bool mase_defined = true;
    int horizon = 0;
    int seasonal_period = 0;
    int train_length = 0;
};

ForecastEvaluation evaluate_forecast(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_hat,
                                     const Eigen::VectorXd& y_train, int m);

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
    int count = 0;
};

/// Mean and (population) standard deviation, the aggregation used in reports.
MeanStd mean_std(const std::vector<double>& values);

}  // namespace tessera::metrics
