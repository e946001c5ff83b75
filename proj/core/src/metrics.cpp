#include "tessera/metrics/metrics.hpp"

#include <cmath>
#include <limits>

#include "tessera/errors.hpp"

namespace tessera::metrics {

double smape(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() != y_hat.size()) throw InvalidArgument("smape: length mismatch");
    if (y.size() == 0) throw InvalidArgument("smape: empty input");
    double acc = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t)
        acc += std::abs(y(t) - y_hat(t)) / (y_hat(t) + y(t) + 1.0);
    return 100.0 * acc / static_cast<double>(y.size());
}

double mase(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_hat,
            const Eigen::VectorXd& y_train, int m) {
    if (y_test.size() != y_hat.size()) throw InvalidArgument("mase: length mismatch");
    if (y_test.size() == 0) throw InvalidArgument("mase: empty input");
    if (m < 1) throw InvalidArgument("mase: period must be >= 1");
    const int n = static_cast<int>(y_train.size());
    if (n <= m) throw InvalidArgument("mase: training series shorter than the period");

    double naive = 0.0;
    for (int t = m; t < n; ++t) naive += std::abs(y_train(t) - y_train(t - m));
    naive /= static_cast<double>(n - m);
    if (naive <= 0.0)
        throw UndefinedMetricError("mase: seasonal-naive in-sample error is zero");

    double err = 0.0;
    for (Eigen::Index t = 0; t < y_test.size(); ++t) err += std::abs(y_test(t) - y_hat(t));
    err /= static_cast<double>(y_test.size());
    return err / naive;
}

double rmse(const Eigen::VectorXd& y, const Eigen::VectorXd& y_hat) {
    if (y.size() != y_hat.size()) throw InvalidArgument("rmse: length mismatch");
    if (y.size() == 0) throw InvalidArgument("rmse: empty input");
    return std::sqrt((y - y_hat).squaredNorm() / static_cast<double>(y.size()));
}

ForecastEvaluation evaluate_forecast(const Eigen::VectorXd& y_test, const Eigen::VectorXd& y_hat,
                                     const Eigen::VectorXd& y_train, int m) {
    ForecastEvaluation e;
    e.horizon = static_cast<int>(y_test.size());
    e.seasonal_period = m;
    e.train_length = static_cast<int>(y_train.size());
    e.smape = smape(y_test, y_hat);
    e.rmse = rmse(y_test, y_hat);
    try {
        e.mase = mase(y_test, y_hat, y_train, m);
    } catch (const UndefinedMetricError&) {
        e.mase = std::numeric_limits<double>::quiet_NaN();
        e.mase_defined = false;
    }
    return e;
}

MeanStd mean_std(const std::vector<double>& values) {
    MeanStd r;
    r.count = static_cast<int>(values.size());
    if (values.empty()) return r;
    double sum = 0.0;
    for (double v : values) sum += v;
    r.mean = sum / values.size();
    double var = 0.0;
    for (double v : values) var += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(var / values.size());
    return r;
}

}  // namespace tessera::metrics
