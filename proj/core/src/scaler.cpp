#include "tessera/data/scaler.hpp"

#include "tessera/errors.hpp"

namespace tessera::data {

ScalerParams minmax_fit(const Eigen::MatrixXd& values, int fit_end) {
    if (fit_end < 1 || fit_end > values.cols())
        throw InvalidArgument("scaler: fit span must be within the matrix");
    ScalerParams p;
    p.min.resize(values.rows());
    p.max.resize(values.rows());
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
        p.min[r] = values.row(r).head(fit_end).minCoeff();
        p.max[r] = values.row(r).head(fit_end).maxCoeff();
    }
    return p;
}

double minmax_apply_value(double v, const ScalerParams& params, int region) {
    const double lo = params.min[region];
    const double hi = params.max[region];
    if (hi == lo) return 0.0;
    return (v - lo) / (hi - lo);
}

double minmax_invert_value(double v, const ScalerParams& params, int region) {
    const double lo = params.min[region];
    const double hi = params.max[region];
    return lo + v * (hi - lo);
}

Eigen::MatrixXd minmax_apply(const Eigen::MatrixXd& values, const ScalerParams& params) {
    if (static_cast<std::size_t>(values.rows()) != params.min.size())
        throw InvalidArgument("scaler: region count mismatch");
    Eigen::MatrixXd out(values.rows(), values.cols());
    for (Eigen::Index r = 0; r < values.rows(); ++r)
        for (Eigen::Index c = 0; c < values.cols(); ++c)
            out(r, c) = minmax_apply_value(values(r, c), params, static_cast<int>(r));
    return out;
}

Eigen::MatrixXd minmax_invert(const Eigen::MatrixXd& scaled, const ScalerParams& params) {
    if (static_cast<std::size_t>(scaled.rows()) != params.min.size())
        throw InvalidArgument("scaler: region count mismatch");
    Eigen::MatrixXd out(scaled.rows(), scaled.cols());
    for (Eigen::Index r = 0; r < scaled.rows(); ++r)
        for (Eigen::Index c = 0; c < scaled.cols(); ++c)
            out(r, c) = minmax_invert_value(scaled(r, c), params, static_cast<int>(r));
    return out;
}

}  // namespace tessera::data
