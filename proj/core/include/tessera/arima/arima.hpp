#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tessera/geo/tessellation.hpp"

namespace tessera::arima {

struct ArimaOrder {
    int p = 0;
    int d = 0;
    int q = 0;

    void validate() const;  // p, q in [0, 5]; d in [0, 2]
};

/// One fitted segment pair: the target series and optional covariates
/// (rows aligned with the target; one column per covariate series).
struct Segment {
    Eigen::VectorXd y;
    Eigen::MatrixXd z;  // n x n_cov; 0 columns = plain ARIMA
};

/// Neighbor covariates of a region: first-order neighbors with positive
/// Pearson correlation on the training span, strongest first.
struct CovariateSet {
    int region = -1;
    std::vector<int> neighbor_ids;
    std::vector<double> correlations;
    std::vector<std::string> notes;  // e.g. zero-variance exclusions
};

struct ArimaModel {
    ArimaOrder order;
    Eigen::VectorXd ar;      // phi_1..p
    Eigen::VectorXd ma;      // theta_1..q
    double intercept = 0.0;
    Eigen::MatrixXd beta;    // n_cov x 2 covariate coefficients, lags {0, 1}
    double residual_variance = 0.0;
    double css = 0.0;
    double aic = 0.0;
    bool converged = true;
    bool ridge_fallback = false;
    std::vector<std::string> warnings;

    // training tail used by forecast_arima (single-segment fits)
    std::vector<double> tail_levels;     // last value of each differencing level, length d
    std::vector<double> tail_diff;       // last p differenced values
    std::vector<double> tail_residuals;  // last q residuals
    Eigen::VectorXd tail_covariates;     // z at the final training step

    int covariate_count() const { return static_cast<int>(beta.rows()); }

    std::string to_json(const CovariateSet& covariates = {}) const;
    static ArimaModel from_json(const std::string& text, CovariateSet* covariates = nullptr);
};

/// d-fold first differencing; the result is shorter by d.
Eigen::VectorXd difference(const Eigen::VectorXd& series, int d);
/// Inverse of one differencing step given the value preceding the span.
Eigen::VectorXd undifference(const Eigen::VectorXd& diffed, double first_value);

/// Smallest d in {0, 1, 2} whose d-differenced series has lag-1
/// autocorrelation below 0.95 (undefined ACF counts as stationary).
int select_difference_order(const Eigen::VectorXd& series);

/// Conditional-sum-of-squares fit: least-squares seed for the AR/covariate
/// part, Nelder-Mead refinement of (intercept, phi, theta, beta). Residual
/// recursion is seeded at zero. Throws FitError on optimizer failure;
/// explosive/non-invertible fits are returned with a warning.
ArimaModel fit_arima(const Eigen::VectorXd& series, const ArimaOrder& order);
ArimaModel fit_arimax(const Eigen::VectorXd& series, const Eigen::MatrixXd& covariates,
                      const ArimaOrder& order);

/// City-wide variant: one coefficient set over per-region segments with the
/// residual recursion reset at segment boundaries.
ArimaModel fit_pooled(const std::vector<Segment>& segments, const ArimaOrder& order);

/// AIC grid search over p, q in [0, 5] at fixed d. Failed cells are skipped;
/// ties prefer smaller p + q, then smaller p.
ArimaOrder select_order(const Eigen::VectorXd& series, int d);

CovariateSet select_covariates(int region, const geo::Tessellation& tessellation,
                               const Eigen::MatrixXd& counts, int train_end, int cap = 8);

/// Iterated-expectation forecast: future residuals are zero, differencing is
/// inverted, and the result is clamped at zero. ARIMAX needs the future
/// covariate rows (h x n_cov).
Eigen::VectorXd forecast_arima(const ArimaModel& model, int h,
                               const Eigen::MatrixXd& future_covariates = {});

/// Forecast from an explicit history (used with city-wide models where the
/// tail inside `model` belongs to another region).
Eigen::VectorXd forecast_with_history(const ArimaModel& model, const Eigen::VectorXd& history,
                                      const Eigen::MatrixXd& covariate_history,
                                      const Eigen::MatrixXd& future_covariates, int h);

}  // namespace tessera::arima
