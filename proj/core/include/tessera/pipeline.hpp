#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tessera/arima/arima.hpp"
#include "tessera/data/features.hpp"
#include "tessera/data/scaler.hpp"
#include "tessera/data/series.hpp"
#include "tessera/data/split.hpp"
#include "tessera/metrics/metrics.hpp"
#include "tessera/nn/checkpoint.hpp"
#include "tessera/nn/forecast.hpp"
#include "tessera/nn/train.hpp"

namespace tessera::pipeline {

/// A series matrix bound to its tessellation, split, scaler and spatial
/// feature wiring; the unit every training/evaluation step operates on.
struct Experiment {
    data::SeriesMatrix series;
    geo::Tessellation tessellation;
    data::SplitIndices split;
    data::ScalerParams scaler;   // fitted on [0, split.train_end)
    Eigen::MatrixXd scaled;      // full span scaled with the training params
    data::FeatureSpec features;  // correlation-ranked channels (train span)
    std::vector<std::array<int, 9>> frames;  // geohash lattice only
    int seasonal_period = 24;

    int test_horizon() const { return split.test_end - split.test_begin; }
    Eigen::MatrixXd history_counts() const {  // everything before the test day
        return series.values.leftCols(split.test_begin);
    }
    Eigen::MatrixXd test_counts() const {
        return series.values.middleCols(split.test_begin, test_horizon());
    }
};

Experiment prepare_experiment(data::SeriesMatrix series, geo::Tessellation tessellation,
                              const data::SplitSpec& split_spec, int neighbor_cap = 8,
                              int seasonal_period = 24);

/// Windowed samples for one model family. Train targets lie inside the
/// train span, validation targets inside the validation span (their windows
/// may reach back into train).
nn::SampleSet build_samples(const Experiment& e, const std::string& kind, int lookback);

struct RepeatMetrics {
    int repeat = 0;
    double validation_loss = 0.0;
    metrics::MeanStd smape;  // across regions
    metrics::MeanStd mase;
    metrics::MeanStd rmse;
};

struct TrainOutcome {
    nn::Checkpoint checkpoint;  // best repeat by validation loss
    int best_repeat = 0;
    std::vector<RepeatMetrics> repeats;
    // pooled across regions and repeats
    metrics::MeanStd smape;
    metrics::MeanStd mase;
    metrics::MeanStd rmse;
};

/// Train `kind` (lstm | convlstm | graphlstm) with the configured number of
/// repeats on derived seeds; the best-validation repeat's weights are kept
/// and test metrics are aggregated over regions and repeats.
TrainOutcome train_model(const std::string& kind, const Experiment& e, nn::TrainConfig cfg,
                         const std::string& config_hash);

struct EvaluationRow {
    std::string region;  // region id or "ALL"
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
};

/// Per-region SMAPE/MASE/RMSE of an N x h forecast over the test span plus
/// city-aggregate rows (mean +- std across regions).
std::vector<EvaluationRow> evaluate_on_test(const Experiment& e, const Eigen::MatrixXd& forecast,
                                            const std::string& model_name);

/// City-wide linear baseline: one coefficient set over all regions
/// (concatenated segments, residual recursion reset at boundaries), optional
/// neighbor covariates (ARIMAX).
struct CityArima {
    arima::ArimaModel model;
    std::vector<arima::CovariateSet> covariates;  // per region; empty for plain ARIMA
    int covariate_cap = 0;
};

CityArima fit_city_arima(const Experiment& e, bool with_covariates, int covariate_cap = 8,
                         const arima::ArimaOrder* forced_order = nullptr);

/// Per-region forecast matrix (N x h) from a fitted city model; ARIMAX uses
/// the true test-span covariates.
Eigen::MatrixXd forecast_city_arima(const CityArima& city, const Experiment& e, int history_end,
                                    int h);

std::string city_arima_to_json(const CityArima& city, std::uint64_t seed,
                               const std::string& config_hash);
CityArima city_arima_from_json(const std::string& text);

/// Forecast any saved expert (NN checkpoint or ARIMA/ARIMAX model JSON) over
/// [history_end, history_end + h). Used by evaluate/forecast/hedge.
Eigen::MatrixXd forecast_expert_file(const std::string& path, const Experiment& e,
                                     int history_end, int h);

/// City-mean absolute error of an expert over the validation span; hedge
/// initialization uses these.
double expert_validation_loss(const std::string& path, const Experiment& e);

}  // namespace tessera::pipeline
