#include "tessera/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tessera/errors.hpp"
#include "tessera/nn/conv_lstm.hpp"
#include "tessera/nn/graph_lstm.hpp"
#include "tessera/nn/lstm.hpp"

namespace tessera::pipeline {

using nlohmann::json;

Experiment prepare_experiment(data::SeriesMatrix series, geo::Tessellation tessellation,
                              const data::SplitSpec& split_spec, int neighbor_cap,
                              int seasonal_period) {
    if (series.n() != tessellation.n())
        throw InvalidArgument("experiment: series and tessellation disagree on region count");
    Experiment e;
    e.split = data::split_series(series.t(), series.bins_per_day(), split_spec);
    e.scaler = data::minmax_fit(series.values, e.split.fit_end());
    e.scaled = data::minmax_apply(series.values, e.scaler);
    e.features =
        data::build_feature_spec(series.values, tessellation, e.split.fit_end(), neighbor_cap);
    if (tessellation.scheme == geo::Tessellation::Scheme::kGeohash)
        e.frames = data::build_frame_spec(tessellation);
    e.seasonal_period = seasonal_period;
    e.series = std::move(series);
    e.tessellation = std::move(tessellation);
    return e;
}

namespace {

nn::Sample lstm_sample(const Experiment& e, int region, int target, int lookback) {
    const auto& ch = e.features.channels[region];
    nn::Matrix window(lookback, static_cast<int>(ch.size()));
    for (std::size_t c = 0; c < ch.size(); ++c) {
        for (int t = 0; t < lookback; ++t) {
            const int col = target - lookback + t;
            if (ch[c] == data::kSentinelChannel)
                window(t, static_cast<int>(c)) = -1.0;
            else if (ch[c] == data::kZeroChannel)
                window(t, static_cast<int>(c)) = 0.0;
            else
                window(t, static_cast<int>(c)) = e.scaled(ch[c], col);
        }
    }
    nn::Vector y(1);
    y(0) = e.scaled(region, target);
    return {std::move(window), std::move(y)};
}

nn::Sample conv_sample(const Experiment& e, int region, int target, int lookback) {
    nn::Matrix window(lookback, 9);
    for (int p = 0; p < 9; ++p) {
        const int src = e.frames[region][p];
        for (int t = 0; t < lookback; ++t)
            window(t, p) = src < 0 ? 0.0 : e.scaled(src, target - lookback + t);
    }
    nn::Vector y(1);
    y(0) = e.scaled(region, target);
    return {std::move(window), std::move(y)};
}

nn::Sample graph_sample(const Experiment& e, int target, int lookback) {
    return {e.scaled.middleCols(target - lookback, lookback).transpose(),
            e.scaled.col(target)};
}

}  // namespace

nn::SampleSet build_samples(const Experiment& e, const std::string& kind, int lookback) {
    if (kind == "convlstm" && e.frames.empty())
        throw InvalidArgument("convlstm needs a geohash tessellation");
    nn::SampleSet set;
    const int n = e.series.n();
    const auto emit = [&](int begin, int end, std::vector<nn::Sample>& out) {
        for (int target = std::max(begin, lookback); target < end; ++target) {
            if (kind == "graphlstm") {
                out.push_back(graph_sample(e, target, lookback));
            } else {
                for (int r = 0; r < n; ++r)
                    out.push_back(kind == "lstm" ? lstm_sample(e, r, target, lookback)
                                                 : conv_sample(e, r, target, lookback));
            }
        }
    };
    emit(e.split.train_begin, e.split.train_end, set.train);
    emit(e.split.val_begin, e.split.val_end, set.validation);
    return set;
}

namespace {

nn::ModelFactory make_factory(const std::string& kind, const Experiment& e,
                              const nn::TrainConfig& cfg) {
    if (kind == "lstm") {
        const int channels = e.features.channel_count();
        return [channels, &cfg](std::uint64_t seed) {
            return std::make_unique<nn::LstmModel>(channels, cfg.neurons, cfg.layers, seed);
        };
    }
    if (kind == "convlstm") {
        return [&cfg](std::uint64_t seed) {
            return std::make_unique<nn::ConvLstmModel>(1, cfg.filters, cfg.layers, seed);
        };
    }
    if (kind == "graphlstm") {
        nn::Matrix a_tilde = nn::Matrix::Zero(e.tessellation.n(), e.tessellation.n());
        a_tilde.diagonal().setOnes();
        for (const auto& [i, j] : e.tessellation.edges) {
            a_tilde(i, j) = 1.0;
            a_tilde(j, i) = 1.0;
        }
        return [a_tilde, &cfg](std::uint64_t seed) {
            return std::make_unique<nn::GraphLstmModel>(a_tilde, cfg.layers, seed);
        };
    }
    throw InvalidArgument("unknown model kind '" + kind + "'");
}

nn::Checkpoint make_checkpoint(const std::string& kind, const Experiment& e,
                               const nn::TrainConfig& cfg, const nn::TrainRun& run,
                               std::uint64_t run_seed, const std::string& config_hash) {
    nn::Checkpoint ckpt;
    ckpt.kind = kind;
    ckpt.config = cfg;
    ckpt.scaler = e.scaler;
    ckpt.regions = e.series.n();
    ckpt.region_ids = e.series.region_ids;
    if (kind == "lstm") ckpt.features = e.features;
    if (kind == "convlstm") ckpt.frames = e.frames;
    if (kind == "graphlstm") ckpt.edges = e.tessellation.edges;
    ckpt.train_curve = run.train_curve;
    ckpt.validation_curve = run.validation_curve;
    ckpt.best_validation = run.best_validation;
    ckpt.best_epoch = run.best_epoch;
    ckpt.seed = run_seed;
    ckpt.config_hash = config_hash;
    ckpt.ops = run.ops;
    ckpt.capture_params(*run.model);
    return ckpt;
}

}  // namespace

TrainOutcome train_model(const std::string& kind, const Experiment& e, nn::TrainConfig cfg,
                         const std::string& config_hash) {
    cfg.validate();
    const nn::SampleSet samples = build_samples(e, kind, cfg.lookback);
    const nn::ModelFactory factory = make_factory(kind, e, cfg);

    TrainOutcome outcome;
    std::vector<double> all_smape, all_mase, all_rmse;
    double best_val = std::numeric_limits<double>::infinity();

    for (int rep = 0; rep < cfg.repeats; ++rep) {
        const std::uint64_t run_seed = nn::derive_repeat_seed(cfg.seed, rep);
        nn::TrainRun run = nn::fit(factory, samples, cfg, run_seed);

        nn::Checkpoint ckpt = make_checkpoint(kind, e, cfg, run, run_seed, config_hash);
        const Eigen::MatrixXd forecast =
            nn::predict_horizon(ckpt, *run.model, e.history_counts(), e.test_horizon());

        RepeatMetrics rm;
        rm.repeat = rep;
        rm.validation_loss = run.best_validation;
        std::vector<double> smapes, mases, rmses;
        const Eigen::MatrixXd truth = e.test_counts();
        for (int r = 0; r < e.series.n(); ++r) {
            const auto eval = metrics::evaluate_forecast(
                truth.row(r).transpose(), forecast.row(r).transpose(),
                e.series.values.row(r).head(e.split.test_begin).transpose(), e.seasonal_period);
            smapes.push_back(eval.smape);
            rmses.push_back(eval.rmse);
            if (eval.mase_defined) mases.push_back(eval.mase);
        }
        rm.smape = metrics::mean_std(smapes);
        rm.mase = metrics::mean_std(mases);
        rm.rmse = metrics::mean_std(rmses);
        outcome.repeats.push_back(rm);
        all_smape.insert(all_smape.end(), smapes.begin(), smapes.end());
        all_mase.insert(all_mase.end(), mases.begin(), mases.end());
        all_rmse.insert(all_rmse.end(), rmses.begin(), rmses.end());

        if (run.best_validation < best_val) {
            best_val = run.best_validation;
            outcome.checkpoint = std::move(ckpt);
            outcome.best_repeat = rep;
        }
    }
    outcome.smape = metrics::mean_std(all_smape);
    outcome.mase = metrics::mean_std(all_mase);
    outcome.rmse = metrics::mean_std(all_rmse);
    return outcome;
}

std::vector<EvaluationRow> evaluate_on_test(const Experiment& e, const Eigen::MatrixXd& forecast,
                                            const std::string& model_name) {
    (void)model_name;
    if (forecast.rows() != e.series.n() || forecast.cols() != e.test_horizon())
        throw InvalidArgument("evaluate: forecast shape mismatch");
    std::vector<EvaluationRow> rows;
    std::vector<double> smapes, mases, rmses;
    const Eigen::MatrixXd truth = e.test_counts();
    for (int r = 0; r < e.series.n(); ++r) {
        const auto eval = metrics::evaluate_forecast(
            truth.row(r).transpose(), forecast.row(r).transpose(),
            e.series.values.row(r).head(e.split.test_begin).transpose(), e.seasonal_period);
        rows.push_back({e.series.region_ids[r], "smape", eval.smape, 0.0});
        rows.push_back({e.series.region_ids[r], "mase", eval.mase, 0.0});
        rows.push_back({e.series.region_ids[r], "rmse", eval.rmse, 0.0});
        smapes.push_back(eval.smape);
        rmses.push_back(eval.rmse);
        if (eval.mase_defined) mases.push_back(eval.mase);
    }
    const auto s = metrics::mean_std(smapes);
    const auto m = metrics::mean_std(mases);
    const auto r = metrics::mean_std(rmses);
    rows.push_back({"ALL", "smape", s.mean, s.std});
    rows.push_back({"ALL", "mase", m.mean, m.std});
    rows.push_back({"ALL", "rmse", r.mean, r.std});
    return rows;
}

namespace {

/// Covariate matrix (full length x cap) for one region; missing slots are
/// zero columns (harmless in the pooled design).
Eigen::MatrixXd covariate_columns(const Experiment& e, const arima::CovariateSet& set, int cap,
                                  int length) {
    Eigen::MatrixXd z = Eigen::MatrixXd::Zero(length, cap);
    for (std::size_t c = 0; c < set.neighbor_ids.size() && static_cast<int>(c) < cap; ++c)
        z.col(static_cast<int>(c)) =
            e.series.values.row(set.neighbor_ids[c]).head(length).transpose();
    return z;
}

}  // namespace

CityArima fit_city_arima(const Experiment& e, bool with_covariates, int covariate_cap,
                         const arima::ArimaOrder* forced_order) {
    CityArima city;
    city.covariate_cap = with_covariates ? covariate_cap : 0;
    const int n = e.series.n();
    const int train_len = e.split.val_end;  // linear baselines use all pre-test data

    if (with_covariates)
        for (int r = 0; r < n; ++r)
            city.covariates.push_back(
                arima::select_covariates(r, e.tessellation, e.series.values, e.split.fit_end(),
                                         covariate_cap));

    // difference order: the most common ACF-rule choice across regions
    int d = 0;
    if (forced_order == nullptr) {
        std::array<int, 3> votes{0, 0, 0};
        for (int r = 0; r < n; ++r)
            ++votes[static_cast<std::size_t>(arima::select_difference_order(
                e.series.values.row(r).head(train_len).transpose()))];
        d = static_cast<int>(std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    std::vector<arima::Segment> segments;
    for (int r = 0; r < n; ++r) {
        arima::Segment seg;
        seg.y = e.series.values.row(r).head(train_len).transpose();
        seg.z = with_covariates ? covariate_columns(e, city.covariates[r], covariate_cap, train_len)
                                : Eigen::MatrixXd();
        segments.push_back(std::move(seg));
    }

    if (forced_order != nullptr) {
        city.model = arima::fit_pooled(segments, *forced_order);
        return city;
    }

    // AIC grid over p, q at the voted d; ties prefer smaller p + q, then p
    bool found = false;
    double best_aic = std::numeric_limits<double>::infinity();
    arima::ArimaModel best;
    for (int p = 0; p <= 5; ++p) {
        for (int q = 0; q <= 5; ++q) {
            arima::ArimaModel m;
            try {
                m = arima::fit_pooled(segments, {p, d, q});
            } catch (const Error&) {
                continue;
            }
            const bool tie = found && std::abs(m.aic - best_aic) < 1e-9;
            const bool better = !found || m.aic < best_aic - 1e-9 ||
                                (tie && (p + q < best.order.p + best.order.q ||
                                         (p + q == best.order.p + best.order.q &&
                                          p < best.order.p)));
            if (better) {
                best = std::move(m);
                best_aic = std::min(best_aic, best.aic);
                found = true;
            }
        }
    }
    if (!found) throw FitError("city arima: every order failed to fit");
    city.model = std::move(best);
    return city;
}

Eigen::MatrixXd forecast_city_arima(const CityArima& city, const Experiment& e, int history_end,
                                    int h) {
    const int n = e.series.n();
    Eigen::MatrixXd out(n, h);
    const int cap = city.covariate_cap;
    for (int r = 0; r < n; ++r) {
        const Eigen::VectorXd history = e.series.values.row(r).head(history_end).transpose();
        Eigen::MatrixXd z_hist, z_future;
        if (cap > 0) {
            z_hist = covariate_columns(e, city.covariates[r], cap, history_end);
            z_future = Eigen::MatrixXd::Zero(h, cap);
            for (std::size_t c = 0;
                 c < city.covariates[r].neighbor_ids.size() && static_cast<int>(c) < cap; ++c)
                z_future.col(static_cast<int>(c)) =
                    e.series.values.row(city.covariates[r].neighbor_ids[c])
                        .segment(history_end, h)
                        .transpose();
        }
        out.row(r) =
            arima::forecast_with_history(city.model, history, z_hist, z_future, h).transpose();
    }
    return out;
}

std::string city_arima_to_json(const CityArima& city, std::uint64_t seed,
                               const std::string& config_hash) {
    json doc = json::parse(city.model.to_json());
    doc["kind"] = city.covariate_cap > 0 ? "arimax" : "arima";
    doc["citywide"] = true;
    doc["covariate_cap"] = city.covariate_cap;
    json sets = json::array();
    for (const auto& set : city.covariates)
        sets.push_back({{"region", set.region},
                        {"neighbors", set.neighbor_ids},
                        {"correlations", set.correlations}});
    doc["region_covariates"] = std::move(sets);
    doc["meta"] = {{"seed", seed}, {"config_hash", config_hash}};
    return doc.dump(2);
}

CityArima city_arima_from_json(const std::string& text) {
    CityArima city;
    city.model = arima::ArimaModel::from_json(text);
    json doc = json::parse(text);
    city.covariate_cap = doc.value("covariate_cap", 0);
    if (doc.contains("region_covariates")) {
        for (const auto& set : doc["region_covariates"]) {
            arima::CovariateSet cs;
            cs.region = set.value("region", -1);
            cs.neighbor_ids = set.value("neighbors", std::vector<int>{});
            cs.correlations = set.value("correlations", std::vector<double>{});
            city.covariates.push_back(std::move(cs));
        }
    }
    return city;
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string file_kind(const std::string& text) {
    try {
        return json::parse(text).value("kind", "");
    } catch (const json::parse_error&) {
        throw ParseError("expert file is not JSON");
    }
}

}  // namespace

Eigen::MatrixXd forecast_expert_file(const std::string& path, const Experiment& e,
                                     int history_end, int h) {
    const std::string text = read_file(path);
    const std::string kind = file_kind(text);
    if (kind == "lstm" || kind == "convlstm" || kind == "graphlstm") {
        const nn::Checkpoint ckpt = nn::Checkpoint::from_json(text);
        const auto model = ckpt.instantiate();
        return nn::predict_horizon(ckpt, *model, e.series.values.leftCols(history_end), h);
    }
    if (kind == "arima" || kind == "arimax") {
        const CityArima city = city_arima_from_json(text);
        return forecast_city_arima(city, e, history_end, h);
    }
    throw FormatError("expert file '" + path + "' has unknown kind '" + kind + "'");
}

double expert_validation_loss(const std::string& path, const Experiment& e) {
    const int h_val = e.split.val_end - e.split.val_begin;
    if (h_val <= 0) return 0.0;
    const Eigen::MatrixXd fc = forecast_expert_file(path, e, e.split.val_begin, h_val);
    const Eigen::MatrixXd truth = e.series.values.middleCols(e.split.val_begin, h_val);
    return (fc - truth).cwiseAbs().mean();
}

}  // namespace tessera::pipeline
