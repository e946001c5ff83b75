#include "tessera/arima/arima.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "tessera/arima/nelder_mead.hpp"
#include "tessera/data/features.hpp"
#include "tessera/errors.hpp"

namespace tessera::arima {

using nlohmann::json;

void ArimaOrder::validate() const {
    if (p < 0 || p > 5 || q < 0 || q > 5)
        throw InvalidArgument("arima order: p and q must be in [0, 5]");
    if (d < 0 || d > 2) throw InvalidArgument("arima order: d must be in [0, 2]");
}

Eigen::VectorXd difference(const Eigen::VectorXd& series, int d) {
    if (d < 0) throw InvalidArgument("difference: d must be >= 0");
    if (series.size() <= d) throw InvalidArgument("difference: series too short");
    Eigen::VectorXd out = series;
    for (int round = 0; round < d; ++round) {
        Eigen::VectorXd next(out.size() - 1);
        for (Eigen::Index t = 1; t < out.size(); ++t) next(t - 1) = out(t) - out(t - 1);
        out = std::move(next);
    }
    return out;
}

Eigen::VectorXd undifference(const Eigen::VectorXd& diffed, double first_value) {
    Eigen::VectorXd out(diffed.size() + 1);
    out(0) = first_value;
    for (Eigen::Index t = 0; t < diffed.size(); ++t) out(t + 1) = out(t) + diffed(t);
    return out;
}

namespace {

double lag1_autocorrelation(const Eigen::VectorXd& x, bool* defined) {
    const double mean = x.mean();
    double num = 0.0, den = 0.0;
    for (Eigen::Index t = 0; t < x.size(); ++t) den += (x(t) - mean) * (x(t) - mean);
    for (Eigen::Index t = 0; t + 1 < x.size(); ++t)
        num += (x(t) - mean) * (x(t + 1) - mean);
    if (den <= 0.0) {
        *defined = false;
        return 0.0;
    }
    *defined = true;
    return num / den;
}

/// Parameter vector layout: [intercept, phi_1..p, theta_1..q, beta row-major
/// (n_cov x 2 lags)].
struct ParamView {
    double intercept;
    Eigen::VectorXd ar, ma;
    Eigen::MatrixXd beta;
};

ParamView unpack(const Eigen::VectorXd& params, const ArimaOrder& order, int n_cov) {
    ParamView v;
    v.intercept = params(0);
    v.ar = params.segment(1, order.p);
    v.ma = params.segment(1 + order.p, order.q);
    v.beta.resize(n_cov, 2);
    for (int c = 0; c < n_cov; ++c) {
        v.beta(c, 0) = params(1 + order.p + order.q + 2 * c);
        v.beta(c, 1) = params(1 + order.p + order.q + 2 * c + 1);
    }
    return v;
}

struct DiffSegment {
    Eigen::VectorXd yd;  // differenced target
    Eigen::MatrixXd z;   // original-scale covariates, full original length
    int d = 0;           // yd(t) corresponds to original index t + d
};

double covariate_term(const ParamView& v, const DiffSegment& seg, int t) {
    double acc = 0.0;
    for (int c = 0; c < v.beta.rows(); ++c) {
        const int orig = t + seg.d;
        acc += v.beta(c, 0) * seg.z(orig, c);
        if (orig >= 1) acc += v.beta(c, 1) * seg.z(orig - 1, c);
    }
    return acc;
}

/// Conditional residual recursion: residuals before index p are seeded at
/// zero and the sum starts at t = p.
double css_objective(const Eigen::VectorXd& params, const std::vector<DiffSegment>& segments,
                     const ArimaOrder& order, int n_cov, int* n_eff_out = nullptr,
                     std::vector<Eigen::VectorXd>* residuals_out = nullptr) {
    const ParamView v = unpack(params, order, n_cov);
    double css = 0.0;
    int n_eff = 0;
    if (residuals_out) residuals_out->clear();
    for (const auto& seg : segments) {
        const int n = static_cast<int>(seg.yd.size());
        Eigen::VectorXd eps = Eigen::VectorXd::Zero(n);
        for (int t = order.p; t < n; ++t) {
            double pred = v.intercept;
            for (int i = 1; i <= order.p; ++i) pred += v.ar(i - 1) * seg.yd(t - i);
            for (int j = 1; j <= order.q; ++j)
                if (t - j >= 0) pred += v.ma(j - 1) * eps(t - j);
            if (n_cov > 0) pred += covariate_term(v, seg, t);
            eps(t) = seg.yd(t) - pred;
            css += eps(t) * eps(t);
            ++n_eff;
        }
        if (residuals_out) residuals_out->push_back(std::move(eps));
    }
    if (n_eff_out) *n_eff_out = n_eff;
    return css;
}

/// Least-squares seed for (intercept, phi, beta); theta starts at zero.
/// Rank-deficient designs fall back to ridge (lambda = 1e-6).
Eigen::VectorXd least_squares_seed(const std::vector<DiffSegment>& segments,
                                   const ArimaOrder& order, int n_cov, bool* ridge_used) {
    const int cols = 1 + order.p + 2 * n_cov;
    std::vector<Eigen::VectorXd> rows;
    std::vector<double> targets;
    for (const auto& seg : segments) {
        for (int t = order.p; t < seg.yd.size(); ++t) {
            Eigen::VectorXd row(cols);
            row(0) = 1.0;
            for (int i = 1; i <= order.p; ++i) row(i) = seg.yd(t - i);
            for (int c = 0; c < n_cov; ++c) {
                const int orig = t + seg.d;
                row(1 + order.p + 2 * c) = seg.z(orig, c);
                row(1 + order.p + 2 * c + 1) = orig >= 1 ? seg.z(orig - 1, c) : 0.0;
            }
            rows.push_back(std::move(row));
            targets.push_back(seg.yd(t));
        }
    }
    if (rows.empty()) throw FitError("arima: no usable observations after conditioning");

    Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()), cols);
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        design.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
        target(static_cast<Eigen::Index>(r)) = targets[r];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    Eigen::VectorXd solution;
    if (qr.rank() < cols) {
        *ridge_used = true;
        const Eigen::MatrixXd gram =
            design.transpose() * design + 1e-6 * Eigen::MatrixXd::Identity(cols, cols);
        solution = gram.ldlt().solve(design.transpose() * target);
    } else {
        *ridge_used = false;
        solution = qr.solve(target);
    }

    Eigen::VectorXd params = Eigen::VectorXd::Zero(1 + order.p + order.q + 2 * n_cov);
    params(0) = solution(0);
    params.segment(1, order.p) = solution.segment(1, order.p);
    for (int c = 0; c < n_cov; ++c) {
        params(1 + order.p + order.q + 2 * c) = solution(1 + order.p + 2 * c);
        params(1 + order.p + order.q + 2 * c + 1) = solution(1 + order.p + 2 * c + 1);
    }
    return params;
}

/// Largest root modulus of the reciprocal polynomial via the companion
/// matrix; values >= 1/margin flag a root on or inside the margin circle.
double max_reciprocal_root(const Eigen::VectorXd& first_row) {
    const int k = static_cast<int>(first_row.size());
    if (k == 0) return 0.0;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k, k);
    companion.row(0) = first_row.transpose();
    for (int i = 1; i < k; ++i) companion(i, i - 1) = 1.0;
    const Eigen::VectorXcd eigs = companion.eigenvalues();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) worst = std::max(worst, std::abs(eigs(i)));
    return worst;
}

ArimaModel fit_segments(const std::vector<Segment>& segments, const ArimaOrder& order) {
    order.validate();
    const int n_cov = segments.empty() ? 0 : static_cast<int>(segments[0].z.cols());
    std::size_t total = 0;
    std::vector<DiffSegment> diffed;
    for (const auto& seg : segments) {
        if (static_cast<int>(seg.z.rows()) != 0 &&
            (seg.z.rows() != seg.y.size() || static_cast<int>(seg.z.cols()) != n_cov))
            throw InvalidArgument("arima: covariates misaligned with the target");
        if (seg.y.size() <= order.d) throw InvalidArgument("arima: segment shorter than d");
        DiffSegment ds;
        ds.yd = difference(seg.y, order.d);
        ds.z = seg.z.rows() == 0 ? Eigen::MatrixXd::Zero(seg.y.size(), n_cov) : seg.z;
        ds.d = order.d;
        total += static_cast<std::size_t>(seg.y.size());
        diffed.push_back(std::move(ds));
    }
    if (total < 10u * static_cast<std::size_t>(order.p + order.q + 1))
        throw InvalidArgument("arima: series shorter than 10 * (p + q + 1)");

    ArimaModel model;
    model.order = order;

    bool ridge_used = false;
    Eigen::VectorXd seed = least_squares_seed(diffed, order, n_cov, &ridge_used);
    if (ridge_used) {
        model.ridge_fallback = true;
        model.warnings.push_back("collinear design; ridge seed (lambda = 1e-6)");
    }

    Eigen::VectorXd best = seed;
    if (seed.size() > 1 || order.q > 0) {
        const auto objective = [&](const Eigen::VectorXd& params) {
            return css_objective(params, diffed, order, n_cov);
        };
        const NelderMeadResult nm = nelder_mead(objective, seed);
        if (!nm.converged) throw FitError("arima: optimizer did not converge");
        // the refinement must not be worse than the seed
        if (nm.value <= css_objective(seed, diffed, order, n_cov)) best = nm.x;
    }

    int n_eff = 0;
    std::vector<Eigen::VectorXd> residuals;
    model.css = css_objective(best, diffed, order, n_cov, &n_eff, &residuals);
    const ParamView v = unpack(best, order, n_cov);
    model.intercept = v.intercept;
    model.ar = v.ar;
    model.ma = v.ma;
    model.beta = v.beta;
    model.residual_variance = n_eff > 0 ? model.css / n_eff : 0.0;
    model.aic = n_eff * std::log(std::max(model.css, 1e-300) / std::max(n_eff, 1)) +
                2.0 * (order.p + order.q + 1);

    if (order.p > 0 && max_reciprocal_root(model.ar) >= 1.0 / 1.001)
        model.warnings.push_back("AR roots within the 1.001 stationarity margin");
    if (order.q > 0) {
        Eigen::VectorXd neg = -model.ma;
        if (max_reciprocal_root(neg) >= 1.0 / 1.001)
            model.warnings.push_back("MA roots within the 1.001 invertibility margin");
    }

    // forecasting tail from the last segment
    if (!segments.empty()) {
        const Segment& last = segments.back();
        Eigen::VectorXd level = last.y;
        model.tail_levels.clear();
        for (int k = 0; k < order.d; ++k) {
            model.tail_levels.push_back(level(level.size() - 1));
            level = difference(level, 1);
        }
        const Eigen::VectorXd& yd = diffed.back().yd;
        model.tail_diff.clear();
        for (int i = 0; i < order.p; ++i)
            model.tail_diff.push_back(yd(yd.size() - 1 - i));  // most recent first
        const Eigen::VectorXd& eps = residuals.back();
        model.tail_residuals.clear();
        for (int j = 0; j < order.q; ++j)
            model.tail_residuals.push_back(eps(eps.size() - 1 - j));
        model.tail_covariates =
            n_cov > 0 ? Eigen::VectorXd(diffed.back().z.row(diffed.back().z.rows() - 1))
                      : Eigen::VectorXd();
    }
    return model;
}

}  // namespace

int select_difference_order(const Eigen::VectorXd& series) {
    if (series.size() < 20) throw InvalidArgument("select_difference_order: need >= 20 points");
    for (int d = 0; d <= 2; ++d) {
        const Eigen::VectorXd x = difference(series, d);
        bool defined = true;
        const double acf = lag1_autocorrelation(x, &defined);
        if (!defined || acf < 0.95) return d;
    }
    return 2;
}

ArimaModel fit_arima(const Eigen::VectorXd& series, const ArimaOrder& order) {
    return fit_segments({Segment{series, Eigen::MatrixXd()}}, order);
}

ArimaModel fit_arimax(const Eigen::VectorXd& series, const Eigen::MatrixXd& covariates,
                      const ArimaOrder& order) {
    if (covariates.rows() != series.size())
        throw InvalidArgument("fit_arimax: covariates misaligned with the target");
    return fit_segments({Segment{series, covariates}}, order);
}

ArimaModel fit_pooled(const std::vector<Segment>& segments, const ArimaOrder& order) {
    if (segments.empty()) throw InvalidArgument("fit_pooled: no segments");
    return fit_segments(segments, order);
}

ArimaOrder select_order(const Eigen::VectorXd& series, int d) {
    ArimaOrder best;
    double best_aic = std::numeric_limits<double>::infinity();
    bool found = false;
    for (int p = 0; p <= 5; ++p) {
        for (int q = 0; q <= 5; ++q) {
            const ArimaOrder order{p, d, q};
            ArimaModel model;
            try {
                model = fit_arima(series, order);
            } catch (const Error&) {
                continue;  // failed cells are skipped
            }
            const bool tie = found && std::abs(model.aic - best_aic) < 1e-9;
            const bool better =
                !found || (model.aic < best_aic - 1e-9) ||
                (tie && (p + q < best.p + best.q || (p + q == best.p + best.q && p < best.p)));
            if (better) {
                best = order;
                best_aic = std::min(best_aic, model.aic);
                found = true;
            }
        }
    }
    if (!found) throw FitError("select_order: every grid cell failed");
    return best;
}

CovariateSet select_covariates(int region, const geo::Tessellation& tessellation,
                               const Eigen::MatrixXd& counts, int train_end, int cap) {
    if (region < 0 || region >= tessellation.n())
        throw InvalidArgument("select_covariates: bad region");
    CovariateSet set;
    set.region = region;
    const auto neighbors = tessellation.neighbor_lists();

    std::vector<std::pair<double, int>> ranked;
    for (int nb : neighbors[region]) {
        bool defined = true;
        const double r = data::pearson(counts.row(region).head(train_end).transpose(),
                                       counts.row(nb).head(train_end).transpose(), &defined);
        if (!defined) {
            set.notes.push_back("neighbor " + std::to_string(nb) + " excluded: zero variance");
            continue;
        }
        if (r <= 0.0) continue;  // positively correlated only
        ranked.emplace_back(r, nb);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t i = 0; i < ranked.size() && static_cast<int>(i) < cap; ++i) {
        set.neighbor_ids.push_back(ranked[i].second);
        set.correlations.push_back(ranked[i].first);
    }
    return set;
}

namespace {

struct ForecastTail {
    std::vector<double> levels;     // last value per differencing level
    std::vector<double> diffs;      // most recent first, length >= p
    std::vector<double> residuals;  // most recent first, length >= q
    Eigen::VectorXd last_z;
};

Eigen::VectorXd forecast_from_tail(const ArimaModel& model, const ForecastTail& tail, int h,
                                   const Eigen::MatrixXd& future_z) {
    const ArimaOrder& order = model.order;
    const int n_cov = model.covariate_count();
    if (h < 1) throw InvalidArgument("forecast: horizon must be >= 1");
    if (n_cov > 0 && (future_z.rows() < h || future_z.cols() != n_cov))
        throw InvalidArgument("forecast: ARIMAX needs future covariates (h x n_cov)");

    Eigen::VectorXd fc(h);
    for (int s = 0; s < h; ++s) {
        double pred = model.intercept;
        for (int i = 1; i <= order.p; ++i) {
            const int idx = s - i;  // index into forecasts; negative = history
            if (idx >= 0)
                pred += model.ar(i - 1) * fc(idx);
            else if (static_cast<int>(tail.diffs.size()) >= -idx)
                pred += model.ar(i - 1) * tail.diffs[-idx - 1];
        }
        for (int j = 1; j <= order.q; ++j) {
            const int idx = s - j;
            if (idx < 0 && static_cast<int>(tail.residuals.size()) >= -idx)
                pred += model.ma(j - 1) * tail.residuals[-idx - 1];
            // future residuals are zero
        }
        for (int c = 0; c < n_cov; ++c) {
            pred += model.beta(c, 0) * future_z(s, c);
            const double z_lag = s >= 1 ? future_z(s - 1, c)
                                        : (tail.last_z.size() > c ? tail.last_z(c) : 0.0);
            pred += model.beta(c, 1) * z_lag;
        }
        fc(s) = pred;
    }

    // invert the differencing, innermost level first
    for (int level = order.d - 1; level >= 0; --level) {
        double anchor = tail.levels[level];
        for (int s = 0; s < h; ++s) {
            anchor += fc(s);
            fc(s) = anchor;
        }
    }
    return fc.cwiseMax(0.0);
}

}  // namespace

Eigen::VectorXd forecast_arima(const ArimaModel& model, int h,
                               const Eigen::MatrixXd& future_covariates) {
    if (model.order.d > 0 && static_cast<int>(model.tail_levels.size()) < model.order.d)
        throw InvalidArgument("forecast_arima: model has no training tail");
    ForecastTail tail{model.tail_levels, model.tail_diff, model.tail_residuals,
                      model.tail_covariates};
    return forecast_from_tail(model, tail, h, future_covariates);
}

Eigen::VectorXd forecast_with_history(const ArimaModel& model, const Eigen::VectorXd& history,
                                      const Eigen::MatrixXd& covariate_history,
                                      const Eigen::MatrixXd& future_covariates, int h) {
    const ArimaOrder& order = model.order;
    const int n_cov = model.covariate_count();
    if (history.size() <= order.d) throw InvalidArgument("forecast: history shorter than d");
    if (n_cov > 0 && covariate_history.rows() != history.size())
        throw InvalidArgument("forecast: covariate history misaligned");

    ForecastTail tail;
    Eigen::VectorXd level = history;
    for (int k = 0; k < order.d; ++k) {
        tail.levels.push_back(level(level.size() - 1));
        level = difference(level, 1);
    }

    // rebuild conditional residuals over the history with the fitted coefficients
    DiffSegment seg;
    seg.yd = difference(history, order.d);
    seg.z = n_cov > 0 ? covariate_history : Eigen::MatrixXd::Zero(history.size(), 0);
    seg.d = order.d;
    Eigen::VectorXd params(1 + order.p + order.q + 2 * n_cov);
    params(0) = model.intercept;
    params.segment(1, order.p) = model.ar;
    params.segment(1 + order.p, order.q) = model.ma;
    for (int c = 0; c < n_cov; ++c) {
        params(1 + order.p + order.q + 2 * c) = model.beta(c, 0);
        params(1 + order.p + order.q + 2 * c + 1) = model.beta(c, 1);
    }
    std::vector<Eigen::VectorXd> residuals;
    css_objective(params, {seg}, order, n_cov, nullptr, &residuals);

    const Eigen::VectorXd& yd = seg.yd;
    for (int i = 0; i < order.p && i < yd.size(); ++i)
        tail.diffs.push_back(yd(yd.size() - 1 - i));
    const Eigen::VectorXd& eps = residuals.front();
    for (int j = 0; j < order.q && j < eps.size(); ++j)
        tail.residuals.push_back(eps(eps.size() - 1 - j));
    if (n_cov > 0) tail.last_z = covariate_history.row(covariate_history.rows() - 1);

    return forecast_from_tail(model, tail, h, future_covariates);
}

std::string ArimaModel::to_json(const CovariateSet& covariates) const {
    json doc;
    doc["kind"] = covariate_count() > 0 ? "arimax" : "arima";
    doc["order"] = {{"p", order.p}, {"d", order.d}, {"q", order.q}};
    doc["ar"] = std::vector<double>(ar.data(), ar.data() + ar.size());
    doc["ma"] = std::vector<double>(ma.data(), ma.data() + ma.size());
    doc["intercept"] = intercept;
    json beta_rows = json::array();
    for (int c = 0; c < beta.rows(); ++c) beta_rows.push_back({beta(c, 0), beta(c, 1)});
    doc["beta"] = std::move(beta_rows);
    doc["residual_variance"] = residual_variance;
    doc["aic"] = aic;
    doc["warnings"] = warnings;
    doc["tail"] = {{"levels", tail_levels},
                   {"diffs", tail_diff},
                   {"residuals", tail_residuals},
                   {"covariates", std::vector<double>(tail_covariates.data(),
                                                      tail_covariates.data() +
                                                          tail_covariates.size())}};
    if (covariates.region >= 0) {
        doc["covariate_spec"] = {{"region", covariates.region},
                                 {"neighbors", covariates.neighbor_ids},
                                 {"correlations", covariates.correlations}};
    }
    return doc.dump(2);
}

ArimaModel ArimaModel::from_json(const std::string& text, CovariateSet* covariates) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("arima JSON: ") + e.what());
    }
    ArimaModel m;
    m.order = {doc.at("order").at("p").get<int>(), doc.at("order").at("d").get<int>(),
               doc.at("order").at("q").get<int>()};
    const auto ar = doc.at("ar").get<std::vector<double>>();
    const auto ma = doc.at("ma").get<std::vector<double>>();
    m.ar = Eigen::Map<const Eigen::VectorXd>(ar.data(), static_cast<Eigen::Index>(ar.size()));
    m.ma = Eigen::Map<const Eigen::VectorXd>(ma.data(), static_cast<Eigen::Index>(ma.size()));
    m.intercept = doc.at("intercept").get<double>();
    const auto& beta_rows = doc.at("beta");
    m.beta.resize(static_cast<Eigen::Index>(beta_rows.size()), 2);
    for (Eigen::Index c = 0; c < m.beta.rows(); ++c) {
        m.beta(c, 0) = beta_rows.at(c).at(0).get<double>();
        m.beta(c, 1) = beta_rows.at(c).at(1).get<double>();
    }
    m.residual_variance = doc.value("residual_variance", 0.0);
    m.aic = doc.value("aic", 0.0);
    if (doc.contains("warnings")) m.warnings = doc["warnings"].get<std::vector<std::string>>();
    if (doc.contains("tail")) {
        m.tail_levels = doc["tail"].value("levels", std::vector<double>{});
        m.tail_diff = doc["tail"].value("diffs", std::vector<double>{});
        m.tail_residuals = doc["tail"].value("residuals", std::vector<double>{});
        const auto tz = doc["tail"].value("covariates", std::vector<double>{});
        m.tail_covariates =
            Eigen::Map<const Eigen::VectorXd>(tz.data(), static_cast<Eigen::Index>(tz.size()));
    }
    if (covariates && doc.contains("covariate_spec")) {
        covariates->region = doc["covariate_spec"].value("region", -1);
        covariates->neighbor_ids =
            doc["covariate_spec"].value("neighbors", std::vector<int>{});
        covariates->correlations =
            doc["covariate_spec"].value("correlations", std::vector<double>{});
    }
    return m;
}

}  // namespace tessera::arima
