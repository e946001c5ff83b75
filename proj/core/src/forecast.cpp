#include "tessera/nn/forecast.hpp"

#include "tessera/data/scaler.hpp"
#include "tessera/errors.hpp"

namespace tessera::nn {

namespace {

/// L x S window of one region's feature channels read from the scaled
/// rolling matrix, columns [col_end - L, col_end).
Matrix lstm_window(const Matrix& rolling, const data::FeatureSpec& spec, int region, int col_end,
                   int lookback) {
    const auto& ch = spec.channels[region];
    Matrix window(lookback, static_cast<int>(ch.size()));
    for (std::size_t c = 0; c < ch.size(); ++c) {
        for (int t = 0; t < lookback; ++t) {
            const int col = col_end - lookback + t;
            if (ch[c] == data::kSentinelChannel)
                window(t, static_cast<int>(c)) = -1.0;
            else if (ch[c] == data::kZeroChannel)
                window(t, static_cast<int>(c)) = 0.0;
            else
                window(t, static_cast<int>(c)) = rolling(ch[c], col);
        }
    }
    return window;
}

Matrix conv_window(const Matrix& rolling, const std::vector<std::array<int, 9>>& frames,
                   int region, int col_end, int lookback) {
    Matrix window(lookback, 9);
    for (int p = 0; p < 9; ++p) {
        const int src = frames[region][p];
        for (int t = 0; t < lookback; ++t) {
            const int col = col_end - lookback + t;
            window(t, p) = src < 0 ? 0.0 : rolling(src, col);
        }
    }
    return window;
}

}  // namespace

Eigen::MatrixXd predict_horizon(const Checkpoint& ckpt, const SequenceModel& model,
                                const Eigen::MatrixXd& history_counts, int h, OpCounter* ops) {
    if (h < 1) throw InvalidArgument("predict_horizon: horizon must be >= 1");
    const int n = static_cast<int>(history_counts.rows());
    const int t_hist = static_cast<int>(history_counts.cols());
    const int lookback = ckpt.config.lookback;
    if (n != ckpt.regions && ckpt.regions != 0)
        throw InvalidArgument("predict_horizon: region count mismatch");
    if (t_hist < lookback)
        throw InvalidArgument("predict_horizon: history shorter than the lookback window");

    Matrix rolling(n, t_hist + h);
    rolling.leftCols(t_hist) = data::minmax_apply(history_counts, ckpt.scaler);

    for (int step = 0; step < h; ++step) {
        const int col = t_hist + step;
        if (ckpt.kind == "graphlstm") {
            const Matrix window =
                rolling.block(0, col - lookback, n, lookback).transpose();
            rolling.col(col) = model.forward(window, ops);
        } else if (ckpt.kind == "lstm") {
            for (int r = 0; r < n; ++r) {
                const Matrix window = lstm_window(rolling, ckpt.features, r, col, lookback);
                rolling(r, col) = model.forward(window, ops)(0);
            }
        } else if (ckpt.kind == "convlstm") {
            for (int r = 0; r < n; ++r) {
                const Matrix window = conv_window(rolling, ckpt.frames, r, col, lookback);
                rolling(r, col) = model.forward(window, ops)(0);
            }
        } else {
            throw InvalidArgument("predict_horizon: unknown model kind '" + ckpt.kind + "'");
        }
    }

    const Matrix forecast_scaled = rolling.rightCols(h);
    return data::minmax_invert(forecast_scaled, ckpt.scaler).cwiseMax(0.0);
}

}  // namespace tessera::nn
