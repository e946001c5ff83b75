#include "tessera/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tessera/errors.hpp"
#include "tessera/nn/rmsprop.hpp"

namespace tessera::nn {

namespace {

bool is_one_of(int v, std::initializer_list<int> allowed) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

}  // namespace

void TrainConfig::validate() const {
    if (!is_one_of(layers, {1, 2})) throw InvalidArgument("config: layers must be 1 or 2");
    if (!is_one_of(neurons, {10, 20, 50, 100}))
        throw InvalidArgument("config: neurons must be one of 10, 20, 50, 100");
    if (filters < 16 || filters > 258)
        throw InvalidArgument("config: filters must be in [16, 258]");
    if (!(dropout >= 0.0 && dropout < 0.5))
        throw InvalidArgument("config: dropout must be in [0, 0.5)");
    const double lrs[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    if (std::none_of(std::begin(lrs), std::end(lrs),
                     [&](double lr) { return lr == learning_rate; }))
        throw InvalidArgument("config: learning rate must be one of 1e-1 ... 1e-6");
    if (!is_one_of(batch_size, {64, 128}))
        throw InvalidArgument("config: batch size must be 64 or 128");
    if (epochs < 1) throw InvalidArgument("config: epochs must be positive");
    if (repeats < 1) throw InvalidArgument("config: repeats must be positive");
    if (lookback < 1) throw InvalidArgument("config: lookback must be positive");
    if (patience < 0) throw InvalidArgument("config: patience must be >= 0");
}

std::uint64_t derive_repeat_seed(std::uint64_t seed, int index) {
    return mix_seed(seed ^ (0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(index + 1)));
}

TrainRun fit(const ModelFactory& factory, const SampleSet& data, const TrainConfig& cfg,
             std::uint64_t run_seed) {
    if (data.train.empty()) throw InvalidArgument("fit: empty training set");

    TrainRun run;
    run.model = factory(run_seed);
    SequenceModel& model = *run.model;
    auto grads = model.zeros_like();
    RmsProp optimizer(cfg.learning_rate);
    Rng rng(mix_seed(run_seed ^ 0xd1b54a32d192ed03ull));

    std::unique_ptr<SequenceModel> best;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;
    const bool use_early_stop = !data.validation.empty();

    std::vector<std::size_t> order(data.train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t processed = 0;
        while (processed < order.size()) {
            const std::size_t batch_end =
                std::min(processed + static_cast<std::size_t>(cfg.batch_size), order.size());
            const double batch_n = static_cast<double>(batch_end - processed);

            for (const auto& t : grads->tensors())
                std::fill(t.data, t.data + t.size(), 0.0);

            double batch_loss = 0.0;
            for (std::size_t s = processed; s < batch_end; ++s)
                batch_loss += model.accumulate_gradients(data.train[order[s]], *grads, cfg.dropout,
                                                         &rng, &run.ops);
            batch_loss /= batch_n;
            for (const auto& t : grads->tensors()) {
                for (std::size_t u = 0; u < t.size(); ++u) t.data[u] /= batch_n;
            }
            if (!std::isfinite(batch_loss))
                throw TrainingError("training diverged (non-finite loss)", epoch,
                                    cfg.learning_rate);

            optimizer.step(model.tensors(), grads->tensors(), &run.ops);
            epoch_loss += batch_loss * batch_n;
            processed = batch_end;
        }
        run.train_curve.push_back(epoch_loss / static_cast<double>(order.size()));
        run.epochs_run = epoch + 1;

        if (use_early_stop) {
            double val = 0.0;
            for (const auto& sample : data.validation) val += model.sample_loss(sample, &run.ops);
            val /= static_cast<double>(data.validation.size());
            run.validation_curve.push_back(val);
            if (!std::isfinite(val))
                throw TrainingError("validation diverged (non-finite loss)", epoch,
                                    cfg.learning_rate);
            if (val < best_val) {
                best_val = val;
                best = model.clone();
                run.best_epoch = epoch;
                since_best = 0;
            } else {
                ++since_best;
                if (since_best > cfg.patience) {
                    run.early_stopped = true;
                    break;
                }
            }
        }
    }

    if (use_early_stop && best) {
        run.model = std::move(best);
        run.best_validation = best_val;
    } else {
        run.best_epoch = run.epochs_run - 1;
        run.best_validation = run.train_curve.empty() ? 0.0 : run.train_curve.back();
    }
    return run;
}

}  // namespace tessera::nn
