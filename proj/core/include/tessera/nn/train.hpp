#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "tessera/flops.hpp"
#include "tessera/nn/params.hpp"

namespace tessera::nn {

/// Training hyper-parameters; ranges follow the search space the experiments
/// draw from.
struct TrainConfig {
    int layers = 1;              // {1, 2}
    int neurons = 50;            // {10, 20, 50, 100}; LSTM hidden size
    int filters = 16;            // [16, 258]; ConvLSTM filter count
    double dropout = 0.0;        // [0, 0.5)
    double learning_rate = 1e-3; // {1e-1 ... 1e-6}
    int batch_size = 64;         // {64, 128}
    int epochs = 500;
    int repeats = 5;
    int lookback = 24;           // window length L
    int patience = 20;           // early-stopping patience (epochs)
    std::uint64_t seed = 0;

    void validate() const;
};

struct SampleSet {
    std::vector<Sample> train;
    std::vector<Sample> validation;
};

/// Result of one training run. `model` carries the best-validation weights.
struct TrainRun {
    std::unique_ptr<SequenceModel> model;
    std::vector<double> train_curve;
    std::vector<double> validation_curve;
    double best_validation = 0.0;
    int best_epoch = -1;
    int epochs_run = 0;
    bool early_stopped = false;
    OpCounter ops;
};

using ModelFactory = std::function<std::unique_ptr<SequenceModel>(std::uint64_t seed)>;

/// Mini-batch RMSprop on the combined squared/absolute loss with inverted
/// dropout between layers and early stopping on validation loss. With an
/// empty validation set early stopping is disabled and the final weights are
/// returned. Deterministic given `run_seed`.
TrainRun fit(const ModelFactory& factory, const SampleSet& data, const TrainConfig& cfg,
             std::uint64_t run_seed);

/// Seed for repeat `index` derived from the master seed.
std::uint64_t derive_repeat_seed(std::uint64_t seed, int index);

}  // namespace tessera::nn
