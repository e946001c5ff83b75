#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tessera/nn/train.hpp"

namespace tessera::nn {

/// Hyper-parameter ranges sampled by the seeded random search. The defaults
/// are the full search table; collapse a field to one value to pin it.
struct SearchSpace {
    std::vector<int> layers = {1, 2};
    std::vector<int> neurons = {10, 20, 50, 100};
    std::vector<double> learning_rates = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    std::vector<int> batch_sizes = {64, 128};
    double dropout_min = 0.0;
    double dropout_max = 0.5;  // exclusive
    int filters_min = 16;
    int filters_max = 258;
};

struct SearchTrial {
    TrainConfig config;
    double validation_loss = 0.0;
};

struct SearchResult {
    TrainConfig best;
    double best_loss = 0.0;
    std::vector<SearchTrial> trials;
};

/// Seeded uniform sampling over the space; each candidate is scored by
/// `evaluate` (a short-budget training proxy returning validation loss) and
/// the argmin is returned. Deterministic given `seed`.
SearchResult search_hyperparameters(const std::function<double(const TrainConfig&)>& evaluate,
                                    const SearchSpace& space, int budget, std::uint64_t seed,
                                    const TrainConfig& base);

}  // namespace tessera::nn
