#include "tessera/nn/search.hpp"

#include "tessera/errors.hpp"
#include "tessera/rng.hpp"

namespace tessera::nn {

SearchResult search_hyperparameters(const std::function<double(const TrainConfig&)>& evaluate,
                                    const SearchSpace& space, int budget, std::uint64_t seed,
                                    const TrainConfig& base) {
    if (budget < 1) throw InvalidArgument("search: budget must be >= 1");
    if (space.layers.empty() || space.neurons.empty() || space.learning_rates.empty() ||
        space.batch_sizes.empty())
        throw InvalidArgument("search: empty dimension in the space");

    Rng rng(mix_seed(seed ^ 0x5ea4c4ull));
    SearchResult result;
    bool have_best = false;

    for (int trial = 0; trial < budget; ++trial) {
        TrainConfig cfg = base;
        cfg.layers = space.layers[rng.uniform_index(space.layers.size())];
        cfg.neurons = space.neurons[rng.uniform_index(space.neurons.size())];
        cfg.learning_rate = space.learning_rates[rng.uniform_index(space.learning_rates.size())];
        cfg.batch_size = space.batch_sizes[rng.uniform_index(space.batch_sizes.size())];
        cfg.dropout = rng.uniform(space.dropout_min, space.dropout_max);
        cfg.filters = space.filters_min +
                      static_cast<int>(rng.uniform_index(
                          static_cast<std::uint64_t>(space.filters_max - space.filters_min + 1)));
        cfg.validate();

        const double loss = evaluate(cfg);
        result.trials.push_back({cfg, loss});
        if (!have_best || loss < result.best_loss) {
            result.best = cfg;
            result.best_loss = loss;
            have_best = true;
        }
    }
    return result;
}

}  // namespace tessera::nn
