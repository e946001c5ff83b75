#include "tessera/data/split.hpp"

#include <cmath>

#include "tessera/errors.hpp"

namespace tessera::data {

SplitIndices split_series(int total_steps, int bins_per_day, const SplitSpec& spec) {
    if (spec.train_days < 1 || spec.test_days < 0)
        throw InvalidArgument("split: days must be positive");
    if (spec.validation_fraction < 0.0 || spec.validation_fraction >= 1.0)
        throw InvalidArgument("split: validation fraction must be in [0, 1)");
    const int train_span = spec.train_days * bins_per_day;
    const int test_span = spec.test_days * bins_per_day;
    if (total_steps < train_span + test_span)
        throw InvalidArgument("split: series has " + std::to_string(total_steps) +
                              " steps, need " + std::to_string(train_span + test_span));

    const int val_span = static_cast<int>(std::llround(spec.validation_fraction * train_span));

    SplitIndices idx;
    idx.train_begin = 0;
    idx.train_end = train_span - val_span;
    idx.val_begin = idx.train_end;
    idx.val_end = train_span;
    idx.test_begin = train_span;
    idx.test_end = train_span + test_span;
    return idx;
}

}  // namespace tessera::data
