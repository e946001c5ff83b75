#pragma once

namespace tessera::data {

/// Contiguous train/validation/test split: the first `train_days` train the
/// model, the trailing `validation_fraction` of that span (rounded to the
/// nearest step) is held out for validation, and the following `test_days`
/// form the test set.
struct SplitSpec {
    int train_days = 59;
    int test_days = 1;
    double validation_fraction = 0.10;
};

/// Half-open step ranges; train/validation/test partition
/// [0, (train_days + test_days) * bins_per_day).
struct SplitIndices {
    int train_begin = 0;
    int train_end = 0;  // == val_begin
    int val_begin = 0;
    int val_end = 0;  // == test_begin
    int test_begin = 0;
    int test_end = 0;

    int fit_end() const { return train_end; }  // scaler/correlation span
};

SplitIndices split_series(int total_steps, int bins_per_day, const SplitSpec& spec);

}  // namespace tessera::data
