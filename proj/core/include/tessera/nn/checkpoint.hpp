#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tessera/data/features.hpp"
#include "tessera/data/scaler.hpp"
#include "tessera/flops.hpp"
#include "tessera/nn/params.hpp"
#include "tessera/nn/train.hpp"

namespace tessera::nn {

/// Everything needed to reload a trained forecaster and run it on new data:
/// model kind and shapes, flat parameters (base64 of little-endian doubles),
/// the scaler, the spatial feature wiring and the training record.
struct Checkpoint {
    static constexpr int kVersion = 1;

    std::string kind;  // lstm | convlstm | graphlstm
    TrainConfig config;
    data::ScalerParams scaler;

    // spatial context captured at training time
    data::FeatureSpec features;                  // lstm channels
    std::vector<std::array<int, 9>> frames;      // convlstm pixel sources
    std::vector<std::pair<int, int>> edges;      // graphlstm adjacency
    int regions = 0;
    std::vector<std::string> region_ids;

    // training record
    std::vector<double> train_curve;
    std::vector<double> validation_curve;
    double best_validation = 0.0;
    int best_epoch = -1;
    std::uint64_t seed = 0;
    std::string config_hash;
    OpCounter ops;

    // parameters
    struct Shape {
        std::string name;
        int rows = 0;
        int cols = 0;
    };
    std::vector<Shape> shapes;
    std::vector<double> flat_params;

    /// Snapshot a trained model's parameters into this checkpoint.
    void capture_params(SequenceModel& model);

    /// Rebuild the model and restore its parameters.
    std::unique_ptr<SequenceModel> instantiate() const;

    std::string to_json() const;
    static Checkpoint from_json(const std::string& text);
    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);
};

}  // namespace tessera::nn
