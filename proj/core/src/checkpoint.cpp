#include "tessera/nn/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tessera/errors.hpp"
#include "tessera/io/base64.hpp"
#include "tessera/nn/conv_lstm.hpp"
#include "tessera/nn/graph_lstm.hpp"
#include "tessera/nn/lstm.hpp"

namespace tessera::nn {

using nlohmann::json;

void Checkpoint::capture_params(SequenceModel& model) {
    kind = model.kind();
    shapes.clear();
    flat_params.clear();
    for (const auto& t : model.tensors()) {
        shapes.push_back({t.name, t.rows, t.cols});
        flat_params.insert(flat_params.end(), t.data, t.data + t.size());
    }
}

std::unique_ptr<SequenceModel> Checkpoint::instantiate() const {
    std::unique_ptr<SequenceModel> model;
    if (kind == "lstm") {
        const int channels = features.channel_count();
        model = std::make_unique<LstmModel>(channels, config.neurons, config.layers, seed);
    } else if (kind == "convlstm") {
        model = std::make_unique<ConvLstmModel>(1, config.filters, config.layers, seed);
    } else if (kind == "graphlstm") {
        Matrix a_tilde = Matrix::Zero(regions, regions);
        a_tilde.diagonal().setOnes();
        for (const auto& [i, j] : edges) {
            a_tilde(i, j) = 1.0;
            a_tilde(j, i) = 1.0;
        }
        model = std::make_unique<GraphLstmModel>(std::move(a_tilde), config.layers, seed);
    } else {
        throw InvalidArgument("checkpoint: unknown model kind '" + kind + "'");
    }

    std::size_t offset = 0;
    auto tensors = model->tensors();
    if (tensors.size() != shapes.size())
        throw FormatError("checkpoint: tensor count mismatch for kind " + kind);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].rows != shapes[i].rows || tensors[i].cols != shapes[i].cols)
            throw FormatError("checkpoint: shape mismatch for tensor " + shapes[i].name);
        if (offset + tensors[i].size() > flat_params.size())
            throw FormatError("checkpoint: parameter blob too short");
        std::memcpy(tensors[i].data, flat_params.data() + offset,
                    tensors[i].size() * sizeof(double));
        offset += tensors[i].size();
    }
    if (offset != flat_params.size()) throw FormatError("checkpoint: parameter blob too long");
    model->apply_masks();
    return model;
}

std::string Checkpoint::to_json() const {
    json doc;
    doc["version"] = kVersion;
    doc["kind"] = kind;
    doc["config"] = {{"layers", config.layers},
                     {"neurons", config.neurons},
                     {"filters", config.filters},
                     {"dropout", config.dropout},
                     {"learning_rate", config.learning_rate},
                     {"batch_size", config.batch_size},
                     {"epochs", config.epochs},
                     {"repeats", config.repeats},
                     {"lookback", config.lookback},
                     {"patience", config.patience},
                     {"seed", config.seed}};
    doc["scaler"] = {{"min", scaler.min}, {"max", scaler.max}};
    doc["regions"] = regions;
    doc["region_ids"] = region_ids;
    if (kind == "lstm") {
        doc["features"] = {{"cap", features.cap}, {"channels", features.channels}};
    } else if (kind == "convlstm") {
        json fr = json::array();
        for (const auto& f : frames) fr.push_back(std::vector<int>(f.begin(), f.end()));
        doc["frames"] = std::move(fr);
    } else if (kind == "graphlstm") {
        json es = json::array();
        for (const auto& [i, j] : edges) es.push_back({i, j});
        doc["edges"] = std::move(es);
    }
    doc["training"] = {{"train_curve", train_curve},
                       {"validation_curve", validation_curve},
                       {"best_validation", best_validation},
                       {"best_epoch", best_epoch},
                       {"seed", seed},
                       {"config_hash", config_hash},
                       {"ops",
                        {{"forward_macs", ops.forward_macs},
                         {"backward_macs", ops.backward_macs},
                         {"update_macs", ops.update_macs}}}};
    json sh = json::array();
    for (const auto& s : shapes) sh.push_back({{"name", s.name}, {"rows", s.rows}, {"cols", s.cols}});
    doc["shapes"] = std::move(sh);
    doc["params"] = io::encode_f64_le(flat_params.data(), flat_params.size());
    return doc.dump(2);
}

Checkpoint Checkpoint::from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("checkpoint JSON: ") + e.what());
    }
    if (doc.value("version", 0) != kVersion)
        throw FormatError("checkpoint: unsupported version");

    Checkpoint c;
    c.kind = doc.at("kind").get<std::string>();
    const auto& cfg = doc.at("config");
    c.config.layers = cfg.value("layers", 1);
    c.config.neurons = cfg.value("neurons", 50);
    c.config.filters = cfg.value("filters", 16);
    c.config.dropout = cfg.value("dropout", 0.0);
    c.config.learning_rate = cfg.value("learning_rate", 1e-3);
    c.config.batch_size = cfg.value("batch_size", 64);
    c.config.epochs = cfg.value("epochs", 500);
    c.config.repeats = cfg.value("repeats", 5);
    c.config.lookback = cfg.value("lookback", 24);
    c.config.patience = cfg.value("patience", 20);
    c.config.seed = cfg.value("seed", 0ull);

    c.scaler.min = doc.at("scaler").at("min").get<std::vector<double>>();
    c.scaler.max = doc.at("scaler").at("max").get<std::vector<double>>();
    c.regions = doc.value("regions", 0);
    if (doc.contains("region_ids"))
        c.region_ids = doc["region_ids"].get<std::vector<std::string>>();

    if (doc.contains("features")) {
        c.features.cap = doc["features"].value("cap", 8);
        c.features.channels = doc["features"].at("channels").get<std::vector<std::vector<int>>>();
    }
    if (doc.contains("frames")) {
        for (const auto& f : doc["frames"]) {
            std::array<int, 9> arr{};
            for (int p = 0; p < 9; ++p) arr[p] = f.at(p).get<int>();
            c.frames.push_back(arr);
        }
    }
    if (doc.contains("edges")) {
        for (const auto& e : doc["edges"])
            c.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    }

    const auto& tr = doc.at("training");
    c.train_curve = tr.value("train_curve", std::vector<double>{});
    c.validation_curve = tr.value("validation_curve", std::vector<double>{});
    c.best_validation = tr.value("best_validation", 0.0);
    c.best_epoch = tr.value("best_epoch", -1);
    c.seed = tr.value("seed", 0ull);
    c.config_hash = tr.value("config_hash", "");
    if (tr.contains("ops")) {
        c.ops.forward_macs = tr["ops"].value("forward_macs", 0ull);
        c.ops.backward_macs = tr["ops"].value("backward_macs", 0ull);
        c.ops.update_macs = tr["ops"].value("update_macs", 0ull);
    }

    for (const auto& s : doc.at("shapes"))
        c.shapes.push_back({s.at("name").get<std::string>(), s.at("rows").get<int>(),
                            s.at("cols").get<int>()});
    c.flat_params = io::decode_f64_le(doc.at("params").get<std::string>());
    return c;
}

void Checkpoint::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path);
    out << to_json() << "\n";
    if (!out) throw IoError("write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace tessera::nn
