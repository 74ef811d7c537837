#include "bibo/model.hpp"

#include <fstream>

#include <json.hpp>

#include "bibo/errors.hpp"
#include "bibo/mlp.hpp"
#include "bibo/rf.hpp"
#include "bibo/rng.hpp"
#include "bibo/text.hpp"

namespace bibo {

TrainInput full_input(const FeatureTable& table, std::span<const std::size_t> rows,
                      std::span<const Bibo> labels) {
    TrainInput input;
    input.data = table.data;
    input.n_cols = table.columns.size();
    input.columns = table.columns;
    input.rows = rows;
    input.labels = labels;
    return input;
}

std::vector<double> predict_proba(const TrainedModel& model, std::span<const double> data,
                                  std::size_t n_rows, std::span<const std::string> columns) {
    const auto& schema = model.schema();
    if (columns.size() != schema.size()) {
        throw SchemaError("predict_proba: model expects " +
                          format_int(static_cast<std::int64_t>(schema.size())) +
                          " feature columns, got " +
                          format_int(static_cast<std::int64_t>(columns.size())));
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (columns[i] != schema[i]) {
            throw SchemaError("predict_proba: feature column " +
                              format_int(static_cast<std::int64_t>(i)) + " is '" + columns[i] +
                              "', model trained on '" + schema[i] + "'");
        }
    }
    return model.predict_scores(data, n_rows);
}

std::vector<double> predict_proba(const TrainedModel& model, const FeatureTable& table) {
    return predict_proba(model, table.data, table.n_rows, table.columns);
}

std::vector<Bibo> predict_labels(std::span<const double> scores, double threshold) {
    std::vector<Bibo> labels(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        labels[i] = scores[i] >= threshold ? Bibo::BI : Bibo::BO;
    }
    return labels;
}

namespace {

class RandomModel final : public TrainedModel {
public:
    RandomModel(std::vector<std::string> schema, std::uint64_t seed)
        : TrainedModel(ModelKind::RANDOM, std::move(schema), false), seed_(seed) {}

    std::vector<double> predict_scores(std::span<const double>, std::size_t n_rows) const override {
        Rng rng(derive_seed(seed_, "random.predict"));
        std::vector<double> scores(n_rows);
        for (double& s : scores) s = rng.uniform();
        return scores;
    }

    std::string params_json() const override {
        nlohmann::json j;
        j["seed"] = seed_;
        return j.dump();
    }

    std::uint64_t seed_;
};

class MajorityModel final : public TrainedModel {
public:
    MajorityModel(std::vector<std::string> schema, double bi_fraction)
        : TrainedModel(ModelKind::MAJORITY, std::move(schema), false),
          bi_fraction_(bi_fraction) {}

    std::vector<double> predict_scores(std::span<const double>, std::size_t n_rows) const override {
        return std::vector<double>(n_rows, bi_fraction_);
    }

    std::string params_json() const override {
        nlohmann::json j;
        j["bi_fraction"] = bi_fraction_;
        return j.dump();
    }

    double bi_fraction_;
};

}  // namespace

std::unique_ptr<TrainedModel> train_random(std::vector<std::string> schema, std::uint64_t seed) {
    return std::make_unique<RandomModel>(std::move(schema), seed);
}

std::unique_ptr<TrainedModel> train_majority(const TrainInput& input) {
    if (input.rows.empty()) {
        throw std::invalid_argument("train_majority: empty training data");
    }
    std::size_t n_pos = 0;
    for (std::size_t r : input.rows) {
        if (input.labels[r] == Bibo::BI) ++n_pos;
    }
    return std::make_unique<MajorityModel>(
        std::vector<std::string>(input.columns.begin(), input.columns.end()),
        static_cast<double>(n_pos) / static_cast<double>(input.rows.size()));
}

void save_model(const TrainedModel& model, const std::string& path) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = std::string(to_string(model.kind()));
    j["schema"] = model.schema();
    j["degenerate"] = model.degenerate();
    j["params"] = nlohmann::json::parse(model.params_json());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw SchemaError("write failed: " + path);
}

std::unique_ptr<TrainedModel> load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open model file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(path + ": invalid model JSON: " + e.what());
    }
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
        throw SchemaError(path + ": unsupported model format version");
    }
    const ModelKind kind = model_kind_from_string(j.at("kind").get<std::string>());
    std::vector<std::string> schema = j.at("schema").get<std::vector<std::string>>();
    const bool degenerate = j.at("degenerate").get<bool>();
    const nlohmann::json& p = j.at("params");

    switch (kind) {
        case ModelKind::RANDOM:
            return std::make_unique<RandomModel>(std::move(schema),
                                                 p.at("seed").get<std::uint64_t>());
        case ModelKind::MAJORITY:
            return std::make_unique<MajorityModel>(std::move(schema),
                                                   p.at("bi_fraction").get<double>());
        case ModelKind::RF: {
            RfConfig config;
            config.n_estimators = p.at("n_estimators").get<int>();
            config.max_features = max_features_from_string(p.at("max_features").get<std::string>());
            config.max_depth = p.at("max_depth").get<int>();
            config.criterion = split_criterion_from_string(p.at("criterion").get<std::string>());
            config.seed = p.at("seed").get<std::uint64_t>();
            auto model = std::make_unique<RfModel>(config, std::move(schema), degenerate,
                                                   p.at("degenerate_prob").get<double>());
            model->oob_accuracy_ = p.at("oob_accuracy").get<double>();
            model->bin_min_ = p.at("bin_min").get<std::vector<double>>();
            model->bin_width_ = p.at("bin_width").get<std::vector<double>>();
            for (const auto& tree : p.at("trees")) {
                std::vector<RfNode> nodes;
                nodes.reserve(tree.size());
                for (const auto& entry : tree) {
                    RfNode node;
                    node.feature = entry.at(0).get<std::int32_t>();
                    node.left = entry.at(1).get<std::int32_t>();
                    node.right = entry.at(2).get<std::int32_t>();
                    node.bin_threshold = static_cast<std::uint8_t>(entry.at(3).get<int>());
                    node.prob = entry.at(4).get<float>();
                    nodes.push_back(node);
                }
                model->trees_.push_back(std::move(nodes));
            }
            return model;
        }
        case ModelKind::MLP: {
            MlpConfig config;
            config.hidden = p.at("hidden").get<std::vector<int>>();
            config.schedule = lr_schedule_from_string(p.at("schedule").get<std::string>());
            config.learning_rate = p.at("learning_rate").get<double>();
            config.max_epochs = p.at("max_epochs").get<int>();
            config.batch_size = p.at("batch_size").get<int>();
            config.patience = p.at("patience").get<int>();
            config.seed = p.at("seed").get<std::uint64_t>();
            Rng rng(0);
            MlpNet net(schema.size(), config.hidden, rng);
            const auto& layers = p.at("layers");
            for (std::size_t l = 0; l < net.weights.size(); ++l) {
                const auto rows = layers.at(l).at("w").get<std::vector<std::vector<double>>>();
                for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
                    for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
                        net.weights[l](r, c) =
                            rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                    }
                }
                const auto bias = layers.at(l).at("b").get<std::vector<double>>();
                for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) {
                    net.biases[l](i) = bias[static_cast<std::size_t>(i)];
                }
            }
            auto model = std::make_unique<MlpModel>(
                config, std::move(schema), degenerate, p.at("degenerate_prob").get<double>(),
                std::move(net), p.at("feat_mean").get<std::vector<double>>(),
                p.at("feat_scale").get<std::vector<double>>());
            model->trained_epochs_ = p.at("trained_epochs").get<int>();
            return model;
        }
    }
    throw SchemaError(path + ": unknown model kind");
}

}  // namespace bibo
