#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bibo/features.hpp"
#include "bibo/types.hpp"

namespace bibo {

// Row-major feature matrix plus the subset of rows to use. Labels are
// indexed by the same global row ids as `rows`.
struct TrainInput {
    std::span<const double> data;
    std::size_t n_cols = 0;
    std::span<const std::string> columns;
    std::span<const std::size_t> rows;
    std::span<const Bibo> labels;

    std::span<const double> row(std::size_t global_row) const {
        return data.subspan(global_row * n_cols, n_cols);
    }
};

TrainInput full_input(const FeatureTable& table, std::span<const std::size_t> rows,
                      std::span<const Bibo> labels);

class TrainedModel {
public:
    virtual ~TrainedModel() = default;

    ModelKind kind() const { return kind_; }
    const std::vector<std::string>& schema() const { return schema_; }
    // Single-class training data collapses a model into a constant
    // predictor; flagged here.
    bool degenerate() const { return degenerate_; }

    // Class-1 (BI) probability per row; does not validate the schema.
    virtual std::vector<double> predict_scores(std::span<const double> data,
                                               std::size_t n_rows) const = 0;

    // JSON object with the kind-specific parameters; save_model wraps it.
    virtual std::string params_json() const = 0;

protected:
    TrainedModel(ModelKind kind, std::vector<std::string> schema, bool degenerate)
        : kind_(kind), schema_(std::move(schema)), degenerate_(degenerate) {}

    ModelKind kind_;
    std::vector<std::string> schema_;
    bool degenerate_ = false;
};

// Validates the feature schema (throws SchemaError naming the first
// mismatched column) and returns per-row class-1 probabilities.
std::vector<double> predict_proba(const TrainedModel& model, const FeatureTable& table);
std::vector<double> predict_proba(const TrainedModel& model, std::span<const double> data,
                                  std::size_t n_rows, std::span<const std::string> columns);

// BI iff score >= threshold.
std::vector<Bibo> predict_labels(std::span<const double> scores, double threshold = 0.5);

// Baselines. RANDOM emits i.i.d. uniform scores from its seed; MAJORITY a
// constant score equal to the training BI fraction.
std::unique_ptr<TrainedModel> train_random(std::vector<std::string> schema, std::uint64_t seed);
std::unique_ptr<TrainedModel> train_majority(const TrainInput& input);

// Versioned structured-text model blob.
void save_model(const TrainedModel& model, const std::string& path);
std::unique_ptr<TrainedModel> load_model(const std::string& path);

}  // namespace bibo
