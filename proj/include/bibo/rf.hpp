#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bibo/model.hpp"

namespace bibo {

enum class MaxFeatures : std::uint8_t { All = 0, Sqrt = 1, Log2 = 2 };
enum class SplitCriterion : std::uint8_t { Gini = 0, Entropy = 1 };

std::string_view to_string(MaxFeatures mf);
std::string_view to_string(SplitCriterion c);
MaxFeatures max_features_from_string(std::string_view text);
SplitCriterion split_criterion_from_string(std::string_view text);

struct RfConfig {
    int n_estimators = 200;
    MaxFeatures max_features = MaxFeatures::All;  // the grid's "auto"
    int max_depth = 8;
    SplitCriterion criterion = SplitCriterion::Gini;
    std::uint64_t seed = 0;
    bool compute_oob_score = false;

    // trees, for complexity tie-breaks
    int complexity() const { return n_estimators; }
};

// The paper's 150-point search space, in canonical enumeration order.
std::vector<RfConfig> rf_grid();

// Feature values are quantized to equal-width bins computed on the training
// rows; trees split on bin boundaries.
inline constexpr int kRfBins = 64;

struct RfNode {
    // feature < 0 marks a leaf
    std::int32_t feature = -1;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t bin_threshold = 0;  // go left when bin <= threshold
    float prob = 0.0f;               // leaf BI probability
};

class RfModel final : public TrainedModel {
public:
    RfModel(RfConfig config, std::vector<std::string> schema, bool degenerate,
            double degenerate_prob);

    std::vector<double> predict_scores(std::span<const double> data,
                                       std::size_t n_rows) const override;
    std::string params_json() const override;

    // Per-tree BI probability for one row; used for prefix evaluation and
    // ensemble diagnostics.
    double tree_score(std::size_t tree, std::span<const double> row) const;

    const RfConfig& config() const { return config_; }
    std::size_t tree_count() const { return trees_.size(); }
    double oob_accuracy() const { return oob_accuracy_; }

    // training internals, filled by train_rf / the deserializer
    std::vector<std::vector<RfNode>> trees_;
    std::vector<double> bin_min_;    // per feature
    std::vector<double> bin_width_;  // per feature; 0 for constant columns
    double degenerate_prob_ = 0.0;
    double oob_accuracy_ = -1.0;  // negative = not computed

private:
    std::uint8_t bin_value(std::size_t feature, double value) const;

    RfConfig config_;
};

// Bootstraps per tree, holds one third of each bootstrap out of bag, grows
// the tree on the in-bag remainder. Deterministic per config.seed; tree t's
// stream depends only on (seed, t), so prefixes of a larger forest equal a
// smaller one.
std::unique_ptr<RfModel> train_rf(const TrainInput& input, const RfConfig& config,
                                  unsigned n_threads = 1);

}  // namespace bibo
