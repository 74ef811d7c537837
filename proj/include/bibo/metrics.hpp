#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bibo/types.hpp"

namespace bibo {

struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const { return tp + tn + fp + fn; }
};

// BI is the positive class. Throws on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const Bibo> labels, std::span<const Bibo> predictions);

struct ClassificationScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    double fpr = 0.0;
    // Set when any ratio had a zero denominator and was reported as 0.
    bool degenerate = false;
};

ClassificationScores prf1a(const ConfusionMatrix& cm);

// Probability that a random positive outranks a random negative, ties at
// half credit (Mann-Whitney). Rank-based, O(n log n). nullopt when labels
// contain a single class; never silently 0.
std::optional<double> auc(std::span<const Bibo> labels, std::span<const double> scores);

// Trapezoidal area under the ROC curve swept over every distinct score
// threshold. Agrees with auc() to floating-point precision; kept as an
// independent algebraic route for cross-checking.
std::optional<double> roc_auc_trapezoid(std::span<const Bibo> labels,
                                        std::span<const double> scores);

// One evaluation cell of the Monte-Carlo harness.
struct EvalRecord {
    std::string sensor;
    std::string model;
    std::string setting;  // "<trained-on>/<evaluated-on>"
    double lambda = 0.0;
    int draw = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double accuracy = 0.0;
    double fpr = 0.0;
    // NaN when the validation labels were single-class (flagged).
    double auc_value = 0.0;
    double flip_fraction = 0.0;
    std::vector<std::string> flags;
    std::uint64_t seed = 0;  // derived stream seed, for replay
};

}  // namespace bibo
