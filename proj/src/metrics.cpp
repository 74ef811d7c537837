#include "bibo/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace bibo {

ConfusionMatrix confusion(std::span<const Bibo> labels, std::span<const Bibo> predictions) {
    if (labels.size() != predictions.size()) {
        throw std::invalid_argument("confusion: labels and predictions differ in length");
    }
    if (labels.empty()) {
        throw std::invalid_argument("confusion: empty input");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool truth = labels[i] == Bibo::BI;
        const bool pred = predictions[i] == Bibo::BI;
        if (truth && pred) ++cm.tp;
        else if (truth && !pred) ++cm.fn;
        else if (!truth && pred) ++cm.fp;
        else ++cm.tn;
    }
    return cm;
}

ClassificationScores prf1a(const ConfusionMatrix& cm) {
    ClassificationScores s;
    auto ratio = [&s](std::uint64_t num, std::uint64_t den) {
        if (den == 0) {
            s.degenerate = true;
            return 0.0;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    s.precision = ratio(cm.tp, cm.tp + cm.fp);
    s.recall = ratio(cm.tp, cm.tp + cm.fn);
    if (s.precision + s.recall == 0.0) {
        s.f1 = 0.0;
        s.degenerate = true;
    } else {
        s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
    }
    s.accuracy = ratio(cm.tp + cm.tn, cm.total());
    s.fpr = ratio(cm.fp, cm.tn + cm.fp);
    return s;
}

std::optional<double> auc(std::span<const Bibo> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("auc: labels and scores differ in length");
    }
    const std::size_t n = labels.size();
    std::size_t n_pos = 0;
    for (Bibo l : labels) {
        if (l == Bibo::BI) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Rank sum of positives with average ranks over tie groups.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[order[k]] == Bibo::BI) rank_sum_pos += avg_rank;
        }
        i = j + 1;
    }
    const double u = rank_sum_pos -
                     0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::optional<double> roc_auc_trapezoid(std::span<const Bibo> labels,
                                        std::span<const double> scores) {
    if (labels.size() != scores.size()) {
        throw std::invalid_argument("roc_auc_trapezoid: labels and scores differ in length");
    }
    const std::size_t n = labels.size();
    std::size_t n_pos = 0;
    for (Bibo l : labels) {
        if (l == Bibo::BI) ++n_pos;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::nullopt;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk thresholds from high to low; equal scores advance TP and FP
    // together, which traces the tie diagonal the trapezoid rule halves.
    double area = 0.0;
    std::uint64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        std::uint64_t d_tp = 0, d_fp = 0;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == Bibo::BI) ++d_tp;
            else ++d_fp;
            ++j;
        }
        const double tpr0 = static_cast<double>(tp) / static_cast<double>(n_pos);
        tp += d_tp;
        fp += d_fp;
        const double tpr1 = static_cast<double>(tp) / static_cast<double>(n_pos);
        area += static_cast<double>(d_fp) / static_cast<double>(n_neg) * 0.5 * (tpr0 + tpr1);
        i = j;
    }
    return area;
}

}  // namespace bibo
