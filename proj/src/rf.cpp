#include "bibo/rf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "bibo/errors.hpp"
#include "bibo/parallel.hpp"
#include "bibo/rng.hpp"

namespace bibo {

std::string_view to_string(MaxFeatures mf) {
    switch (mf) {
        case MaxFeatures::All: return "all";
        case MaxFeatures::Sqrt: return "sqrt";
        case MaxFeatures::Log2: return "log2";
    }
    return "all";
}

std::string_view to_string(SplitCriterion c) {
    return c == SplitCriterion::Gini ? "gini" : "entropy";
}

MaxFeatures max_features_from_string(std::string_view text) {
    if (text == "all" || text == "auto") return MaxFeatures::All;
    if (text == "sqrt") return MaxFeatures::Sqrt;
    if (text == "log2") return MaxFeatures::Log2;
    throw SchemaError("unknown max_features '" + std::string(text) + "'");
}

SplitCriterion split_criterion_from_string(std::string_view text) {
    if (text == "gini") return SplitCriterion::Gini;
    if (text == "entropy") return SplitCriterion::Entropy;
    throw SchemaError("unknown criterion '" + std::string(text) + "'");
}

std::vector<RfConfig> rf_grid() {
    static const int estimators[] = {10, 20, 100, 200, 500};
    static const MaxFeatures features[] = {MaxFeatures::All, MaxFeatures::Sqrt, MaxFeatures::Log2};
    static const int depths[] = {3, 4, 6, 7, 8};
    static const SplitCriterion criteria[] = {SplitCriterion::Gini, SplitCriterion::Entropy};
    std::vector<RfConfig> grid;
    grid.reserve(150);
    for (int n : estimators) {
        for (MaxFeatures mf : features) {
            for (int d : depths) {
                for (SplitCriterion c : criteria) {
                    RfConfig cfg;
                    cfg.n_estimators = n;
                    cfg.max_features = mf;
                    cfg.max_depth = d;
                    cfg.criterion = c;
                    grid.push_back(cfg);
                }
            }
        }
    }
    return grid;
}

namespace {

constexpr double kMinGain = 1e-9;

std::size_t candidate_count(MaxFeatures mf, std::size_t n_features) {
    switch (mf) {
        case MaxFeatures::All: return n_features;
        case MaxFeatures::Sqrt:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::sqrt(static_cast<double>(n_features))));
        case MaxFeatures::Log2:
            return std::max<std::size_t>(
                1, static_cast<std::size_t>(std::log2(static_cast<double>(n_features))));
    }
    return n_features;
}

// Sum over children of n_child * impurity(child); lower is better.
struct ImpurityEval {
    SplitCriterion criterion;
    const double* xlogx;  // precomputed k * ln(k)

    double operator()(std::uint32_t n, std::uint32_t pos) const {
        const std::uint32_t neg = n - pos;
        if (criterion == SplitCriterion::Gini) {
            const double dn = static_cast<double>(n);
            const double dp = static_cast<double>(pos);
            const double dg = static_cast<double>(neg);
            return dn - (dp * dp + dg * dg) / dn;
        }
        return xlogx[n] - xlogx[pos] - xlogx[neg];
    }
};

struct TreeBuilder {
    const std::uint8_t* binned = nullptr;  // row-major, n_local x n_features
    const std::uint8_t* labels = nullptr;  // local 0/1
    std::size_t n_features = 0;
    int max_depth = 0;
    std::size_t n_candidates = 0;
    bool sample_features = false;
    ImpurityEval impurity{SplitCriterion::Gini, nullptr};
    Rng* rng = nullptr;

    std::vector<std::uint32_t> order;  // in-bag ids, partitioned in place
    std::vector<RfNode> nodes;
    std::vector<std::uint64_t> hist;       // n_candidates x kRfBins, packed (count | pos<<32)
    std::vector<std::uint32_t> cand_pool;  // feature sampling scratch
    // when all features are candidates, one histogram slot per depth enables
    // deriving the bigger child's histogram as parent minus sibling
    std::vector<std::vector<std::uint64_t>> hist_stack;

    void pick_candidates(std::vector<std::uint32_t>& out) {
        out.clear();
        if (cand_pool.size() != n_features) {
            cand_pool.resize(n_features);
        }
        for (std::uint32_t f = 0; f < n_features; ++f) cand_pool[f] = f;
        for (std::size_t i = 0; i < n_candidates; ++i) {
            const std::size_t j = i + rng->uniform_index(n_features - i);
            std::swap(cand_pool[i], cand_pool[j]);
            out.push_back(cand_pool[i]);
        }
    }

    void accumulate_full(std::vector<std::uint64_t>& h, std::size_t lo, std::size_t hi) {
        std::fill(h.begin(), h.end(), 0);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint8_t* row = binned + static_cast<std::size_t>(order[i]) * n_features;
            const std::uint64_t tag = 1ULL | (static_cast<std::uint64_t>(labels[order[i]]) << 32);
            for (std::size_t f = 0; f < n_features; ++f) {
                h[f * kRfBins + row[f]] += tag;
            }
        }
    }

    struct Split {
        double cost = std::numeric_limits<double>::infinity();
        std::int32_t feature = -1;
        int bin = -1;
    };

    Split scan(const std::uint64_t* h, std::size_t n_cand, const std::uint32_t* cand,
               std::uint32_t n, std::uint32_t pos) const {
        Split best;
        for (std::size_t c = 0; c < n_cand; ++c) {
            const std::uint64_t* hc = h + c * kRfBins;
            std::uint32_t ln = 0, lp = 0;
            for (int b = 0; b + 1 < kRfBins; ++b) {
                ln += static_cast<std::uint32_t>(hc[b]);
                lp += static_cast<std::uint32_t>(hc[b] >> 32);
                if (ln == 0) continue;
                const std::uint32_t rn = n - ln;
                if (rn == 0) break;
                const double cost = impurity(ln, lp) + impurity(rn, pos - lp);
                if (cost < best.cost) {
                    best.cost = cost;
                    best.feature = cand ? static_cast<std::int32_t>(cand[c])
                                        : static_cast<std::int32_t>(c);
                    best.bin = b;
                }
            }
        }
        return best;
    }

    std::size_t partition_by(std::size_t lo, std::size_t hi, std::size_t feat,
                             std::uint8_t threshold) {
        auto mid_it = std::partition(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                     order.begin() + static_cast<std::ptrdiff_t>(hi),
                                     [&](std::uint32_t id) {
                                         return binned[static_cast<std::size_t>(id) * n_features +
                                                       feat] <= threshold;
                                     });
        return static_cast<std::size_t>(mid_it - order.begin());
    }

    // Feature-sampled route: fresh histogram of the sampled candidates per node.
    std::int32_t build_sampled(std::size_t lo, std::size_t hi, int depth,
                               std::vector<std::uint32_t>& candidates) {
        const std::uint32_t n = static_cast<std::uint32_t>(hi - lo);
        std::uint32_t pos = 0;
        for (std::size_t i = lo; i < hi; ++i) pos += labels[order[i]];

        const std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].prob = static_cast<float>(static_cast<double>(pos) / n);

        if (depth >= max_depth || n < 2 || pos == 0 || pos == n) {
            return node_id;
        }

        pick_candidates(candidates);
        const std::size_t n_cand = candidates.size();
        hist.assign(n_cand * kRfBins, 0);
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint8_t* row = binned + static_cast<std::size_t>(order[i]) * n_features;
            const std::uint64_t tag = 1ULL | (static_cast<std::uint64_t>(labels[order[i]]) << 32);
            for (std::size_t c = 0; c < n_cand; ++c) {
                hist[c * kRfBins + row[candidates[c]]] += tag;
            }
        }

        const Split best = scan(hist.data(), n_cand, candidates.data(), n, pos);
        if (best.feature < 0 || best.cost >= impurity(n, pos) - kMinGain) {
            return node_id;
        }
        const std::size_t mid =
            partition_by(lo, hi, static_cast<std::size_t>(best.feature),
                         static_cast<std::uint8_t>(best.bin));
        nodes[node_id].feature = best.feature;
        nodes[node_id].bin_threshold = static_cast<std::uint8_t>(best.bin);
        const std::int32_t left = build_sampled(lo, mid, depth + 1, candidates);
        nodes[node_id].left = left;
        const std::int32_t right = build_sampled(mid, hi, depth + 1, candidates);
        nodes[node_id].right = right;
        return node_id;
    }

    // All-features route. Returns (node id, whether hist_stack[depth] holds
    // this node's histogram). The smaller child is grown first and the
    // sibling's histogram is derived by subtraction when available.
    std::pair<std::int32_t, bool> build_all(std::size_t lo, std::size_t hi, int depth,
                                            bool hist_ready) {
        const std::uint32_t n = static_cast<std::uint32_t>(hi - lo);
        std::uint32_t pos = 0;
        for (std::size_t i = lo; i < hi; ++i) pos += labels[order[i]];

        const std::int32_t node_id = static_cast<std::int32_t>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].prob = static_cast<float>(static_cast<double>(pos) / n);

        if (depth >= max_depth || n < 2 || pos == 0 || pos == n) {
            return {node_id, hist_ready};
        }

        auto& h = hist_stack[static_cast<std::size_t>(depth)];
        if (h.size() != n_features * kRfBins) h.resize(n_features * kRfBins);
        if (!hist_ready) accumulate_full(h, lo, hi);

        const Split best = scan(h.data(), n_features, nullptr, n, pos);
        if (best.feature < 0 || best.cost >= impurity(n, pos) - kMinGain) {
            return {node_id, true};
        }
        const std::size_t mid =
            partition_by(lo, hi, static_cast<std::size_t>(best.feature),
                         static_cast<std::uint8_t>(best.bin));
        nodes[node_id].feature = best.feature;
        nodes[node_id].bin_threshold = static_cast<std::uint8_t>(best.bin);

        const bool left_smaller = mid - lo <= hi - mid;
        const std::size_t s_lo = left_smaller ? lo : mid;
        const std::size_t s_hi = left_smaller ? mid : hi;
        const std::size_t g_lo = left_smaller ? mid : lo;
        const std::size_t g_hi = left_smaller ? hi : mid;

        const auto [small_id, small_built] = build_all(s_lo, s_hi, depth + 1, false);
        bool big_ready = false;
        if (small_built) {
            auto& child = hist_stack[static_cast<std::size_t>(depth + 1)];
            for (std::size_t i = 0; i < child.size(); ++i) child[i] = h[i] - child[i];
            big_ready = true;
        }
        const auto [big_id, big_built] = build_all(g_lo, g_hi, depth + 1, big_ready);
        (void)big_built;

        nodes[node_id].left = left_smaller ? small_id : big_id;
        nodes[node_id].right = left_smaller ? big_id : small_id;
        return {node_id, true};
    }

    void build_root(std::size_t count) {
        std::vector<std::uint32_t> candidates;
        candidates.reserve(n_candidates);
        if (sample_features) {
            build_sampled(0, count, 0, candidates);
        } else {
            hist_stack.assign(static_cast<std::size_t>(max_depth) + 1, {});
            build_all(0, count, 0, false);
        }
    }
};

}  // namespace

RfModel::RfModel(RfConfig config, std::vector<std::string> schema, bool degenerate,
                 double degenerate_prob)
    : TrainedModel(ModelKind::RF, std::move(schema), degenerate),
      degenerate_prob_(degenerate_prob),
      config_(config) {}

std::uint8_t RfModel::bin_value(std::size_t feature, double value) const {
    const double width = bin_width_[feature];
    if (width <= 0.0) return 0;
    const double rel = (value - bin_min_[feature]) / width;
    if (rel <= 0.0) return 0;
    if (rel >= static_cast<double>(kRfBins - 1)) return kRfBins - 1;
    return static_cast<std::uint8_t>(rel);
}

double RfModel::tree_score(std::size_t tree, std::span<const double> row) const {
    const std::vector<RfNode>& nodes = trees_[tree];
    std::int32_t at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
        const RfNode& node = nodes[static_cast<std::size_t>(at)];
        const std::size_t f = static_cast<std::size_t>(node.feature);
        at = bin_value(f, row[f]) <= node.bin_threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(at)].prob;
}

std::vector<double> RfModel::predict_scores(std::span<const double> data,
                                            std::size_t n_rows) const {
    std::vector<double> scores(n_rows);
    if (degenerate_ || trees_.empty()) {
        std::fill(scores.begin(), scores.end(), degenerate_prob_);
        return scores;
    }
    const std::size_t n_cols = schema_.size();
    std::vector<std::uint8_t> binned_row(n_cols);
    for (std::size_t r = 0; r < n_rows; ++r) {
        const double* row = data.data() + r * n_cols;
        for (std::size_t f = 0; f < n_cols; ++f) binned_row[f] = bin_value(f, row[f]);
        double sum = 0.0;
        for (const auto& nodes : trees_) {
            std::int32_t at = 0;
            while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
                const RfNode& node = nodes[static_cast<std::size_t>(at)];
                at = binned_row[static_cast<std::size_t>(node.feature)] <= node.bin_threshold
                         ? node.left
                         : node.right;
            }
            sum += nodes[static_cast<std::size_t>(at)].prob;
        }
        scores[r] = sum / static_cast<double>(trees_.size());
    }
    return scores;
}

std::unique_ptr<RfModel> train_rf(const TrainInput& input, const RfConfig& config,
                                  unsigned n_threads) {
    if (config.n_estimators < 1) throw ConfigError("RfConfig: n_estimators must be >= 1");
    if (config.max_depth < 1) throw ConfigError("RfConfig: max_depth must be >= 1");
    const std::size_t n = input.rows.size();
    const std::size_t n_features = input.n_cols;
    if (n < 2) throw std::invalid_argument("train_rf: need at least 2 training rows");

    std::vector<std::string> schema(input.columns.begin(), input.columns.end());

    std::size_t n_pos = 0;
    for (std::size_t r : input.rows) {
        if (input.labels[r] == Bibo::BI) ++n_pos;
    }
    if (n_pos == 0 || n_pos == n) {
        // single-class data: constant predictor, flagged
        auto model = std::make_unique<RfModel>(config, std::move(schema), true,
                                               n_pos == 0 ? 0.0 : 1.0);
        model->bin_min_.assign(n_features, 0.0);
        model->bin_width_.assign(n_features, 0.0);
        return model;
    }

    auto model = std::make_unique<RfModel>(config, std::move(schema), false, 0.0);

    // equal-width binning fitted on the training rows
    model->bin_min_.assign(n_features, std::numeric_limits<double>::infinity());
    model->bin_width_.assign(n_features, 0.0);
    std::vector<double> bin_max(n_features, -std::numeric_limits<double>::infinity());
    for (std::size_t r : input.rows) {
        const double* row = input.data.data() + r * n_features;
        for (std::size_t f = 0; f < n_features; ++f) {
            model->bin_min_[f] = std::min(model->bin_min_[f], row[f]);
            bin_max[f] = std::max(bin_max[f], row[f]);
        }
    }
    for (std::size_t f = 0; f < n_features; ++f) {
        const double span = bin_max[f] - model->bin_min_[f];
        model->bin_width_[f] = span > 0.0 ? span / kRfBins : 0.0;
    }

    // local binned matrix and label array over the training rows
    std::vector<std::uint8_t> binned(n * n_features);
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = input.rows[i];
        const double* row = input.data.data() + r * n_features;
        std::uint8_t* out = binned.data() + i * n_features;
        for (std::size_t f = 0; f < n_features; ++f) {
            const double width = model->bin_width_[f];
            if (width <= 0.0) {
                out[f] = 0;
                continue;
            }
            const double rel = (row[f] - model->bin_min_[f]) / width;
            out[f] = rel <= 0.0 ? 0
                     : rel >= static_cast<double>(kRfBins - 1)
                         ? static_cast<std::uint8_t>(kRfBins - 1)
                         : static_cast<std::uint8_t>(rel);
        }
        labels[i] = input.labels[r] == Bibo::BI ? 1 : 0;
    }

    const std::size_t oob_count = n / 3;
    const std::size_t ib_count = n - oob_count;
    const std::size_t n_trees = static_cast<std::size_t>(config.n_estimators);
    model->trees_.resize(n_trees);

    std::vector<std::vector<std::uint32_t>> oob_sets;
    if (config.compute_oob_score) oob_sets.resize(n_trees);

    // per-feature xlogx table for the entropy criterion
    std::vector<double> xlogx(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) {
        xlogx[k] = static_cast<double>(k) * std::log(static_cast<double>(k));
    }

    parallel_for(
        n_trees,
        [&](std::size_t t) {
            Rng rng(derive_seed(config.seed, "rf.tree", {t}));
            TreeBuilder builder;
            builder.binned = binned.data();
            builder.labels = labels.data();
            builder.n_features = n_features;
            builder.max_depth = config.max_depth;
            builder.n_candidates = candidate_count(config.max_features, n_features);
            builder.sample_features = config.max_features != MaxFeatures::All &&
                                      builder.n_candidates < n_features;
            builder.impurity = ImpurityEval{config.criterion, xlogx.data()};
            builder.rng = &rng;

            builder.order.resize(ib_count);
            std::vector<std::uint32_t> oob;
            for (std::size_t i = 0; i < ib_count; ++i) {
                builder.order[i] = static_cast<std::uint32_t>(rng.uniform_index(n));
            }
            for (std::size_t i = 0; i < oob_count; ++i) {
                oob.push_back(static_cast<std::uint32_t>(rng.uniform_index(n)));
            }
            builder.nodes.reserve(64);
            builder.build_root(ib_count);
            model->trees_[t] = std::move(builder.nodes);
            if (config.compute_oob_score) oob_sets[t] = std::move(oob);
        },
        n_threads);

    if (config.compute_oob_score) {
        std::vector<double> sum(n, 0.0);
        std::vector<std::uint32_t> cnt(n, 0);
        for (std::size_t t = 0; t < n_trees; ++t) {
            for (std::uint32_t i : oob_sets[t]) {
                const std::uint8_t* row = binned.data() + static_cast<std::size_t>(i) * n_features;
                const auto& nodes = model->trees_[t];
                std::int32_t at = 0;
                while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
                    const RfNode& node = nodes[static_cast<std::size_t>(at)];
                    at = row[static_cast<std::size_t>(node.feature)] <= node.bin_threshold
                             ? node.left
                             : node.right;
                }
                sum[i] += nodes[static_cast<std::size_t>(at)].prob;
                ++cnt[i];
            }
        }
        std::size_t correct = 0, scored = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (cnt[i] == 0) continue;
            ++scored;
            const bool pred_bi = sum[i] / cnt[i] >= 0.5;
            if (pred_bi == (labels[i] == 1)) ++correct;
        }
        model->oob_accuracy_ = scored > 0
                                   ? static_cast<double>(correct) / static_cast<double>(scored)
                                   : -1.0;
    }
    return model;
}

std::string RfModel::params_json() const {
    nlohmann::json j;
    j["n_estimators"] = config_.n_estimators;
    j["max_features"] = std::string(to_string(config_.max_features));
    j["max_depth"] = config_.max_depth;
    j["criterion"] = std::string(to_string(config_.criterion));
    j["seed"] = config_.seed;
    j["degenerate_prob"] = degenerate_prob_;
    j["oob_accuracy"] = oob_accuracy_;
    j["bin_min"] = bin_min_;
    j["bin_width"] = bin_width_;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& nodes : trees_) {
        nlohmann::json tree = nlohmann::json::array();
        for (const auto& node : nodes) {
            tree.push_back({node.feature, node.left, node.right,
                            static_cast<int>(node.bin_threshold), node.prob});
        }
        trees.push_back(std::move(tree));
    }
    j["trees"] = std::move(trees);
    return j.dump();
}

}  // namespace bibo
