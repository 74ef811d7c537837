#include "bibo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "bibo/metrics.hpp"
#include "bibo/parallel.hpp"

namespace bibo {

std::vector<std::vector<int>> make_group_folds(std::span<const int> users, std::size_t k,
                                               Rng& rng) {
    std::vector<int> shuffled(users.begin(), users.end());
    std::sort(shuffled.begin(), shuffled.end());
    rng.shuffle(shuffled);
    const std::size_t n = shuffled.size();
    const std::size_t k_eff = std::min(k, n);
    if (k_eff < 2) {
        throw std::invalid_argument("make_group_folds: need at least 2 user groups");
    }
    std::vector<std::vector<int>> folds(k_eff);
    const std::size_t base = n / k_eff;
    const std::size_t extra = n % k_eff;
    std::size_t at = 0;
    for (std::size_t f = 0; f < k_eff; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) folds[f].push_back(shuffled[at++]);
    }
    return folds;
}

namespace {

struct FoldRows {
    std::vector<std::size_t> train;
    std::vector<std::size_t> eval;
};

std::vector<FoldRows> split_rows_by_fold(const TrainInput& input, std::span<const int> row_users,
                                         const std::vector<std::vector<int>>& folds) {
    std::vector<FoldRows> out(folds.size());
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const std::set<int> held(folds[f].begin(), folds[f].end());
        for (std::size_t r : input.rows) {
            if (held.count(row_users[r])) {
                out[f].eval.push_back(r);
            } else {
                out[f].train.push_back(r);
            }
        }
    }
    return out;
}

double fold_auc(const TrainInput& input, std::span<const std::size_t> eval_rows,
                std::span<const double> scores) {
    std::vector<Bibo> labels;
    labels.reserve(eval_rows.size());
    for (std::size_t r : eval_rows) labels.push_back(input.labels[r]);
    const auto value = auc(labels, scores);
    return value ? *value : std::numeric_limits<double>::quiet_NaN();
}

void finalize_row(GridCvRow& row) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (double a : row.fold_aucs) {
        if (std::isnan(a)) {
            ++row.undefined_folds;
        } else {
            sum += a;
            ++defined;
        }
    }
    row.mean_auc = defined > 0 ? sum / static_cast<double>(defined)
                               : std::numeric_limits<double>::quiet_NaN();
}

// Highest mean AUC; exact ties prefer lower complexity, then earlier grid
// position. All-undefined rows never win.
template <typename Complexity>
std::size_t select_best(const std::vector<GridCvRow>& table, Complexity complexity) {
    std::size_t best = table.size();
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (std::isnan(table[i].mean_auc)) continue;
        if (best == table.size()) {
            best = i;
            continue;
        }
        if (table[i].mean_auc > table[best].mean_auc) {
            best = i;
        } else if (table[i].mean_auc == table[best].mean_auc &&
                   complexity(i) < complexity(best)) {
            best = i;
        }
    }
    if (best == table.size()) {
        throw std::invalid_argument("grid search: every fold of every config was single-class");
    }
    return best;
}

}  // namespace

RfGridResult grid_search_rf(const TrainInput& input, std::span<const int> row_users,
                            std::span<const RfConfig> grid, std::size_t k, std::uint64_t seed,
                            unsigned n_threads) {
    if (grid.empty()) throw std::invalid_argument("grid_search_rf: empty grid");
    std::set<int> user_set;
    for (std::size_t r : input.rows) user_set.insert(row_users[r]);
    std::vector<int> users(user_set.begin(), user_set.end());
    Rng fold_rng(derive_seed(seed, "cv.folds"));
    const auto folds = make_group_folds(users, k, fold_rng);
    const auto fold_rows = split_rows_by_fold(input, row_users, folds);

    // Configs differing only in n_estimators share one tree stream per fold:
    // train the largest forest, score prefixes at each estimator count.
    struct Combo {
        MaxFeatures max_features;
        int max_depth;
        SplitCriterion criterion;
        std::vector<std::pair<int, std::size_t>> checkpoints;  // (n_estimators, grid index)
    };
    std::map<std::tuple<int, int, int>, std::size_t> combo_index;
    std::vector<Combo> combos;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto key = std::make_tuple(static_cast<int>(grid[g].max_features),
                                         grid[g].max_depth, static_cast<int>(grid[g].criterion));
        auto [it, inserted] = combo_index.try_emplace(key, combos.size());
        if (inserted) {
            Combo c;
            c.max_features = grid[g].max_features;
            c.max_depth = grid[g].max_depth;
            c.criterion = grid[g].criterion;
            combos.push_back(std::move(c));
        }
        combos[it->second].checkpoints.emplace_back(grid[g].n_estimators, g);
    }
    for (auto& combo : combos) {
        std::sort(combo.checkpoints.begin(), combo.checkpoints.end());
    }

    RfGridResult result;
    result.table.assign(grid.size(), GridCvRow{});
    for (auto& row : result.table) {
        row.fold_aucs.assign(folds.size(), std::numeric_limits<double>::quiet_NaN());
    }

    const std::size_t n_tasks = combos.size() * folds.size();
    parallel_for(
        n_tasks,
        [&](std::size_t task) {
            const std::size_t ci = task / folds.size();
            const std::size_t f = task % folds.size();
            const Combo& combo = combos[ci];

            TrainInput fold_input = input;
            fold_input.rows = fold_rows[f].train;

            RfConfig config;
            config.n_estimators = combo.checkpoints.back().first;
            config.max_features = combo.max_features;
            config.max_depth = combo.max_depth;
            config.criterion = combo.criterion;
            config.seed = derive_seed(seed, "cv.rf", {ci, f});
            const auto forest = train_rf(fold_input, config, 1);

            const auto& eval_rows = fold_rows[f].eval;
            if (forest->degenerate()) {
                // single-class training fold: constant scores at every size
                const std::vector<double> scores(eval_rows.size(), forest->degenerate_prob_);
                const double a = fold_auc(input, eval_rows, scores);
                for (const auto& [n_est, grid_idx] : combo.checkpoints) {
                    result.table[grid_idx].fold_aucs[f] = a;
                }
                return;
            }
            std::vector<double> sums(eval_rows.size(), 0.0);
            std::size_t next = 0;
            for (std::size_t t = 0; t < forest->tree_count(); ++t) {
                for (std::size_t i = 0; i < eval_rows.size(); ++i) {
                    sums[i] += forest->tree_score(t, input.row(eval_rows[i]));
                }
                while (next < combo.checkpoints.size() &&
                       static_cast<std::size_t>(combo.checkpoints[next].first) == t + 1) {
                    std::vector<double> scores(sums.size());
                    for (std::size_t i = 0; i < sums.size(); ++i) {
                        scores[i] = sums[i] / static_cast<double>(t + 1);
                    }
                    result.table[combo.checkpoints[next].second].fold_aucs[f] =
                        fold_auc(input, eval_rows, scores);
                    ++next;
                }
            }
        },
        n_threads);

    for (auto& row : result.table) finalize_row(row);
    result.best_index = select_best(result.table, [&](std::size_t i) {
        return grid[i].complexity();
    });
    result.best = grid[result.best_index];
    return result;
}

MlpGridResult grid_search_mlp(const TrainInput& input, std::span<const int> row_users,
                              std::span<const MlpConfig> grid, std::size_t k, std::uint64_t seed,
                              unsigned n_threads) {
    if (grid.empty()) throw std::invalid_argument("grid_search_mlp: empty grid");
    std::set<int> user_set;
    for (std::size_t r : input.rows) user_set.insert(row_users[r]);
    std::vector<int> users(user_set.begin(), user_set.end());
    Rng fold_rng(derive_seed(seed, "cv.folds"));
    const auto folds = make_group_folds(users, k, fold_rng);
    const auto fold_rows = split_rows_by_fold(input, row_users, folds);

    MlpGridResult result;
    result.table.assign(grid.size(), GridCvRow{});
    for (auto& row : result.table) {
        row.fold_aucs.assign(folds.size(), std::numeric_limits<double>::quiet_NaN());
    }

    const std::size_t n_tasks = grid.size() * folds.size();
    parallel_for(
        n_tasks,
        [&](std::size_t task) {
            const std::size_t g = task / folds.size();
            const std::size_t f = task % folds.size();

            TrainInput fold_input = input;
            fold_input.rows = fold_rows[f].train;

            MlpConfig config = grid[g];
            config.seed = derive_seed(seed, "cv.mlp", {g, f});
            const auto model = train_mlp(fold_input, config);

            const auto& eval_rows = fold_rows[f].eval;
            std::vector<double> flat;
            flat.reserve(eval_rows.size() * input.n_cols);
            for (std::size_t r : eval_rows) {
                const auto row = input.row(r);
                flat.insert(flat.end(), row.begin(), row.end());
            }
            const auto scores = model->predict_scores(flat, eval_rows.size());
            result.table[g].fold_aucs[f] = fold_auc(input, eval_rows, scores);
        },
        n_threads);

    for (auto& row : result.table) finalize_row(row);
    const std::int64_t n_inputs = static_cast<std::int64_t>(input.n_cols);
    result.best_index = select_best(result.table, [&](std::size_t i) {
        return grid[i].complexity(n_inputs);
    });
    result.best = grid[result.best_index];
    return result;
}

}  // namespace bibo
