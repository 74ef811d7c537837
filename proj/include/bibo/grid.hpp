#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bibo/mlp.hpp"
#include "bibo/model.hpp"
#include "bibo/rf.hpp"

namespace bibo {

// Cross-validation outcome of one grid point. Folds whose evaluation labels
// were single-class score NaN and are excluded from the mean.
struct GridCvRow {
    double mean_auc = 0.0;
    std::vector<double> fold_aucs;
    std::size_t undefined_folds = 0;
};

// Folds are sets of user ids: every user's rows land in exactly one fold.
// k is capped at the user count.
std::vector<std::vector<int>> make_group_folds(std::span<const int> users, std::size_t k,
                                               Rng& rng);

struct RfGridResult {
    RfConfig best;
    std::size_t best_index = 0;
    std::vector<GridCvRow> table;
};

struct MlpGridResult {
    MlpConfig best;
    std::size_t best_index = 0;
    std::vector<GridCvRow> table;
};

// Exhaustive evaluation of the grid with user-grouped k-fold CV. Best =
// highest mean fold AUC; exact ties break on lower complexity (fewer trees /
// fewer parameters), then on grid order. Configs sharing everything but the
// estimator count share the tree stream, so prefixes evaluate the smaller
// forests.
RfGridResult grid_search_rf(const TrainInput& input, std::span<const int> row_users,
                            std::span<const RfConfig> grid, std::size_t k, std::uint64_t seed,
                            unsigned n_threads = 1);

MlpGridResult grid_search_mlp(const TrainInput& input, std::span<const int> row_users,
                              std::span<const MlpConfig> grid, std::size_t k, std::uint64_t seed,
                              unsigned n_threads = 1);

}  // namespace bibo
