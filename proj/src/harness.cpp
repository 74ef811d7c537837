#include "bibo/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "bibo/errors.hpp"
#include "bibo/features.hpp"
#include "bibo/grid.hpp"
#include "bibo/mlp.hpp"
#include "bibo/model.hpp"
#include "bibo/parallel.hpp"
#include "bibo/rf.hpp"
#include "bibo/stats.hpp"
#include "bibo/text.hpp"

namespace bibo {

std::vector<double> SweepSpec::levels() const {
    std::vector<double> out;
    if (include_zero_control) out.push_back(0.0);
    for (double v = start; v <= max_err + 1e-12; v += step) out.push_back(v);
    return out;
}

void validate(const RunConfig& config) {
    if (config.sensors.empty()) throw ConfigError("RunConfig: no sensor families selected");
    if (config.models.empty()) throw ConfigError("RunConfig: no model kinds selected");
    for (ModelKind kind : config.models) {
        if (kind != ModelKind::RF && kind != ModelKind::MLP) {
            throw ConfigError("RunConfig: only RF and MLP are trainable model kinds");
        }
    }
    if (!(config.sweep.start > 0.0) || !(config.sweep.step > 0.0)) {
        throw ConfigError("RunConfig: sweep start and step must be > 0");
    }
    if (config.sweep.max_err < 0.0) throw ConfigError("RunConfig: MERR must be >= 0");
    if (config.draws_per_level < 1) throw ConfigError("RunConfig: draws per level must be >= 1");
    if (config.validation_fraction < 0.0 || config.validation_fraction >= 1.0) {
        throw ConfigError("RunConfig: validation fraction must be in [0, 1)");
    }
    if (config.cv_folds < 2) throw ConfigError("RunConfig: cv folds must be >= 2");
    if (config.sweep.levels().empty()) {
        throw ConfigError("RunConfig: empty error sweep");
    }
    validate(config.ewma);
}

std::pair<std::vector<int>, std::vector<int>> split_oos(std::span<const int> users,
                                                        double fraction, Rng& rng) {
    if (users.size() < 2) {
        throw std::invalid_argument("split_oos: need at least 2 users");
    }
    std::vector<int> sorted(users.begin(), users.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const std::size_t want = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));
    const std::size_t n_val = std::max<std::size_t>(2, want);
    if (n_val >= n) {
        throw std::invalid_argument("split_oos: validation would swallow every user (" +
                                    format_int(static_cast<std::int64_t>(n_val)) + " of " +
                                    format_int(static_cast<std::int64_t>(n)) + ")");
    }
    const auto picked = rng.sample_without_replacement(n, n_val);
    std::vector<bool> is_val(n, false);
    for (std::size_t i : picked) is_val[i] = true;
    std::vector<int> train, validation;
    for (std::size_t i = 0; i < n; ++i) {
        (is_val[i] ? validation : train).push_back(sorted[i]);
    }
    return {std::move(train), std::move(validation)};
}

namespace {

constexpr const char* kSettingTrueTrue = "trueGT/trueGT";
constexpr const char* kSettingFlipFlip = "flipGT/flipGT";
constexpr const char* kSettingFlipTrue = "flipGT/trueGT";
constexpr const char* kSettingRandomTrue = "random/trueGT";
constexpr const char* kSettingTrueFlip = "trueGT/flipGT";
constexpr const char* kSettingRandomFlip = "random/flipGT";

struct LabelMode {
    static constexpr std::size_t kTrue = 0;
    static constexpr std::size_t kFlip = 1;
};

const char* mode_name(std::size_t mode) { return mode == LabelMode::kTrue ? "trueGT" : "flipGT"; }

// Frozen hyperparameters per (sensor index, model kind, label mode).
struct FrozenParams {
    std::vector<RfConfig> rf;    // sensor * 2 + mode
    std::vector<MlpConfig> mlp;  // sensor * 2 + mode
};

EvalRecord make_record(std::string sensor, std::string model, std::string setting, double lambda,
                       int draw, std::span<const Bibo> labels, std::span<const double> scores,
                       double flip_fraction, std::uint64_t seed, bool model_degenerate) {
    EvalRecord rec;
    rec.sensor = std::move(sensor);
    rec.model = std::move(model);
    rec.setting = std::move(setting);
    rec.lambda = lambda;
    rec.draw = draw;
    rec.flip_fraction = flip_fraction;
    rec.seed = seed;

    const auto preds = predict_labels(scores);
    const ConfusionMatrix cm = confusion(labels, preds);
    const ClassificationScores s = prf1a(cm);
    rec.precision = s.precision;
    rec.recall = s.recall;
    rec.f1 = s.f1;
    rec.accuracy = s.accuracy;
    rec.fpr = s.fpr;
    if (s.degenerate) rec.flags.push_back("degenerate_rates");
    const auto auc_value = auc(labels, scores);
    if (auc_value) {
        rec.auc_value = *auc_value;
    } else {
        rec.auc_value = std::numeric_limits<double>::quiet_NaN();
        rec.flags.push_back("auc_undefined_single_class");
    }
    if (model_degenerate) rec.flags.push_back("degenerate_model");
    return rec;
}

std::vector<double> gather_rows(const FeatureTable& table,
                                std::span<const std::size_t> rows) {
    std::vector<double> flat;
    flat.reserve(rows.size() * table.columns.size());
    for (std::size_t r : rows) {
        const auto row = table.row(r);
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return flat;
}

}  // namespace

ResultTable run_monte_carlo(const RunConfig& config) {
    return run_monte_carlo(load_csv(config.dataset_path), config);
}

ResultTable run_monte_carlo(const Dataset& dataset, const RunConfig& config) {
    validate(config);

    // feature tables share one row universe (users ascending, time-ordered)
    std::vector<FeatureTable> tables;
    tables.reserve(config.sensors.size());
    for (SensorFamily family : config.sensors) {
        tables.push_back(build_feature_table(dataset, family, config.ewma));
    }
    const FeatureTable& canon = tables.front();
    for (const auto& t : tables) {
        if (t.n_rows != canon.n_rows || t.labels != canon.labels) {
            throw std::logic_error("run_monte_carlo: feature tables disagree on the row universe");
        }
    }
    const std::size_t n_rows = canon.n_rows;
    if (n_rows == 0) throw ConfigError("run_monte_carlo: dataset produced no feature rows");

    const std::vector<Bibo>& truth = canon.labels;
    const std::vector<int>& row_user = canon.user_ids;

    // per-user segment views over the canonical label vector
    const std::vector<int> users = list_unique_users(dataset);
    std::vector<SegmentedLabels> seg_users;
    {
        std::size_t offset = 0;
        for (int user : users) {
            const CleanResult clean = clean_segment_trajectories(dataset, user);
            if (clean.kept_rows.empty()) continue;
            SegmentedLabels entry;
            entry.user_id = user;
            entry.row_begin = offset;
            entry.row_count = clean.kept_rows.size();
            entry.segments = clean.segments;
            offset += entry.row_count;
            seg_users.push_back(std::move(entry));
        }
        if (offset != n_rows) {
            throw std::logic_error("run_monte_carlo: segment views disagree with feature rows");
        }
    }

    const std::vector<double> levels = config.sweep.levels();
    std::size_t gs_level = 0;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (levels[i] > 0.0) {
            gs_level = i;
            break;
        }
    }

    ResultTable result;
    result.master_seed = config.master_seed;

    // ---- grid-search barrier: first draw of the first nonzero level ----
    FrozenParams frozen;
    frozen.rf.assign(config.sensors.size() * 2, RfConfig{});
    frozen.mlp.assign(config.sensors.size() * 2, MlpConfig{});
    {
        NoiseSpec spec;
        spec.assumption = config.assumption;
        spec.lambda = levels[gs_level];
        spec.seed = derive_seed(config.master_seed, "mc.flip", {gs_level, 0});
        const auto [flip_gs, flip_report] = propagate_errors(seg_users, truth, spec);

        Rng split_rng(derive_seed(config.master_seed, "mc.split", {gs_level, 0}));
        const auto [train_users, val_users] =
            split_oos(users, config.validation_fraction, split_rng);
        std::set<int> train_set(train_users.begin(), train_users.end());
        std::vector<std::size_t> train_rows;
        for (std::size_t r = 0; r < n_rows; ++r) {
            if (train_set.count(row_user[r])) train_rows.push_back(r);
        }

        for (std::size_t s = 0; s < config.sensors.size(); ++s) {
            for (ModelKind kind : config.models) {
                for (std::size_t mode = 0; mode < 2; ++mode) {
                    const std::vector<Bibo>& labels = mode == LabelMode::kTrue ? truth : flip_gs;
                    TrainInput input = full_input(tables[s], train_rows, labels);
                    const std::uint64_t seed = derive_seed(
                        config.master_seed, "mc.grid",
                        {s, static_cast<std::uint64_t>(kind), mode});
                    GridLogEntry log;
                    log.sensor = std::string(to_string(config.sensors[s]));
                    log.model = std::string(to_string(kind));
                    log.label_mode = mode_name(mode);
                    if (kind == ModelKind::RF) {
                        const auto grid = rf_grid();
                        const auto res = grid_search_rf(input, row_user, grid, config.cv_folds,
                                                        seed, config.threads);
                        frozen.rf[s * 2 + mode] = res.best;
                        log.config_summary =
                            "n_estimators=" + format_int(res.best.n_estimators) +
                            ",max_features=" + std::string(to_string(res.best.max_features)) +
                            ",max_depth=" + format_int(res.best.max_depth) +
                            ",criterion=" + std::string(to_string(res.best.criterion));
                        log.cv_mean_auc = res.table[res.best_index].mean_auc;
                    } else {
                        const auto grid = mlp_grid();
                        const auto res = grid_search_mlp(input, row_user, grid, config.cv_folds,
                                                         seed, config.threads);
                        frozen.mlp[s * 2 + mode] = res.best;
                        std::string hidden;
                        for (std::size_t h = 0; h < res.best.hidden.size(); ++h) {
                            if (h > 0) hidden += "-";
                            hidden += format_int(res.best.hidden[h]);
                        }
                        log.config_summary =
                            "hidden=" + hidden +
                            ",schedule=" + std::string(to_string(res.best.schedule)) +
                            ",lr=" + format_double(res.best.learning_rate);
                        log.cv_mean_auc = res.table[res.best_index].mean_auc;
                    }
                    result.grid_log.push_back(std::move(log));
                }
            }
        }
    }

    // ---- the sweep ----
    const std::size_t n_draws = static_cast<std::size_t>(config.draws_per_level);
    const std::size_t n_cells = levels.size() * n_draws;
    std::vector<std::vector<EvalRecord>> cells(n_cells);

    parallel_for(
        n_cells,
        [&](std::size_t cell) {
            const std::size_t level = cell / n_draws;
            const std::size_t draw = cell % n_draws;
            const double lambda = levels[level];

            NoiseSpec spec;
            spec.assumption = config.assumption;
            spec.lambda = lambda;
            spec.seed = derive_seed(config.master_seed, "mc.flip", {level, draw});
            const auto [flipped_labels, flip_report] = propagate_errors(seg_users, truth, spec);
            const double flip_fraction = flip_report.flipped_fraction;

            Rng split_rng(derive_seed(config.master_seed, "mc.split", {level, draw}));
            const auto [train_users, val_users] =
                split_oos(users, config.validation_fraction, split_rng);
            for (int u : val_users) {
                if (std::find(train_users.begin(), train_users.end(), u) != train_users.end()) {
                    throw std::logic_error("run_monte_carlo: OOS violation");
                }
            }
            std::set<int> train_set(train_users.begin(), train_users.end());
            std::set<int> val_set(val_users.begin(), val_users.end());
            std::vector<std::size_t> train_rows, val_rows;
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (train_set.count(row_user[r])) {
                    train_rows.push_back(r);
                } else if (val_set.count(row_user[r])) {
                    val_rows.push_back(r);
                }
            }

            std::vector<Bibo> val_true, val_flip;
            val_true.reserve(val_rows.size());
            val_flip.reserve(val_rows.size());
            for (std::size_t r : val_rows) {
                val_true.push_back(truth[r]);
                val_flip.push_back(flipped_labels[r]);
            }

            std::vector<EvalRecord>& out = cells[cell];
            for (std::size_t s = 0; s < config.sensors.size(); ++s) {
                const FeatureTable& table = tables[s];
                const std::string sensor(to_string(config.sensors[s]));
                const std::vector<double> val_matrix = gather_rows(table, val_rows);

                for (ModelKind kind : config.models) {
                    const std::string model_name(to_string(kind));
                    std::unique_ptr<TrainedModel> model_true, model_flip;
                    const std::uint64_t seed_true =
                        derive_seed(config.master_seed, "mc.train",
                                    {level, draw, s, static_cast<std::uint64_t>(kind), 0});
                    const std::uint64_t seed_flip =
                        derive_seed(config.master_seed, "mc.train",
                                    {level, draw, s, static_cast<std::uint64_t>(kind), 1});
                    if (kind == ModelKind::RF) {
                        RfConfig cfg = frozen.rf[s * 2 + LabelMode::kTrue];
                        cfg.seed = seed_true;
                        model_true = train_rf(full_input(table, train_rows, truth), cfg, 1);
                        cfg = frozen.rf[s * 2 + LabelMode::kFlip];
                        cfg.seed = seed_flip;
                        model_flip =
                            train_rf(full_input(table, train_rows, flipped_labels), cfg, 1);
                    } else {
                        MlpConfig cfg = frozen.mlp[s * 2 + LabelMode::kTrue];
                        cfg.seed = seed_true;
                        model_true = train_mlp(full_input(table, train_rows, truth), cfg);
                        cfg = frozen.mlp[s * 2 + LabelMode::kFlip];
                        cfg.seed = seed_flip;
                        model_flip = train_mlp(full_input(table, train_rows, flipped_labels), cfg);
                    }
                    const std::uint64_t seed_rand =
                        derive_seed(config.master_seed, "mc.random",
                                    {level, draw, s, static_cast<std::uint64_t>(kind)});
                    const auto random_model = train_random(
                        std::vector<std::string>(table.columns.begin(), table.columns.end()),
                        seed_rand);

                    const auto scores_true = model_true->predict_scores(val_matrix, val_rows.size());
                    const auto scores_flip = model_flip->predict_scores(val_matrix, val_rows.size());
                    const auto scores_rand = random_model->predict_scores(val_matrix, val_rows.size());

                    out.push_back(make_record(sensor, model_name, kSettingTrueTrue, lambda,
                                              static_cast<int>(draw), val_true, scores_true,
                                              flip_fraction, seed_true,
                                              model_true->degenerate()));
                    out.push_back(make_record(sensor, model_name, kSettingFlipFlip, lambda,
                                              static_cast<int>(draw), val_flip, scores_flip,
                                              flip_fraction, seed_flip,
                                              model_flip->degenerate()));
                    out.push_back(make_record(sensor, model_name, kSettingFlipTrue, lambda,
                                              static_cast<int>(draw), val_true, scores_flip,
                                              flip_fraction, seed_flip,
                                              model_flip->degenerate()));
                    out.push_back(make_record(sensor, model_name, kSettingRandomTrue, lambda,
                                              static_cast<int>(draw), val_true, scores_rand,
                                              flip_fraction, seed_rand, false));
                    if (config.log_flip_evaluations) {
                        out.push_back(make_record(sensor, model_name, kSettingTrueFlip, lambda,
                                                  static_cast<int>(draw), val_flip, scores_true,
                                                  flip_fraction, seed_true,
                                                  model_true->degenerate()));
                        out.push_back(make_record(sensor, model_name, kSettingRandomFlip, lambda,
                                                  static_cast<int>(draw), val_flip, scores_rand,
                                                  flip_fraction, seed_rand, false));
                    }
                }
            }
        },
        config.threads);

    for (auto& cell : cells) {
        for (auto& rec : cell) result.records.push_back(std::move(rec));
    }
    return result;
}

void write_results_csv(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << "sensor,model,setting,lambda,draw,precision,recall,f1,accuracy,auc,flip_fraction,flags\n";
    for (const auto& r : table.records) {
        std::string flags;
        for (std::size_t i = 0; i < r.flags.size(); ++i) {
            if (i > 0) flags += ';';
            flags += r.flags[i];
        }
        out << r.sensor << ',' << r.model << ',' << r.setting << ',' << format_double(r.lambda)
            << ',' << format_int(r.draw) << ',' << format_double(r.precision) << ','
            << format_double(r.recall) << ',' << format_double(r.f1) << ','
            << format_double(r.accuracy) << ',' << format_double(r.auc_value) << ','
            << format_double(r.flip_fraction) << ',' << flags << '\n';
    }
    if (!out) throw SchemaError("write failed: " + path);
}

ResultTable read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open results file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw SchemaError(path + ": empty results file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string expected =
        "sensor,model,setting,lambda,draw,precision,recall,f1,accuracy,auc,flip_fraction,flags";
    if (line != expected) {
        throw SchemaError(path + ": unexpected results header");
    }
    ResultTable table;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != 12) {
            throw SchemaError(path + ": line " + format_int(static_cast<std::int64_t>(line_no)) +
                              ": expected 12 fields");
        }
        EvalRecord r;
        r.sensor = std::string(fields[0]);
        r.model = std::string(fields[1]);
        r.setting = std::string(fields[2]);
        auto need = [&](std::size_t i) {
            if (fields[i] == "nan") return std::numeric_limits<double>::quiet_NaN();
            const auto v = parse_double(fields[i]);
            if (!v) {
                throw SchemaError(path + ": line " +
                                  format_int(static_cast<std::int64_t>(line_no)) +
                                  ": cannot parse '" + std::string(fields[i]) + "'");
            }
            return *v;
        };
        r.lambda = need(3);
        r.draw = static_cast<int>(need(4));
        r.precision = need(5);
        r.recall = need(6);
        r.f1 = need(7);
        r.accuracy = need(8);
        r.auc_value = need(9);
        r.flip_fraction = need(10);
        if (!fields[11].empty()) {
            for (const auto& f : split_fields(fields[11], ';')) {
                r.flags.emplace_back(f);
            }
        }
        table.records.push_back(std::move(r));
    }
    return table;
}

void write_run_meta_json(const ResultTable& table, const std::string& path) {
    nlohmann::json j;
    j["master_seed"] = table.master_seed;
    j["grid_log"] = nlohmann::json::array();
    for (const auto& entry : table.grid_log) {
        j["grid_log"].push_back({{"sensor", entry.sensor},
                                 {"model", entry.model},
                                 {"label_mode", entry.label_mode},
                                 {"config", entry.config_summary},
                                 {"cv_mean_auc", entry.cv_mean_auc}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
}

namespace {

MetricStats stats_of(const std::vector<double>& values) {
    MetricStats s;
    if (values.empty()) return s;
    s.mean = mean(values);
    s.stddev = sample_stddev(values);
    s.ci95 = ci95_half_width(values);
    return s;
}

}  // namespace

Summary aggregate_report(const ResultTable& table) {
    if (table.records.empty()) {
        throw std::invalid_argument("aggregate_report: empty result table");
    }
    Summary summary;
    summary.master_seed = table.master_seed;

    struct Key {
        std::string sensor, model, setting;
        double lambda;
        bool operator<(const Key& o) const {
            return std::tie(sensor, model, setting, lambda) <
                   std::tie(o.sensor, o.model, o.setting, o.lambda);
        }
    };
    struct Acc {
        std::vector<double> precision, recall, f1, accuracy, auc, flip;
        std::size_t excluded = 0;
    };
    std::map<Key, Acc> groups;
    for (const auto& r : table.records) {
        Acc& acc = groups[Key{r.sensor, r.model, r.setting, r.lambda}];
        if (std::isnan(r.auc_value)) {
            ++acc.excluded;
            continue;
        }
        acc.precision.push_back(r.precision);
        acc.recall.push_back(r.recall);
        acc.f1.push_back(r.f1);
        acc.accuracy.push_back(r.accuracy);
        acc.auc.push_back(r.auc_value);
        acc.flip.push_back(r.flip_fraction);
    }
    for (const auto& [key, acc] : groups) {
        CellSummary cell;
        cell.sensor = key.sensor;
        cell.model = key.model;
        cell.setting = key.setting;
        cell.lambda = key.lambda;
        cell.n = acc.auc.size();
        cell.excluded = acc.excluded;
        cell.precision = stats_of(acc.precision);
        cell.recall = stats_of(acc.recall);
        cell.f1 = stats_of(acc.f1);
        cell.accuracy = stats_of(acc.accuracy);
        cell.auc = stats_of(acc.auc);
        cell.flip_fraction_mean = acc.flip.empty() ? 0.0 : mean(acc.flip);
        summary.cells.push_back(std::move(cell));
    }

    // bias curve per (sensor, model, lambda)
    std::map<std::tuple<std::string, std::string, double>, std::pair<const CellSummary*, const CellSummary*>>
        bias_cells;
    for (const auto& cell : summary.cells) {
        const auto key = std::make_tuple(cell.sensor, cell.model, cell.lambda);
        if (cell.setting == kSettingFlipFlip) bias_cells[key].first = &cell;
        if (cell.setting == kSettingFlipTrue) bias_cells[key].second = &cell;
    }
    for (const auto& [key, pair] : bias_cells) {
        if (!pair.first || !pair.second) continue;
        BiasPoint point;
        point.sensor = std::get<0>(key);
        point.model = std::get<1>(key);
        point.lambda = std::get<2>(key);
        point.bias = pair.first->auc.mean - pair.second->auc.mean;
        point.draws = std::min(pair.first->n, pair.second->n);
        summary.bias_curve.push_back(std::move(point));
    }

    // realized flip fraction per lambda, from the always-present setting
    std::map<double, std::pair<double, std::size_t>> flip_acc;
    for (const auto& r : table.records) {
        if (r.setting != kSettingTrueTrue) continue;
        auto& [sum, count] = flip_acc[r.lambda];
        sum += r.flip_fraction;
        ++count;
    }
    for (const auto& [lam, sc] : flip_acc) {
        summary.flip_fraction_by_lambda.emplace_back(lam, sc.first / static_cast<double>(sc.second));
    }
    return summary;
}

namespace {

nlohmann::json stats_json(const MetricStats& s) {
    return {{"mean", s.mean}, {"std", s.stddev}, {"ci95", s.ci95}};
}

}  // namespace

void write_summary_json(const Summary& summary, const std::string& path) {
    nlohmann::json j;
    j["master_seed"] = summary.master_seed;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : summary.cells) {
        j["cells"].push_back({{"sensor", c.sensor},
                              {"model", c.model},
                              {"setting", c.setting},
                              {"lambda", c.lambda},
                              {"draws", c.n},
                              {"excluded", c.excluded},
                              {"precision", stats_json(c.precision)},
                              {"recall", stats_json(c.recall)},
                              {"f1", stats_json(c.f1)},
                              {"accuracy", stats_json(c.accuracy)},
                              {"auc", stats_json(c.auc)},
                              {"flip_fraction_mean", c.flip_fraction_mean}});
    }
    j["bias_curve"] = nlohmann::json::array();
    for (const auto& b : summary.bias_curve) {
        j["bias_curve"].push_back({{"sensor", b.sensor},
                                   {"model", b.model},
                                   {"lambda", b.lambda},
                                   {"bias", b.bias},
                                   {"draws", b.draws}});
    }
    j["flip_fraction_by_lambda"] = nlohmann::json::array();
    for (const auto& [lam, frac] : summary.flip_fraction_by_lambda) {
        j["flip_fraction_by_lambda"].push_back({{"lambda", lam}, {"fraction", frac}});
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw SchemaError("write failed: " + path);
}

void write_summary_csv(const Summary& summary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SchemaError("cannot open file for writing: " + path);
    std::map<std::tuple<std::string, std::string, double>, double> bias;
    for (const auto& b : summary.bias_curve) {
        bias[std::make_tuple(b.sensor, b.model, b.lambda)] = b.bias;
    }
    out << "sensor,model,setting,lambda,draws,excluded,auc_mean,auc_std,auc_ci95,"
           "f1_mean,accuracy_mean,flip_fraction_mean,bias\n";
    for (const auto& c : summary.cells) {
        out << c.sensor << ',' << c.model << ',' << c.setting << ',' << format_double(c.lambda)
            << ',' << format_int(static_cast<std::int64_t>(c.n)) << ','
            << format_int(static_cast<std::int64_t>(c.excluded)) << ','
            << format_double(c.auc.mean) << ',' << format_double(c.auc.stddev) << ','
            << format_double(c.auc.ci95) << ',' << format_double(c.f1.mean) << ','
            << format_double(c.accuracy.mean) << ',' << format_double(c.flip_fraction_mean) << ',';
        const auto it = bias.find(std::make_tuple(c.sensor, c.model, c.lambda));
        if (it != bias.end()) out << format_double(it->second);
        out << '\n';
    }
    if (!out) throw SchemaError("write failed: " + path);
}

}  // namespace bibo
