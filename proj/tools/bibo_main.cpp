#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "bibo/config.hpp"
#include "bibo/dataset.hpp"
#include "bibo/features.hpp"
#include "bibo/harness.hpp"
#include "bibo/scenario.hpp"
#include "bibo/text.hpp"

namespace {

int run_simulate(const std::string& config_path, const std::string& out_path, int users_override,
                 std::uint64_t seed_override, bool has_seed) {
    bibo::ScenarioConfig scenario;
    if (!config_path.empty()) {
        scenario = bibo::load_scenario_config(config_path);
    }
    if (users_override > 0) scenario.n_users = users_override;
    if (has_seed) scenario.seed = seed_override;
    const bibo::Dataset dataset =
        bibo::simulate_scenario(scenario.network, scenario.rssi, scenario.n_users, scenario.seed);
    bibo::save_csv(dataset, out_path);
    std::printf("wrote %zu rows for %d users to %s (seed %llu)\n", dataset.rows.size(),
                scenario.n_users, out_path.c_str(),
                static_cast<unsigned long long>(scenario.seed));
    return 0;
}

int run_prepare(const std::string& dataset_path, const std::string& ble_path,
                const std::string& gps_path) {
    const bibo::Dataset dataset = bibo::load_csv(dataset_path);
    std::size_t dropped = 0;
    for (int user : bibo::list_unique_users(dataset)) {
        dropped += bibo::clean_segment_trajectories(dataset, user).dropped_rows;
    }
    const bibo::EwmaParams ewma;
    if (!ble_path.empty()) {
        const auto table = bibo::build_feature_table(dataset, bibo::SensorFamily::BLE, ewma);
        bibo::save_feature_csv(table, ble_path);
        std::printf("BLE features: %zu rows x %zu columns -> %s\n", table.n_rows,
                    table.columns.size(), ble_path.c_str());
    }
    if (!gps_path.empty()) {
        const auto table = bibo::build_feature_table(dataset, bibo::SensorFamily::GPS, ewma);
        bibo::save_feature_csv(table, gps_path);
        std::printf("GPS features: %zu rows x %zu columns -> %s\n", table.n_rows,
                    table.columns.size(), gps_path.c_str());
    }
    std::printf("dropped %zu non-monotone rows during cleaning\n", dropped);
    return 0;
}

int run_mc(const std::string& config_path, const std::string& out_path,
           std::uint64_t seed_override, bool has_seed) {
    bibo::RunConfig config = bibo::load_run_config(config_path);
    if (has_seed) config.master_seed = seed_override;
    if (config.dataset_path.empty()) {
        std::fprintf(stderr, "run-mc: config is missing the 'dataset' path\n");
        return 1;
    }
    const bibo::ResultTable table = bibo::run_monte_carlo(config);
    bibo::write_results_csv(table, out_path);
    bibo::write_run_meta_json(table, out_path + ".meta.json");
    std::printf("wrote %zu evaluation records to %s\n", table.records.size(), out_path.c_str());
    for (const auto& entry : table.grid_log) {
        std::printf("grid %s/%s/%s: %s (cv auc %.4f)\n", entry.sensor.c_str(),
                    entry.model.c_str(), entry.label_mode.c_str(), entry.config_summary.c_str(),
                    entry.cv_mean_auc);
    }
    return 0;
}

int run_report(const std::string& results_path, const std::string& json_path,
               const std::string& csv_path) {
    const bibo::ResultTable table = bibo::read_results_csv(results_path);
    const bibo::Summary summary = bibo::aggregate_report(table);
    if (!json_path.empty()) bibo::write_summary_json(summary, json_path);
    if (!csv_path.empty()) bibo::write_summary_csv(summary, csv_path);
    std::printf("aggregated %zu records into %zu cells\n", table.records.size(),
                summary.cells.size());
    for (const auto& b : summary.bias_curve) {
        std::printf("bias %s/%s lambda=%s: %+.4f\n", b.sensor.c_str(), b.model.c_str(),
                    bibo::format_double(b.lambda).c_str(), b.bias);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"BIBO workbench: simulate a beacon-instrumented bus network, extract features, "
                 "and sweep label-noise robustness of the classifiers"};
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out = "dataset.csv";
    int sim_users = 0;
    std::uint64_t sim_seed = 0;
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic dataset CSV");
    simulate->add_option("--config", sim_config, "scenario config JSON (defaults when omitted)");
    simulate->add_option("--out", sim_out, "output dataset CSV");
    simulate->add_option("--users", sim_users, "override the user count");
    auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "override the scenario seed");

    // prepare
    std::string prep_dataset, prep_ble = "features_ble.csv", prep_gps = "features_gps.csv";
    auto* prepare = app.add_subcommand("prepare", "clean, impute and extract feature tables");
    prepare->add_option("--dataset", prep_dataset, "input dataset CSV")->required();
    prepare->add_option("--out-ble", prep_ble, "BLE feature CSV ('' to skip)");
    prepare->add_option("--out-gps", prep_gps, "GPS feature CSV ('' to skip)");

    // run-mc
    std::string mc_config, mc_out = "results.csv";
    std::uint64_t mc_seed = 0;
    auto* runmc = app.add_subcommand("run-mc", "run the Monte-Carlo label-noise sweep");
    runmc->add_option("--config", mc_config, "run config JSON")->required();
    runmc->add_option("--out", mc_out, "output results CSV");
    auto* mc_seed_opt = runmc->add_option("--seed", mc_seed, "override the master seed");

    // report
    std::string rep_results, rep_json = "summary.json", rep_csv = "summary.csv";
    auto* report = app.add_subcommand("report", "aggregate a results CSV");
    report->add_option("--results", rep_results, "input results CSV")->required();
    report->add_option("--out-json", rep_json, "summary JSON ('' to skip)");
    report->add_option("--out-csv", rep_csv, "plot-ready CSV ('' to skip)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            return run_simulate(sim_config, sim_out, sim_users, sim_seed,
                                sim_seed_opt->count() > 0);
        }
        if (prepare->parsed()) {
            return run_prepare(prep_dataset, prep_ble, prep_gps);
        }
        if (runmc->parsed()) {
            return run_mc(mc_config, mc_out, mc_seed, mc_seed_opt->count() > 0);
        }
        if (report->parsed()) {
            return run_report(rep_results, rep_json, rep_csv);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
