#pragma once

#include <cstdint>
#include <string>

#include "bibo/harness.hpp"
#include "bibo/scenario.hpp"

namespace bibo {

// The scenario file: network, propagation model, user count and seed.
struct ScenarioConfig {
    NetworkConfig network = default_network_config();
    RssiModel rssi = default_rssi_model();
    int n_users = 12;
    std::uint64_t seed = 424242;
};

// Missing keys keep the shipped defaults; unknown keys are rejected.
ScenarioConfig load_scenario_config(const std::string& path);
RunConfig load_run_config(const std::string& path);

std::string scenario_config_json(const ScenarioConfig& config);
std::string run_config_json(const RunConfig& config);

}  // namespace bibo
