#include "bibo/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "bibo/errors.hpp"

namespace bibo {

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open config file: " + path);
    try {
        json j;
        in >> j;
        return j;
    } catch (const json::exception& e) {
        throw SchemaError(path + ": invalid JSON: " + e.what());
    }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key)) {
            throw SchemaError(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

EwmaParams parse_ewma(const json& j, const std::string& where) {
    EwmaParams p;
    reject_unknown(j, {"window_s", "alpha", "max_gap_s", "fill_constant", "mode"}, where);
    maybe(j, "window_s", p.window_s);
    maybe(j, "alpha", p.alpha);
    maybe(j, "max_gap_s", p.max_gap_s);
    maybe(j, "fill_constant", p.fill_constant);
    if (j.contains("mode")) {
        const std::string mode = j.at("mode").get<std::string>();
        if (mode == "batch") p.mode = EwmaMode::Batch;
        else if (mode == "streaming") p.mode = EwmaMode::Streaming;
        else throw SchemaError(where + ": unknown EWMA mode '" + mode + "'");
    }
    return p;
}

}  // namespace

ScenarioConfig load_scenario_config(const std::string& path) {
    const json j = load_json(path);
    reject_unknown(j,
                   {"stops", "routes", "buses", "beacons", "duration_s", "sampling_rate_hz",
                    "origin_lat_deg", "origin_lon_deg", "bus_dwell_s", "walk_speed_mps",
                    "walk_probability", "gps_noise_std_m", "os_activity_accuracy", "rssi",
                    "n_users", "seed"},
                   path);
    ScenarioConfig config;
    config.network = default_network_config();
    config.rssi = default_rssi_model();

    if (j.contains("stops")) {
        config.network.stops.clear();
        for (const auto& s : j.at("stops")) {
            reject_unknown(s, {"id", "x_m", "y_m"}, path + ": stop");
            Stop stop;
            stop.id = s.at("id").get<int>();
            stop.x_m = s.at("x_m").get<double>();
            stop.y_m = s.at("y_m").get<double>();
            config.network.stops.push_back(stop);
        }
    }
    if (j.contains("routes")) {
        config.network.routes.clear();
        for (const auto& r : j.at("routes")) {
            reject_unknown(r, {"stops"}, path + ": route");
            RouteSpec route;
            route.stop_ids = r.at("stops").get<std::vector<int>>();
            config.network.routes.push_back(std::move(route));
        }
    }
    if (j.contains("buses")) {
        config.network.buses.clear();
        for (const auto& b : j.at("buses")) {
            reject_unknown(b, {"id", "route", "max_speed_mps"}, path + ": bus");
            BusSpec bus;
            bus.id = b.at("id").get<int>();
            bus.route = b.at("route").get<int>();
            maybe(b, "max_speed_mps", bus.max_speed_mps);
            config.network.buses.push_back(bus);
        }
    }
    if (j.contains("beacons")) {
        config.network.beacons.clear();
        for (const auto& b : j.at("beacons")) {
            reject_unknown(b, {"id", "mount", "mount_id", "tx_rate_hz", "tx_power_dbm"},
                           path + ": beacon");
            BeaconSpec beacon;
            beacon.id = b.at("id").get<int>();
            const std::string mount = b.at("mount").get<std::string>();
            if (mount == "bus") beacon.mount = BeaconMount::Bus;
            else if (mount == "stop") beacon.mount = BeaconMount::Stop;
            else throw SchemaError(path + ": beacon mount must be 'bus' or 'stop'");
            beacon.mount_id = b.at("mount_id").get<int>();
            maybe(b, "tx_rate_hz", beacon.tx_rate_hz);
            maybe(b, "tx_power_dbm", beacon.tx_power_dbm);
            config.network.beacons.push_back(beacon);
        }
    }
    maybe(j, "duration_s", config.network.duration_s);
    maybe(j, "sampling_rate_hz", config.network.sampling_rate_hz);
    maybe(j, "origin_lat_deg", config.network.origin_lat_deg);
    maybe(j, "origin_lon_deg", config.network.origin_lon_deg);
    maybe(j, "bus_dwell_s", config.network.bus_dwell_s);
    maybe(j, "walk_speed_mps", config.network.walk_speed_mps);
    maybe(j, "walk_probability", config.network.walk_probability);
    maybe(j, "gps_noise_std_m", config.network.gps_noise_std_m);
    maybe(j, "os_activity_accuracy", config.network.os_activity_accuracy);

    if (j.contains("rssi")) {
        const json& r = j.at("rssi");
        reject_unknown(r,
                       {"ref_rssi_dbm", "path_loss_exponent", "shadowing_std_db", "dropout_prob",
                        "body_shadow_db", "body_shadow_prob", "clamp_floor_dbm",
                        "clamp_ceiling_dbm"},
                       path + ": rssi");
        maybe(r, "ref_rssi_dbm", config.rssi.ref_rssi_dbm);
        maybe(r, "path_loss_exponent", config.rssi.path_loss_exponent);
        maybe(r, "shadowing_std_db", config.rssi.shadowing_std_db);
        maybe(r, "dropout_prob", config.rssi.dropout_prob);
        maybe(r, "body_shadow_db", config.rssi.body_shadow_db);
        maybe(r, "body_shadow_prob", config.rssi.body_shadow_prob);
        maybe(r, "clamp_floor_dbm", config.rssi.clamp_floor_dbm);
        maybe(r, "clamp_ceiling_dbm", config.rssi.clamp_ceiling_dbm);
    }
    maybe(j, "n_users", config.n_users);
    maybe(j, "seed", config.seed);
    return config;
}

RunConfig load_run_config(const std::string& path) {
    const json j = load_json(path);
    reject_unknown(j,
                   {"dataset", "sensors", "models", "flip_assumption", "sweep",
                    "draws_per_level", "validation_fraction", "master_seed", "cv_folds", "ewma",
                    "log_flip_evaluations", "threads"},
                   path);
    RunConfig config;
    maybe(j, "dataset", config.dataset_path);
    if (j.contains("sensors")) {
        config.sensors.clear();
        for (const auto& s : j.at("sensors")) {
            config.sensors.push_back(sensor_family_from_string(s.get<std::string>()));
        }
    }
    if (j.contains("models")) {
        config.models.clear();
        for (const auto& m : j.at("models")) {
            config.models.push_back(model_kind_from_string(m.get<std::string>()));
        }
    }
    if (j.contains("flip_assumption")) {
        config.assumption = flip_assumption_from_string(j.at("flip_assumption").get<std::string>());
    }
    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        reject_unknown(s, {"start", "step", "max", "include_zero_control"}, path + ": sweep");
        maybe(s, "start", config.sweep.start);
        maybe(s, "step", config.sweep.step);
        maybe(s, "max", config.sweep.max_err);
        maybe(s, "include_zero_control", config.sweep.include_zero_control);
    }
    maybe(j, "draws_per_level", config.draws_per_level);
    maybe(j, "validation_fraction", config.validation_fraction);
    maybe(j, "master_seed", config.master_seed);
    if (j.contains("cv_folds")) config.cv_folds = j.at("cv_folds").get<std::size_t>();
    if (j.contains("ewma")) config.ewma = parse_ewma(j.at("ewma"), path + ": ewma");
    maybe(j, "log_flip_evaluations", config.log_flip_evaluations);
    maybe(j, "threads", config.threads);
    return config;
}

std::string scenario_config_json(const ScenarioConfig& config) {
    json j;
    j["stops"] = json::array();
    for (const auto& s : config.network.stops) {
        j["stops"].push_back({{"id", s.id}, {"x_m", s.x_m}, {"y_m", s.y_m}});
    }
    j["routes"] = json::array();
    for (const auto& r : config.network.routes) {
        j["routes"].push_back({{"stops", r.stop_ids}});
    }
    j["buses"] = json::array();
    for (const auto& b : config.network.buses) {
        j["buses"].push_back(
            {{"id", b.id}, {"route", b.route}, {"max_speed_mps", b.max_speed_mps}});
    }
    j["beacons"] = json::array();
    for (const auto& b : config.network.beacons) {
        j["beacons"].push_back({{"id", b.id},
                                {"mount", b.mount == BeaconMount::Bus ? "bus" : "stop"},
                                {"mount_id", b.mount_id},
                                {"tx_rate_hz", b.tx_rate_hz},
                                {"tx_power_dbm", b.tx_power_dbm}});
    }
    j["duration_s"] = config.network.duration_s;
    j["sampling_rate_hz"] = config.network.sampling_rate_hz;
    j["origin_lat_deg"] = config.network.origin_lat_deg;
    j["origin_lon_deg"] = config.network.origin_lon_deg;
    j["bus_dwell_s"] = config.network.bus_dwell_s;
    j["walk_speed_mps"] = config.network.walk_speed_mps;
    j["walk_probability"] = config.network.walk_probability;
    j["gps_noise_std_m"] = config.network.gps_noise_std_m;
    j["os_activity_accuracy"] = config.network.os_activity_accuracy;
    j["rssi"] = {{"ref_rssi_dbm", config.rssi.ref_rssi_dbm},
                 {"path_loss_exponent", config.rssi.path_loss_exponent},
                 {"shadowing_std_db", config.rssi.shadowing_std_db},
                 {"dropout_prob", config.rssi.dropout_prob},
                 {"body_shadow_db", config.rssi.body_shadow_db},
                 {"body_shadow_prob", config.rssi.body_shadow_prob},
                 {"clamp_floor_dbm", config.rssi.clamp_floor_dbm},
                 {"clamp_ceiling_dbm", config.rssi.clamp_ceiling_dbm}};
    j["n_users"] = config.n_users;
    j["seed"] = config.seed;
    return j.dump(2);
}

std::string run_config_json(const RunConfig& config) {
    json j;
    j["dataset"] = config.dataset_path;
    j["sensors"] = json::array();
    for (SensorFamily s : config.sensors) j["sensors"].push_back(std::string(to_string(s)));
    j["models"] = json::array();
    for (ModelKind m : config.models) j["models"].push_back(std::string(to_string(m)));
    j["flip_assumption"] = std::string(to_string(config.assumption));
    j["sweep"] = {{"start", config.sweep.start},
                  {"step", config.sweep.step},
                  {"max", config.sweep.max_err},
                  {"include_zero_control", config.sweep.include_zero_control}};
    j["draws_per_level"] = config.draws_per_level;
    j["validation_fraction"] = config.validation_fraction;
    j["master_seed"] = config.master_seed;
    j["cv_folds"] = config.cv_folds;
    j["ewma"] = {{"window_s", config.ewma.window_s},
                 {"alpha", config.ewma.alpha},
                 {"max_gap_s", config.ewma.max_gap_s},
                 {"fill_constant", config.ewma.fill_constant},
                 {"mode", config.ewma.mode == EwmaMode::Batch ? "batch" : "streaming"}};
    j["log_flip_evaluations"] = config.log_flip_evaluations;
    j["threads"] = config.threads;
    return j.dump(2);
}

}  // namespace bibo
