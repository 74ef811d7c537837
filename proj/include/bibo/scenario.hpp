#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bibo/dataset.hpp"
#include "bibo/geo.hpp"
#include "bibo/rng.hpp"
#include "bibo/types.hpp"

namespace bibo {

// Riders keep within this radius of the bus center; the label/geometry
// consistency check uses it.
inline constexpr double kBusFootprintRadiusM = 6.0;

// Beacons transmitting off the default power shift the reference RSSI by the
// difference.
inline constexpr double kDefaultTxPowerDbm = -8.0;

struct Stop {
    int id = 0;
    double x_m = 0.0;
    double y_m = 0.0;
};

struct RouteSpec {
    std::vector<int> stop_ids;  // ordered; buses ping-pong along it
};

struct BusSpec {
    int id = 0;
    int route = 0;
    double max_speed_mps = 4.17;  // 15 km/h
};

enum class BeaconMount : std::uint8_t { Bus = 0, Stop = 1 };

struct BeaconSpec {
    int id = 0;
    BeaconMount mount = BeaconMount::Bus;
    int mount_id = 0;
    double tx_rate_hz = 1.667;
    double tx_power_dbm = kDefaultTxPowerDbm;
};

struct NetworkConfig {
    std::vector<Stop> stops;
    std::vector<RouteSpec> routes;
    std::vector<BusSpec> buses;
    std::vector<BeaconSpec> beacons;
    double duration_s = 1144.0;
    double sampling_rate_hz = 1.0;

    // Plumbing the scenario file also carries.
    double origin_lat_deg = 55.70;
    double origin_lon_deg = 12.55;
    double bus_dwell_s = 20.0;
    double walk_speed_mps = 1.4;
    double walk_probability = 0.35;  // chance to walk to another stop after alighting
    double gps_noise_std_m = 1.5;    // radially clamped at 2 sigma
    double os_activity_accuracy = 0.52;
};

// Log-distance path loss with Gaussian shadowing and Bernoulli dropout.
struct RssiModel {
    double ref_rssi_dbm = -59.0;  // expected value at 1 m, default tx power
    double path_loss_exponent = 2.0;
    double shadowing_std_db = 4.0;
    double dropout_prob = 0.25;
    double body_shadow_db = 8.0;
    double body_shadow_prob = 0.3;  // per user
    double clamp_floor_dbm = kRssiFloorDbm;
    double clamp_ceiling_dbm = kRssiCeilingDbm;
};

NetworkConfig default_network_config();
RssiModel default_rssi_model();

// Throws ConfigError naming the violated invariant.
void validate(const NetworkConfig& config);
void validate(const RssiModel& model);

// Expected value ref - 10*exponent*log10(distance) + offset_db, plus
// shadowing; absent with dropout probability, absent below the clamp floor,
// clamped at the ceiling. offset_db folds in per-link effects (tx power
// delta, body shadow). Throws DomainError for distance <= 0.
std::optional<double> rssi_at(double distance_m, const RssiModel& model, Rng& rng,
                              double offset_db = 0.0);

// Returns the BIBO-consistent activity class with probability `accuracy`,
// the other class otherwise. BI maps to automotive.
OsActivity emulate_os_activity(Bibo true_label, double accuracy, Rng& rng);

// Bus position on the plane at time t (ping-pong along the route with dwell
// stops). Exposed for geometry checks.
struct PlanePos {
    double x = 0.0;
    double y = 0.0;
};
PlanePos bus_position_at(const NetworkConfig& config, int bus_id, double t);

// Generates the full synthetic dataset: every user alternates waiting,
// riding and walking legs, with ground-truth BIBO labels exact by
// construction. Rows are ordered by (user, timestamp). Identical seeds give
// bit-identical output. Throws ConfigError when the configuration cannot
// give every user at least two complete rides.
Dataset simulate_scenario(const NetworkConfig& config, const RssiModel& rssi_model,
                          int n_users, std::uint64_t seed);

}  // namespace bibo
