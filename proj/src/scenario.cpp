#include "bibo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "bibo/errors.hpp"
#include "bibo/text.hpp"

namespace bibo {

namespace {

constexpr double kBoardMarginS = 2.0;      // must board this long before departure
constexpr double kMinSensingDistanceM = 0.5;
constexpr double kPersonOffsetRadiusM = 2.0;  // rider/stander jitter around the anchor

struct Leg {
    double t0 = 0.0;
    double t1 = 0.0;
    PlanePos from;
    PlanePos to;
    bool dwell = false;
    int stop_id = -1;  // valid when dwell
};

// One ping-pong cycle of dwell/travel legs, starting with the dwell at the
// first route stop.
struct BusTimeline {
    std::vector<Leg> cycle;
    double period = 0.0;
};

struct StopVisit {
    int stop_id = 0;
    double arrive = 0.0;
    double depart = 0.0;
};

PlanePos stop_pos(const NetworkConfig& config, int stop_id) {
    for (const auto& s : config.stops) {
        if (s.id == stop_id) return {s.x_m, s.y_m};
    }
    throw ConfigError("unknown stop id " + format_int(stop_id));
}

double plane_dist(const PlanePos& a, const PlanePos& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

BusTimeline build_bus_timeline(const NetworkConfig& config, const BusSpec& bus) {
    const auto& stops = config.routes[static_cast<std::size_t>(bus.route)].stop_ids;
    std::vector<int> sequence(stops.begin(), stops.end());
    for (std::size_t i = stops.size() - 1; i-- > 1;) {
        sequence.push_back(stops[i]);
    }
    BusTimeline timeline;
    double t = 0.0;
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        const PlanePos here = stop_pos(config, sequence[i]);
        Leg dwell;
        dwell.t0 = t;
        dwell.t1 = t + config.bus_dwell_s;
        dwell.from = here;
        dwell.to = here;
        dwell.dwell = true;
        dwell.stop_id = sequence[i];
        timeline.cycle.push_back(dwell);
        t = dwell.t1;

        const PlanePos next = stop_pos(config, sequence[(i + 1) % sequence.size()]);
        const double travel = plane_dist(here, next) / bus.max_speed_mps;
        Leg move;
        move.t0 = t;
        move.t1 = t + travel;
        move.from = here;
        move.to = next;
        timeline.cycle.push_back(move);
        t = move.t1;
    }
    timeline.period = t;
    return timeline;
}

PlanePos leg_position(const Leg& leg, double t) {
    if (leg.dwell || leg.t1 <= leg.t0) return leg.from;
    const double f = std::clamp((t - leg.t0) / (leg.t1 - leg.t0), 0.0, 1.0);
    return {leg.from.x + f * (leg.to.x - leg.from.x), leg.from.y + f * (leg.to.y - leg.from.y)};
}

PlanePos timeline_position(const BusTimeline& timeline, double t) {
    if (timeline.period <= 0.0) return timeline.cycle.front().from;
    double local = std::fmod(t, timeline.period);
    if (local < 0.0) local += timeline.period;
    for (const auto& leg : timeline.cycle) {
        if (local < leg.t1 || &leg == &timeline.cycle.back()) {
            return leg_position(leg, local);
        }
    }
    return timeline.cycle.back().to;
}

std::vector<StopVisit> unroll_visits(const BusTimeline& timeline, double until) {
    std::vector<StopVisit> visits;
    if (timeline.period <= 0.0) return visits;
    for (double base = 0.0; base <= until; base += timeline.period) {
        for (const auto& leg : timeline.cycle) {
            if (!leg.dwell) continue;
            visits.push_back({leg.stop_id, base + leg.t0, base + leg.t1});
        }
    }
    return visits;
}

struct Phase {
    enum class Kind { Stand, Ride, Walk } kind = Kind::Stand;
    double t0 = 0.0;
    double t1 = 0.0;
    int stop_id = -1;       // Stand
    int bus_index = -1;     // Ride: index into config.buses
    double off_x = 0.0;     // Stand/Ride jitter around the anchor
    double off_y = 0.0;
    PlanePos from;          // Walk
    PlanePos to;
};

// Uniform point in a disk of the given radius.
void draw_offset(Rng& rng, double radius, double& x, double& y) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * 3.14159265358979323846 * rng.uniform();
    x = r * std::cos(a);
    y = r * std::sin(a);
}

}  // namespace

NetworkConfig default_network_config() {
    NetworkConfig config;
    config.stops = {{0, 0.0, 0.0}, {1, 250.0, 0.0}, {2, 250.0, 180.0}};
    config.routes = {RouteSpec{{0, 1}}, RouteSpec{{1, 2}}};
    config.buses = {{0, 0, 4.17}, {1, 1, 4.17}};
    config.beacons = {{0, BeaconMount::Bus, 0, 1.667, kDefaultTxPowerDbm},
                      {1, BeaconMount::Bus, 1, 1.667, kDefaultTxPowerDbm},
                      {2, BeaconMount::Stop, 0, 1.667, kDefaultTxPowerDbm},
                      {3, BeaconMount::Stop, 1, 1.667, kDefaultTxPowerDbm},
                      {4, BeaconMount::Stop, 2, 1.667, kDefaultTxPowerDbm}};
    return config;
}

RssiModel default_rssi_model() { return RssiModel{}; }

void validate(const NetworkConfig& config) {
    if (config.routes.empty()) throw ConfigError("NetworkConfig: need at least 1 route");
    if (config.stops.size() < 2) throw ConfigError("NetworkConfig: need at least 2 stops");
    if (config.buses.empty()) throw ConfigError("NetworkConfig: need at least 1 bus");
    if (config.beacons.empty()) throw ConfigError("NetworkConfig: need at least 1 beacon");
    if (config.beacons.size() > kRssiSlots) {
        throw ConfigError("NetworkConfig: dataset schema holds " +
                          format_int(static_cast<std::int64_t>(kRssiSlots)) +
                          " RSSI slots, got " +
                          format_int(static_cast<std::int64_t>(config.beacons.size())) +
                          " beacons");
    }
    std::set<int> stop_ids;
    for (const auto& s : config.stops) {
        if (!stop_ids.insert(s.id).second) {
            throw ConfigError("NetworkConfig: duplicate stop id " + format_int(s.id));
        }
    }
    for (std::size_t r = 0; r < config.routes.size(); ++r) {
        const auto& route = config.routes[r];
        if (route.stop_ids.size() < 2) {
            throw ConfigError("NetworkConfig: route " + format_int(static_cast<std::int64_t>(r)) +
                              " needs at least 2 stops");
        }
        for (int sid : route.stop_ids) {
            if (!stop_ids.count(sid)) {
                throw ConfigError("NetworkConfig: route " + format_int(static_cast<std::int64_t>(r)) +
                                  " references unknown stop " + format_int(sid));
            }
        }
    }
    std::set<int> bus_ids;
    for (const auto& b : config.buses) {
        if (!bus_ids.insert(b.id).second) {
            throw ConfigError("NetworkConfig: duplicate bus id " + format_int(b.id));
        }
        if (b.route < 0 || static_cast<std::size_t>(b.route) >= config.routes.size()) {
            throw ConfigError("NetworkConfig: bus " + format_int(b.id) +
                              " references unknown route " + format_int(b.route));
        }
        if (!(b.max_speed_mps > 0.0)) {
            throw ConfigError("NetworkConfig: bus " + format_int(b.id) + " max speed must be > 0");
        }
    }
    std::set<int> beacon_ids;
    for (const auto& beacon : config.beacons) {
        if (!beacon_ids.insert(beacon.id).second) {
            throw ConfigError("NetworkConfig: duplicate beacon id " + format_int(beacon.id));
        }
        if (beacon.mount == BeaconMount::Bus) {
            if (!bus_ids.count(beacon.mount_id)) {
                throw ConfigError("NetworkConfig: beacon " + format_int(beacon.id) +
                                  " mounted on unknown bus " + format_int(beacon.mount_id));
            }
        } else if (!stop_ids.count(beacon.mount_id)) {
            throw ConfigError("NetworkConfig: beacon " + format_int(beacon.id) +
                              " mounted on unknown stop " + format_int(beacon.mount_id));
        }
        if (!(beacon.tx_rate_hz > 0.0)) {
            throw ConfigError("NetworkConfig: beacon " + format_int(beacon.id) +
                              " tx rate must be > 0");
        }
    }
    if (!(config.duration_s > 0.0)) throw ConfigError("NetworkConfig: duration must be > 0");
    if (!(config.sampling_rate_hz > 0.0)) {
        throw ConfigError("NetworkConfig: sampling rate must be > 0");
    }
    if (config.bus_dwell_s < 0.0) throw ConfigError("NetworkConfig: dwell must be >= 0");
    if (!(config.walk_speed_mps > 0.0)) throw ConfigError("NetworkConfig: walk speed must be > 0");
    if (config.walk_probability < 0.0 || config.walk_probability > 1.0) {
        throw ConfigError("NetworkConfig: walk probability must be in [0, 1]");
    }
    if (config.gps_noise_std_m < 0.0) throw ConfigError("NetworkConfig: GPS noise must be >= 0");
    if (config.os_activity_accuracy < 0.0 || config.os_activity_accuracy > 1.0) {
        throw ConfigError("NetworkConfig: OS activity accuracy must be in [0, 1]");
    }
}

void validate(const RssiModel& model) {
    if (model.dropout_prob < 0.0 || model.dropout_prob > 1.0) {
        throw ConfigError("RssiModel: dropout probability must be in [0, 1]");
    }
    if (model.body_shadow_prob < 0.0 || model.body_shadow_prob > 1.0) {
        throw ConfigError("RssiModel: body shadow probability must be in [0, 1]");
    }
    if (model.shadowing_std_db < 0.0) throw ConfigError("RssiModel: shadowing std must be >= 0");
    if (!(model.path_loss_exponent > 0.0)) {
        throw ConfigError("RssiModel: path loss exponent must be > 0");
    }
    if (!(model.clamp_floor_dbm < model.clamp_ceiling_dbm)) {
        throw ConfigError("RssiModel: clamp floor must be below the ceiling");
    }
}

std::optional<double> rssi_at(double distance_m, const RssiModel& model, Rng& rng,
                              double offset_db) {
    if (!(distance_m > 0.0)) {
        throw DomainError("rssi_at: distance must be > 0, got " + format_double(distance_m));
    }
    if (rng.uniform() < model.dropout_prob) return std::nullopt;
    double value = model.ref_rssi_dbm - 10.0 * model.path_loss_exponent * std::log10(distance_m) +
                   offset_db;
    value = rng.normal(value, model.shadowing_std_db);
    if (value <= model.clamp_floor_dbm) return std::nullopt;
    return std::min(value, model.clamp_ceiling_dbm);
}

OsActivity emulate_os_activity(Bibo true_label, double accuracy, Rng& rng) {
    if (accuracy < 0.0 || accuracy > 1.0) {
        throw DomainError("emulate_os_activity: accuracy must be in [0, 1]");
    }
    const OsActivity consistent =
        true_label == Bibo::BI ? OsActivity::Automotive : OsActivity::Other;
    if (rng.uniform() < accuracy) return consistent;
    return consistent == OsActivity::Automotive ? OsActivity::Other : OsActivity::Automotive;
}

PlanePos bus_position_at(const NetworkConfig& config, int bus_id, double t) {
    for (const auto& bus : config.buses) {
        if (bus.id == bus_id) {
            return timeline_position(build_bus_timeline(config, bus), t);
        }
    }
    throw ConfigError("bus_position_at: unknown bus id " + format_int(bus_id));
}

Dataset simulate_scenario(const NetworkConfig& config, const RssiModel& rssi_model, int n_users,
                          std::uint64_t seed) {
    validate(config);
    validate(rssi_model);
    if (n_users < 1) throw ConfigError("simulate_scenario: n_users must be >= 1");

    const LocalProjection projection(config.origin_lat_deg, config.origin_lon_deg);
    std::vector<BusTimeline> timelines;
    std::vector<std::vector<StopVisit>> visits;
    timelines.reserve(config.buses.size());
    for (const auto& bus : config.buses) {
        timelines.push_back(build_bus_timeline(config, bus));
        visits.push_back(unroll_visits(timelines.back(),
                                       config.duration_s + 2.0 * timelines.back().period));
    }

    const std::size_t n_points =
        static_cast<std::size_t>(std::floor(config.duration_s * config.sampling_rate_hz));
    const double dt = 1.0 / config.sampling_rate_hz;

    std::vector<TrajectoryPoint> rows;
    rows.reserve(n_points * static_cast<std::size_t>(n_users));

    for (int user = 0; user < n_users; ++user) {
        Rng rng_plan(derive_seed(seed, "sim.plan", {static_cast<std::uint64_t>(user)}));
        Rng rng_sense(derive_seed(seed, "sim.sense", {static_cast<std::uint64_t>(user)}));

        // ---- itinerary ----
        std::vector<Phase> phases;
        int current_stop = config.stops[rng_plan.uniform_index(config.stops.size())].id;
        double t = rng_plan.uniform() * 60.0;
        int rides_done = 0;

        Phase initial;
        initial.kind = Phase::Kind::Stand;
        initial.t0 = 0.0;
        initial.stop_id = current_stop;
        draw_offset(rng_plan, kPersonOffsetRadiusM, initial.off_x, initial.off_y);
        phases.push_back(initial);

        while (t < config.duration_s) {
            // earliest boarding opportunity at the current stop
            int best_bus = -1;
            std::size_t best_visit = 0;
            double best_board = 0.0;
            for (std::size_t b = 0; b < config.buses.size(); ++b) {
                for (std::size_t v = 0; v < visits[b].size(); ++v) {
                    const StopVisit& visit = visits[b][v];
                    if (visit.stop_id != current_stop) continue;
                    const double board = std::max(t, visit.arrive);
                    if (board > visit.depart - kBoardMarginS) continue;
                    if (best_bus < 0 || board < best_board) {
                        best_bus = static_cast<int>(b);
                        best_visit = v;
                        best_board = board;
                    }
                    break;  // visits are time-ordered per bus
                }
            }
            if (best_bus < 0 || best_board >= config.duration_s) break;

            phases.back().t1 = best_board;

            const int legs = rng_plan.bernoulli(0.3) ? 2 : 1;
            std::size_t target = best_visit + static_cast<std::size_t>(legs);
            if (target >= visits[static_cast<std::size_t>(best_bus)].size()) {
                target = visits[static_cast<std::size_t>(best_bus)].size() - 1;
            }
            const StopVisit& arrival = visits[static_cast<std::size_t>(best_bus)][target];
            double alight = arrival.arrive +
                            0.5 + rng_plan.uniform() * std::min(1.5, config.bus_dwell_s);

            Phase ride;
            ride.kind = Phase::Kind::Ride;
            ride.t0 = best_board;
            ride.bus_index = best_bus;
            draw_offset(rng_plan, kPersonOffsetRadiusM, ride.off_x, ride.off_y);

            if (alight >= config.duration_s) {
                ride.t1 = config.duration_s;
                phases.push_back(ride);
                t = config.duration_s;
                break;
            }
            ride.t1 = alight;
            phases.push_back(ride);
            ++rides_done;
            current_stop = arrival.stop_id;
            t = alight;

            Phase next_stand;
            next_stand.kind = Phase::Kind::Stand;
            next_stand.t0 = t;
            next_stand.stop_id = current_stop;
            draw_offset(rng_plan, kPersonOffsetRadiusM, next_stand.off_x, next_stand.off_y);

            if (config.stops.size() > 1 && rng_plan.bernoulli(config.walk_probability)) {
                int dest = current_stop;
                while (dest == current_stop) {
                    dest = config.stops[rng_plan.uniform_index(config.stops.size())].id;
                }
                const PlanePos from = stop_pos(config, current_stop);
                const PlanePos to = stop_pos(config, dest);
                const double walk_time = plane_dist(from, to) / config.walk_speed_mps;
                Phase walk;
                walk.kind = Phase::Kind::Walk;
                walk.t0 = t;
                walk.t1 = t + walk_time;
                walk.from = from;
                walk.to = to;
                phases.push_back(walk);
                t += walk_time;
                current_stop = dest;
                next_stand.t0 = t;
                next_stand.stop_id = dest;
            } else {
                t += 10.0 + rng_plan.uniform() * 80.0;  // loiter, then look for the next bus
            }
            phases.push_back(next_stand);
        }
        phases.back().t1 = std::max(phases.back().t1, config.duration_s);
        if (rides_done < 2) {
            throw ConfigError("simulate_scenario: duration " + format_double(config.duration_s) +
                              " s is too short for user " + format_int(user) +
                              " to complete 2 rides");
        }

        // ---- sensor sampling ----
        const bool body_shadowed = rng_sense.bernoulli(rssi_model.body_shadow_prob);
        std::size_t phase_idx = 0;
        int segment_id = 0;
        Bibo prev_label = Bibo::BO;
        bool first = true;
        for (std::size_t k = 0; k < n_points; ++k) {
            const double now = static_cast<double>(k) * dt;
            while (phase_idx + 1 < phases.size() && now >= phases[phase_idx].t1) ++phase_idx;
            const Phase& phase = phases[phase_idx];

            PlanePos pos;
            Bibo label = Bibo::BO;
            switch (phase.kind) {
                case Phase::Kind::Stand: {
                    const PlanePos anchor = stop_pos(config, phase.stop_id);
                    pos = {anchor.x + phase.off_x, anchor.y + phase.off_y};
                    break;
                }
                case Phase::Kind::Ride: {
                    const PlanePos anchor =
                        timeline_position(timelines[static_cast<std::size_t>(phase.bus_index)], now);
                    pos = {anchor.x + phase.off_x, anchor.y + phase.off_y};
                    label = Bibo::BI;
                    break;
                }
                case Phase::Kind::Walk: {
                    const double f = phase.t1 > phase.t0
                                         ? std::clamp((now - phase.t0) / (phase.t1 - phase.t0), 0.0, 1.0)
                                         : 0.0;
                    pos = {phase.from.x + f * (phase.to.x - phase.from.x),
                           phase.from.y + f * (phase.to.y - phase.from.y)};
                    break;
                }
            }

            TrajectoryPoint p;
            p.user_id = user;
            p.timestamp_s = now;

            if (!first && label != prev_label) ++segment_id;
            first = false;
            prev_label = label;
            p.bibo_label = label;
            p.trip_segment_id = segment_id;

            // bounded GPS jitter: Gaussian, radially clamped at 2 sigma
            double nx = 0.0, ny = 0.0;
            if (config.gps_noise_std_m > 0.0) {
                nx = rng_sense.normal(0.0, config.gps_noise_std_m);
                ny = rng_sense.normal(0.0, config.gps_noise_std_m);
                const double r = std::hypot(nx, ny);
                const double cap = 2.0 * config.gps_noise_std_m;
                if (r > cap) {
                    nx *= cap / r;
                    ny *= cap / r;
                }
            }
            const LatLon fix = projection.to_latlon(pos.x + nx, pos.y + ny);
            p.lat = fix.lat_deg;
            p.lon = fix.lon_deg;

            p.os_activity = emulate_os_activity(label, config.os_activity_accuracy, rng_sense);

            for (std::size_t b = 0; b < config.beacons.size(); ++b) {
                const BeaconSpec& beacon = config.beacons[b];
                // chance of hearing at least one advertisement in the interval
                const double p_rx = 1.0 - std::exp(-beacon.tx_rate_hz * dt);
                if (rng_sense.uniform() >= p_rx) continue;
                PlanePos beacon_pos;
                if (beacon.mount == BeaconMount::Bus) {
                    for (std::size_t bi = 0; bi < config.buses.size(); ++bi) {
                        if (config.buses[bi].id == beacon.mount_id) {
                            beacon_pos = timeline_position(timelines[bi], now);
                            break;
                        }
                    }
                } else {
                    beacon_pos = stop_pos(config, beacon.mount_id);
                }
                const double dist =
                    std::max(plane_dist(pos, beacon_pos), kMinSensingDistanceM);
                const double offset = (beacon.tx_power_dbm - kDefaultTxPowerDbm) -
                                      (body_shadowed ? rssi_model.body_shadow_db : 0.0);
                p.rssi[b] = rssi_at(dist, rssi_model, rng_sense, offset);
            }

            rows.push_back(p);
        }
    }
    return make_dataset(std::move(rows));
}

}  // namespace bibo
