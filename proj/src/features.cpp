#include "bibo/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bibo/errors.hpp"
#include "bibo/text.hpp"

namespace bibo {

std::array<double, kWindowFeatureCount> window_features(std::span<const double> values,
                                                        std::span<const double> times) {
    const std::size_t n = values.size();
    if (n == 0) {
        throw std::invalid_argument("window_features: empty window");
    }
    if (times.size() != n) {
        throw std::invalid_argument("window_features: values and times differ in length");
    }

    double sum = 0.0;
    double vmax = values[0], vmin = values[0];
    std::size_t argmax = 0, argmin = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += values[i];
        if (values[i] > vmax) {
            vmax = values[i];
            argmax = i;
        }
        if (values[i] < vmin) {
            vmin = values[i];
            argmin = i;
        }
    }
    const double m = sum / static_cast<double>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = values[i] - m;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));

    double beyond = 0.0, below = 0.0, above = 0.0;
    if (sd > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
            if (std::fabs(values[i] - m) > sd) beyond += 1.0;
            if (values[i] < m - sd) below += 1.0;
            if (values[i] > m + sd) above += 1.0;
        }
    }

    // strict local maxima
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (values[i] > values[i - 1] && values[i] > values[i + 1]) peaks.push_back(i);
    }
    const double t_end = times[n - 1];
    double peaks_half = 0.0, peaks_above = 0.0;
    for (std::size_t p : peaks) {
        if (times[p] > t_end - kHalfWindowS) peaks_half += 1.0;
        if (values[p] > m + sd) peaks_above += 1.0;
    }
    double peak_gap = 0.0;
    if (peaks.size() >= 2) {
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            peak_gap += times[peaks[i]] - times[peaks[i - 1]];
        }
        peak_gap /= static_cast<double>(peaks.size() - 1);
    }

    // OLS slope against elapsed time
    double t_mean = 0.0;
    for (double t : times) t_mean += t;
    t_mean /= static_cast<double>(n);
    double cov = 0.0, var_t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = times[i] - t_mean;
        cov += dt * (values[i] - m);
        var_t += dt * dt;
    }
    const double slope = var_t > 0.0 ? cov / var_t : 0.0;

    return {m,
            vmax,
            vmin,
            static_cast<double>(argmin),
            static_cast<double>(argmax),
            vmax - vmin,
            beyond,
            below,
            above,
            static_cast<double>(peaks.size()),
            peaks_half,
            peaks_above,
            peak_gap,
            slope};
}

Kinematics gps_kinematics(std::span<const LatLon> fixes, std::span<const double> times) {
    if (fixes.size() != times.size()) {
        throw std::invalid_argument("gps_kinematics: fixes and times differ in length");
    }
    if (fixes.size() < 2) {
        throw std::invalid_argument("gps_kinematics: need at least 2 fixes");
    }
    Kinematics out;
    out.kept.push_back(0);
    out.distance_m.push_back(0.0);
    out.bearing_deg.push_back(0.0);
    out.speed_mps.push_back(0.0);
    std::size_t prev = 0;
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        const double dt = times[i] - times[prev];
        if (dt <= 0.0) continue;  // duplicate or reversed timestamp: dropped
        const double dist = haversine_m(fixes[prev], fixes[i]);
        out.kept.push_back(i);
        out.distance_m.push_back(dist);
        out.bearing_deg.push_back(initial_bearing_deg(fixes[prev], fixes[i]));
        out.speed_mps.push_back(dist / dt);
        prev = i;
    }
    if (out.kept.size() >= 2) {
        // head backfill: the first fix has no predecessor
        out.distance_m[0] = out.distance_m[1];
        out.bearing_deg[0] = out.bearing_deg[1];
        out.speed_mps[0] = out.speed_mps[1];
    }
    return out;
}

namespace {

struct ChannelSet {
    std::vector<std::string> names;               // channel names
    std::vector<std::vector<double>> series;      // [channel][t]
    std::vector<std::vector<std::uint8_t>> mask;  // BLE only; empty for GPS
};

ChannelSet ble_channels(const Dataset& dataset, const CleanResult& clean,
                        std::span<const double> times, const EwmaParams& ewma) {
    ChannelSet set;
    std::vector<std::vector<std::optional<double>>> slots(kRssiSlots);
    for (std::size_t s = 0; s < kRssiSlots; ++s) {
        slots[s].reserve(times.size());
        for (std::size_t row : clean.kept_rows) {
            slots[s].push_back(dataset.rows[row].rssi[s]);
        }
    }
    const ImputedChannels imputed = impute_channels(slots, times, ewma);
    for (std::size_t s = 0; s < kRssiSlots; ++s) {
        set.names.push_back("rssi_" + format_int(static_cast<std::int64_t>(s)));
    }
    set.series = imputed.values;
    set.mask = imputed.mask;
    return set;
}

ChannelSet gps_channels(const Dataset& dataset, const CleanResult& clean,
                        std::span<const double> times) {
    ChannelSet set;
    set.names = {"dist", "bearing", "speed"};
    std::vector<LatLon> fixes;
    fixes.reserve(times.size());
    for (std::size_t row : clean.kept_rows) {
        fixes.push_back(LatLon{dataset.rows[row].lat, dataset.rows[row].lon});
    }
    if (fixes.size() < 2) {
        // degenerate single-row user: zero kinematics
        set.series = {std::vector<double>(times.size(), 0.0),
                      std::vector<double>(times.size(), 0.0),
                      std::vector<double>(times.size(), 0.0)};
        return set;
    }
    const Kinematics kin = gps_kinematics(fixes, times);
    // cleaned rows have strictly increasing timestamps, so nothing is dropped
    set.series = {kin.distance_m, kin.bearing_deg, kin.speed_mps};
    return set;
}

}  // namespace

FeatureTable build_feature_table(const Dataset& dataset, SensorFamily family,
                                 const EwmaParams& ewma) {
    FeatureTable table;
    table.family = family;

    const std::vector<int> users = list_unique_users(dataset);

    bool columns_ready = false;
    for (int user : users) {
        const CleanResult clean = clean_segment_trajectories(dataset, user);
        if (clean.kept_rows.empty()) continue;

        std::vector<double> times;
        times.reserve(clean.kept_rows.size());
        for (std::size_t row : clean.kept_rows) {
            times.push_back(dataset.rows[row].timestamp_s);
        }

        const ChannelSet channels = family == SensorFamily::BLE
                                        ? ble_channels(dataset, clean, times, ewma)
                                        : gps_channels(dataset, clean, times);

        if (!columns_ready) {
            for (const auto& name : channels.names) {
                for (std::size_t f = 1; f <= kWindowFeatureCount; ++f) {
                    table.columns.push_back("f" + format_int(static_cast<std::int64_t>(f)) + "_" +
                                            name);
                }
            }
            for (std::size_t c = 0; c < channels.mask.size(); ++c) {
                table.columns.push_back("mask_mean_" + channels.names[c]);
            }
            columns_ready = true;
        }

        // per-row segment ids from the recomputed segmentation
        std::vector<int> row_segment(clean.kept_rows.size(), 0);
        for (const auto& seg : clean.segments) {
            for (std::size_t i = 0; i < seg.row_count; ++i) {
                row_segment[seg.row_begin + i] = seg.segment_id;
            }
        }

        const std::size_t n = times.size();
        std::size_t window_begin = 0;
        for (std::size_t i = 0; i < n; ++i) {
            // trailing window (t - 10, t]
            while (times[window_begin] <= times[i] - kFeatureWindowS) ++window_begin;
            const std::size_t w0 = window_begin;
            const std::size_t wlen = i - w0 + 1;
            const std::span<const double> wt(times.data() + w0, wlen);

            for (const auto& series : channels.series) {
                const std::span<const double> wv(series.data() + w0, wlen);
                const auto feats = window_features(wv, wt);
                table.data.insert(table.data.end(), feats.begin(), feats.end());
            }
            for (const auto& mask : channels.mask) {
                double cover = 0.0;
                for (std::size_t k = w0; k <= i; ++k) cover += mask[k];
                table.data.push_back(cover / static_cast<double>(wlen));
            }

            const TrajectoryPoint& p = dataset.rows[clean.kept_rows[i]];
            table.user_ids.push_back(user);
            table.timestamps.push_back(p.timestamp_s);
            table.segment_ids.push_back(row_segment[i]);
            table.labels.push_back(p.bibo_label);
            ++table.n_rows;
        }
    }
    return table;
}

void save_feature_csv(const FeatureTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot open file for writing: " + path);
    }
    out << "user_id,timestamp_s,trip_segment_id,bibo_label";
    for (const auto& c : table.columns) out << ',' << c;
    out << '\n';
    for (std::size_t r = 0; r < table.n_rows; ++r) {
        out << format_int(table.user_ids[r]) << ',' << format_double(table.timestamps[r]) << ','
            << format_int(table.segment_ids[r]) << ',' << to_string(table.labels[r]);
        for (double v : table.row(r)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) {
        throw SchemaError("write failed: " + path);
    }
}

}  // namespace bibo
