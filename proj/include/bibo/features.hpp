#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bibo/dataset.hpp"
#include "bibo/geo.hpp"
#include "bibo/imputation.hpp"
#include "bibo/types.hpp"

namespace bibo {

inline constexpr std::size_t kWindowFeatureCount = 14;
inline constexpr double kFeatureWindowS = 10.0;
inline constexpr double kHalfWindowS = 5.0;

// The 14 per-window statistics, in column order:
//   1 mean, 2 max, 3 min, 4 argmin index, 5 argmax index, 6 amplitude,
//   7 #points with |x-mean| > std, 8 #points below mean-std,
//   9 #points above mean+std, 10 #peaks in the window,
//   11 #peaks in the trailing 5 s, 12 #peaks above mean+std,
//   13 mean inter-peak distance in seconds (0 when < 2 peaks),
//   14 OLS slope against elapsed seconds.
// A peak is a strict local maximum; argmin/argmax are 0-based and take the
// first occurrence on ties. Throws on an empty window.
std::array<double, kWindowFeatureCount> window_features(std::span<const double> values,
                                                        std::span<const double> times);

// Per-point motion derived from consecutive GPS fixes: haversine distance,
// initial bearing in [0, 360), speed = distance / dt. Rows whose timestamp
// does not increase over the previous kept fix are dropped; the first kept
// row backfills the values of the following one (zeros when alone).
struct Kinematics {
    std::vector<std::size_t> kept;  // indices into the input
    std::vector<double> distance_m;
    std::vector<double> bearing_deg;
    std::vector<double> speed_mps;
};

Kinematics gps_kinematics(std::span<const LatLon> fixes, std::span<const double> times);

// Flattened per-timestamp feature rows for one sensor family. Rows run over
// users in ascending id order, each user's retained rows in time order; both
// families built from one dataset share the same row universe.
struct FeatureTable {
    SensorFamily family = SensorFamily::BLE;
    std::vector<std::string> columns;
    std::size_t n_rows = 0;
    std::vector<double> data;  // row-major, n_rows x columns.size()
    std::vector<int> user_ids;
    std::vector<double> timestamps;
    std::vector<int> segment_ids;  // recomputed from label transitions
    std::vector<Bibo> labels;

    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(data).subspan(r * columns.size(), columns.size());
    }
};

// Cleans and segments each user, then computes the windowed features.
// BLE: 5 RSSI channels x 14 features + 5 mask coverage means (window mean of
// the presence mask). GPS: distance gap, bearing, speed channels x 14.
FeatureTable build_feature_table(const Dataset& dataset, SensorFamily family,
                                 const EwmaParams& ewma);

void save_feature_csv(const FeatureTable& table, const std::string& path);

}  // namespace bibo
