#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bibo/types.hpp"

namespace bibo {

// One timestamped sensor snapshot of one user.
struct TrajectoryPoint {
    int user_id = 0;
    double timestamp_s = 0.0;
    double lat = 0.0;
    double lon = 0.0;
    std::array<std::optional<double>, kRssiSlots> rssi{};
    OsActivity os_activity = OsActivity::Other;
    Bibo bibo_label = Bibo::BO;
    int trip_segment_id = 0;

    bool operator==(const TrajectoryPoint&) const = default;
};

// Rows in file order plus a per-user index. (user, timestamp) keys are
// unique; row order within a user is preserved as loaded.
struct Dataset {
    std::vector<TrajectoryPoint> rows;
    std::unordered_map<int, std::vector<std::size_t>> user_index;
    int schema_version = 1;

    bool operator==(const Dataset& other) const {
        return schema_version == other.schema_version && rows == other.rows;
    }
};

// CSV column names, in order.
const std::vector<std::string>& dataset_columns();

// Validates uniqueness of (user, timestamp) and builds the index.
Dataset make_dataset(std::vector<TrajectoryPoint> rows);

// Errors carry the 1-based line number and the column name where applicable.
Dataset load_csv(const std::string& path);
void save_csv(const Dataset& dataset, const std::string& path);

// Sorted, deduplicated user ids.
std::vector<int> list_unique_users(const Dataset& dataset);

// Maximal run of equal consecutive labels of one user.
struct TripSegment {
    int user_id = 0;
    int segment_id = 0;  // 0-based, increments at each label transition
    Bibo label = Bibo::BO;
    double start_time = 0.0;
    double end_time = 0.0;
    std::size_t row_begin = 0;  // index into the retained row sequence
    std::size_t row_count = 0;
};

struct CleanResult {
    std::vector<TripSegment> segments;
    // Indices into dataset.rows, in retained order.
    std::vector<std::size_t> kept_rows;
    std::size_t dropped_rows = 0;
    bool empty_warning = false;
};

// Drops rows whose timestamp does not increase over the previously retained
// one, then segments the remainder on label transitions. Throws if the user
// is not in the dataset.
CleanResult clean_segment_trajectories(const Dataset& dataset, int user_id);

}  // namespace bibo
