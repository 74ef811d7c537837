#include "bibo/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include "bibo/errors.hpp"
#include "bibo/text.hpp"

namespace bibo {

namespace {

std::string row_error(std::size_t line_no, const std::string& column, const std::string& what) {
    return "line " + format_int(static_cast<std::int64_t>(line_no)) + ", column '" + column +
           "': " + what;
}

// (user, timestamp) key; timestamps compare bit-exactly.
std::pair<int, std::uint64_t> row_key(const TrajectoryPoint& p) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(p.timestamp_s));
    std::memcpy(&bits, &p.timestamp_s, sizeof(bits));
    return {p.user_id, bits};
}

}  // namespace

const std::vector<std::string>& dataset_columns() {
    static const std::vector<std::string> columns = {
        "user_id", "timestamp_s", "lat",        "lon",        "rssi_0",
        "rssi_1",  "rssi_2",      "rssi_3",     "rssi_4",     "os_activity",
        "bibo_label", "trip_segment_id"};
    return columns;
}

Dataset make_dataset(std::vector<TrajectoryPoint> rows) {
    Dataset dataset;
    std::set<std::pair<int, std::uint64_t>> seen;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!seen.insert(row_key(rows[i])).second) {
            throw SchemaError("duplicate (user_id, timestamp_s) key: user " +
                              format_int(rows[i].user_id) + ", t=" +
                              format_double(rows[i].timestamp_s));
        }
        dataset.user_index[rows[i].user_id].push_back(i);
    }
    dataset.rows = std::move(rows);
    return dataset;
}

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw SchemaError("cannot open dataset file: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError(path + ": empty file, expected header");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const auto& columns = dataset_columns();
    const auto header = split_fields(line);
    for (const auto& field : header) {
        if (std::find(columns.begin(), columns.end(), std::string(field)) == columns.end()) {
            throw SchemaError(path + ": unknown column '" + std::string(field) + "'");
        }
    }
    if (header.size() != columns.size()) {
        throw SchemaError(path + ": expected " + format_int(static_cast<std::int64_t>(columns.size())) +
                          " columns, found " + format_int(static_cast<std::int64_t>(header.size())));
    }
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (std::string(header[i]) != columns[i]) {
            throw SchemaError(path + ": column " + format_int(static_cast<std::int64_t>(i)) +
                              " is '" + std::string(header[i]) + "', expected '" + columns[i] + "'");
        }
    }

    std::vector<TrajectoryPoint> rows;
    std::size_t line_no = 1;
    std::set<std::pair<int, std::uint64_t>> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != columns.size()) {
            throw SchemaError(path + ": line " + format_int(static_cast<std::int64_t>(line_no)) +
                              ": expected " + format_int(static_cast<std::int64_t>(columns.size())) +
                              " fields, found " + format_int(static_cast<std::int64_t>(fields.size())));
        }
        TrajectoryPoint p;
        auto need_int = [&](std::size_t col) {
            const auto v = parse_int(fields[col]);
            if (!v) throw SchemaError(path + ": " + row_error(line_no, columns[col],
                                      "cannot parse integer '" + std::string(fields[col]) + "'"));
            return *v;
        };
        auto need_double = [&](std::size_t col) {
            const auto v = parse_double(fields[col]);
            if (!v) throw SchemaError(path + ": " + row_error(line_no, columns[col],
                                      "cannot parse number '" + std::string(fields[col]) + "'"));
            return *v;
        };
        p.user_id = static_cast<int>(need_int(0));
        p.timestamp_s = need_double(1);
        p.lat = need_double(2);
        p.lon = need_double(3);
        for (std::size_t s = 0; s < kRssiSlots; ++s) {
            const std::size_t col = 4 + s;
            if (fields[col].empty()) continue;  // absent reading, not zero
            const double v = need_double(col);
            if (v <= kRssiFloorDbm || v > kRssiCeilingDbm) {
                throw SchemaError(path + ": " + row_error(line_no, columns[col],
                                  "RSSI " + format_double(v) + " outside (-100, -50]"));
            }
            p.rssi[s] = v;
        }
        try {
            p.os_activity = os_activity_from_string(fields[9]);
            p.bibo_label = bibo_from_string(fields[10]);
        } catch (const SchemaError& e) {
            throw SchemaError(path + ": " + row_error(line_no, "os_activity/bibo_label", e.what()));
        }
        p.trip_segment_id = static_cast<int>(need_int(11));
        if (!seen.insert(row_key(p)).second) {
            throw SchemaError(path + ": line " + format_int(static_cast<std::int64_t>(line_no)) +
                              ": duplicate (user_id, timestamp_s) key");
        }
        rows.push_back(p);
    }
    Dataset dataset;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        dataset.user_index[rows[i].user_id].push_back(i);
    }
    dataset.rows = std::move(rows);
    return dataset;
}

void save_csv(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw SchemaError("cannot open file for writing: " + path);
    }
    out << join(dataset_columns()) << '\n';
    for (const auto& p : dataset.rows) {
        out << format_int(p.user_id) << ',' << format_double(p.timestamp_s) << ','
            << format_double(p.lat) << ',' << format_double(p.lon);
        for (const auto& slot : p.rssi) {
            out << ',';
            if (slot.has_value()) out << format_double(*slot);
        }
        out << ',' << to_string(p.os_activity) << ',' << to_string(p.bibo_label) << ','
            << format_int(p.trip_segment_id) << '\n';
    }
    if (!out) {
        throw SchemaError("write failed: " + path);
    }
}

std::vector<int> list_unique_users(const Dataset& dataset) {
    std::vector<int> users;
    users.reserve(dataset.user_index.size());
    for (const auto& [user, rows] : dataset.user_index) users.push_back(user);
    std::sort(users.begin(), users.end());
    return users;
}

CleanResult clean_segment_trajectories(const Dataset& dataset, int user_id) {
    const auto it = dataset.user_index.find(user_id);
    if (it == dataset.user_index.end()) {
        throw std::invalid_argument("clean_segment_trajectories: unknown user " +
                                    format_int(user_id));
    }
    CleanResult result;
    double last_time = 0.0;
    bool have_last = false;
    for (std::size_t row : it->second) {
        const double t = dataset.rows[row].timestamp_s;
        if (have_last && t <= last_time) {
            ++result.dropped_rows;
            continue;
        }
        result.kept_rows.push_back(row);
        last_time = t;
        have_last = true;
    }
    if (result.kept_rows.empty()) {
        result.empty_warning = true;
        return result;
    }
    for (std::size_t i = 0; i < result.kept_rows.size(); ++i) {
        const TrajectoryPoint& p = dataset.rows[result.kept_rows[i]];
        if (result.segments.empty() || result.segments.back().label != p.bibo_label) {
            TripSegment seg;
            seg.user_id = user_id;
            seg.segment_id = static_cast<int>(result.segments.size());
            seg.label = p.bibo_label;
            seg.start_time = p.timestamp_s;
            seg.end_time = p.timestamp_s;
            seg.row_begin = i;
            seg.row_count = 1;
            result.segments.push_back(seg);
        } else {
            result.segments.back().end_time = p.timestamp_s;
            ++result.segments.back().row_count;
        }
    }
    return result;
}

}  // namespace bibo
