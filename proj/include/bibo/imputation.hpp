#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bibo/types.hpp"

namespace bibo {

enum class EwmaMode : std::uint8_t {
    // Symmetric window around the gap; default for offline processing.
    Batch = 0,
    // Past-and-present observations only.
    Streaming = 1,
};

struct EwmaParams {
    double window_s = 10.0;   // batch: +-window/2 around the gap; streaming: trailing window
    double alpha = 0.5;       // per-second decay; weight(dt) = alpha^|dt|, alpha = 1 is a plain mean
    double max_gap_s = 10.0;  // gaps farther than this from every observation stay absent
    double fill_constant = -120.0;  // C; must lie outside the RSSI domain
    EwmaMode mode = EwmaMode::Batch;
};

// Throws ConfigError naming the violated invariant.
void validate(const EwmaParams& params);

// One timestamp's RSSI vector, one slot per beacon; absent = gap.
struct Fingerprint {
    std::vector<std::optional<double>> values;
};

// Fingerprint after the gap-filling step: every slot holds either a signal
// value (mask 1, measured or EWMA-imputed) or the constant C (mask 0).
// Flattened as values followed by mask, doubling the slot count.
struct AugmentedFingerprint {
    std::vector<double> values;
    std::vector<std::uint8_t> mask;

    std::vector<double> flattened() const;
};

struct EwmaResult {
    std::vector<std::optional<double>> values;  // observed values unchanged
    std::vector<std::uint8_t> imputed;          // 1 where a gap was filled
};

// Fills gaps that lie within max_gap_s of an in-window observation with the
// exponentially weighted average of the window's observations. series and
// times must be equally long and time-ordered.
EwmaResult ewma_impute(std::span<const std::optional<double>> series,
                       std::span<const double> times, const EwmaParams& params);

// Replaces the remaining gaps with params.fill_constant and appends the
// binary presence mask.
AugmentedFingerprint imputation_trick(const Fingerprint& fp, const EwmaParams& params);

// Full per-beacon pipeline over a user's time series: EWMA per slot series,
// then the constant fill + mask, column by column.
struct ImputedChannels {
    // [slot][t]
    std::vector<std::vector<double>> values;
    std::vector<std::vector<std::uint8_t>> mask;
};

ImputedChannels impute_channels(const std::vector<std::vector<std::optional<double>>>& slot_series,
                                std::span<const double> times, const EwmaParams& params);

}  // namespace bibo
