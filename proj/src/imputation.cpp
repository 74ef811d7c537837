#include "bibo/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bibo/errors.hpp"
#include "bibo/text.hpp"

namespace bibo {

void validate(const EwmaParams& params) {
    if (!(params.window_s > 0.0)) {
        throw ConfigError("EwmaParams: window must be > 0");
    }
    if (!(params.alpha > 0.0) || params.alpha > 1.0) {
        throw ConfigError("EwmaParams: alpha must be in (0, 1]");
    }
    if (params.max_gap_s < 0.0) {
        throw ConfigError("EwmaParams: max gap span must be >= 0");
    }
    // C = -100 is tolerated because measured values are strictly above the
    // floor; anything in (-100, -50] can collide with real readings.
    if (params.fill_constant > kRssiFloorDbm && params.fill_constant <= kRssiCeilingDbm) {
        throw ConfigError("EwmaParams: fill constant " + format_double(params.fill_constant) +
                          " lies inside the RSSI domain (-100, -50)");
    }
}

std::vector<double> AugmentedFingerprint::flattened() const {
    std::vector<double> out;
    out.reserve(values.size() * 2);
    out.insert(out.end(), values.begin(), values.end());
    for (std::uint8_t m : mask) out.push_back(static_cast<double>(m));
    return out;
}

EwmaResult ewma_impute(std::span<const std::optional<double>> series,
                       std::span<const double> times, const EwmaParams& params) {
    validate(params);
    if (series.size() != times.size()) {
        throw std::invalid_argument("ewma_impute: series and times differ in length");
    }
    const std::size_t n = series.size();
    EwmaResult result;
    result.values.assign(series.begin(), series.end());
    result.imputed.assign(n, 0);

    for (std::size_t g = 0; g < n; ++g) {
        if (series[g].has_value()) continue;
        const double t = times[g];
        double lo, hi;
        if (params.mode == EwmaMode::Batch) {
            lo = t - 0.5 * params.window_s;
            hi = t + 0.5 * params.window_s;
        } else {
            lo = t - params.window_s;
            hi = t;
        }
        const auto first = std::lower_bound(times.begin(), times.end(), lo);
        const auto last = std::upper_bound(first, times.end(), hi);
        double weight_sum = 0.0;
        double weighted = 0.0;
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = static_cast<std::size_t>(first - times.begin());
             i < static_cast<std::size_t>(last - times.begin()); ++i) {
            if (!series[i].has_value()) continue;
            const double dt = std::fabs(times[i] - t);
            nearest = std::min(nearest, dt);
            const double w = std::pow(params.alpha, dt);
            weight_sum += w;
            weighted += w * *series[i];
        }
        if (weight_sum > 0.0 && nearest <= params.max_gap_s) {
            result.values[g] = weighted / weight_sum;
            result.imputed[g] = 1;
        }
    }
    return result;
}

AugmentedFingerprint imputation_trick(const Fingerprint& fp, const EwmaParams& params) {
    validate(params);
    AugmentedFingerprint out;
    out.values.reserve(fp.values.size());
    out.mask.reserve(fp.values.size());
    for (const auto& slot : fp.values) {
        if (slot.has_value()) {
            out.values.push_back(*slot);
            out.mask.push_back(1);
        } else {
            out.values.push_back(params.fill_constant);
            out.mask.push_back(0);
        }
    }
    return out;
}

ImputedChannels impute_channels(const std::vector<std::vector<std::optional<double>>>& slot_series,
                                std::span<const double> times, const EwmaParams& params) {
    validate(params);
    ImputedChannels out;
    out.values.resize(slot_series.size());
    out.mask.resize(slot_series.size());
    for (std::size_t s = 0; s < slot_series.size(); ++s) {
        const EwmaResult filled = ewma_impute(slot_series[s], times, params);
        auto& values = out.values[s];
        auto& mask = out.mask[s];
        values.resize(times.size());
        mask.resize(times.size());
        for (std::size_t t = 0; t < times.size(); ++t) {
            if (filled.values[t].has_value()) {
                values[t] = *filled.values[t];
                mask[t] = 1;
            } else {
                values[t] = params.fill_constant;
                mask[t] = 0;
            }
        }
    }
    return out;
}

}  // namespace bibo
