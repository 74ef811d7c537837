#include "bibo/noise.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "bibo/errors.hpp"

namespace bibo {

std::string_view to_string(FlipAssumption assumption) {
    return assumption == FlipAssumption::OneFlip ? "ONE_FLIP" : "FULL_FLIP";
}

FlipAssumption flip_assumption_from_string(std::string_view text) {
    if (text == "ONE_FLIP") return FlipAssumption::OneFlip;
    if (text == "FULL_FLIP") return FlipAssumption::FullFlip;
    throw SchemaError("unknown flip assumption '" + std::string(text) +
                      "' (expected ONE_FLIP or FULL_FLIP)");
}

std::uint64_t draw_poisson(double lambda, Rng& rng) { return rng.poisson(lambda); }

namespace {

void check_tiling(std::span<const TripSegment> segments, std::size_t n_rows) {
    std::size_t expected_begin = 0;
    for (const auto& seg : segments) {
        if (seg.row_begin != expected_begin) {
            throw std::invalid_argument("flip_labels: segments do not tile the label vector");
        }
        expected_begin += seg.row_count;
    }
    if (expected_begin != n_rows) {
        throw std::invalid_argument("flip_labels: segments cover " +
                                    std::to_string(expected_begin) + " rows, labels have " +
                                    std::to_string(n_rows));
    }
}

}  // namespace

std::pair<std::vector<Bibo>, UserFlipReport> flip_labels(std::span<const TripSegment> segments,
                                                         std::span<const Bibo> labels,
                                                         const NoiseSpec& spec, Rng& rng) {
    if (spec.lambda < 0.0) {
        throw std::invalid_argument("flip_labels: lambda must be >= 0");
    }
    check_tiling(segments, labels.size());

    std::vector<Bibo> out(labels.begin(), labels.end());
    UserFlipReport report;
    report.user_id = segments.empty() ? 0 : segments.front().user_id;
    report.drawn_errors = draw_poisson(spec.lambda, rng);

    if (segments.empty()) {
        report.empty_segments_warning = report.drawn_errors > 0;
        return {std::move(out), report};
    }

    const std::size_t n_errors =
        std::min<std::size_t>(report.drawn_errors, segments.size());
    std::vector<std::size_t> picked = rng.sample_without_replacement(segments.size(), n_errors);
    std::sort(picked.begin(), picked.end());

    for (std::size_t idx : picked) {
        const TripSegment& seg = segments[idx];
        report.affected_segments.push_back(seg.segment_id);
        if (spec.assumption == FlipAssumption::FullFlip) {
            for (std::size_t i = 0; i < seg.row_count; ++i) {
                out[seg.row_begin + i] = flipped(out[seg.row_begin + i]);
            }
        } else {
            // neighbor's current label; ascending application keeps every
            // selected segment coherent with its predecessor afterwards
            Bibo target;
            if (idx > 0) {
                target = out[segments[idx - 1].row_begin];
            } else if (segments.size() > 1) {
                target = out[segments[1].row_begin];
            } else {
                continue;  // single segment has no neighbor to match
            }
            for (std::size_t i = 0; i < seg.row_count; ++i) {
                out[seg.row_begin + i] = target;
            }
        }
    }

    std::size_t changed = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] != labels[i]) ++changed;
    }
    report.flipped_fraction =
        labels.empty() ? 0.0 : static_cast<double>(changed) / static_cast<double>(labels.size());
    return {std::move(out), report};
}

std::pair<std::vector<Bibo>, FlipReport> propagate_errors(std::span<const SegmentedLabels> users,
                                                          std::span<const Bibo> labels,
                                                          const NoiseSpec& spec) {
    std::vector<Bibo> out(labels.begin(), labels.end());
    FlipReport report;
    std::size_t changed = 0;
    for (const auto& user : users) {
        if (user.row_begin + user.row_count > labels.size()) {
            throw std::invalid_argument("propagate_errors: user slice out of range");
        }
        Rng rng(derive_seed(spec.seed, "noise.user", {static_cast<std::uint64_t>(user.user_id)}));
        const std::span<const Bibo> slice = labels.subspan(user.row_begin, user.row_count);
        auto [flipped_slice, user_report] = flip_labels(user.segments, slice, spec, rng);
        user_report.user_id = user.user_id;
        for (std::size_t i = 0; i < user.row_count; ++i) {
            out[user.row_begin + i] = flipped_slice[i];
            if (flipped_slice[i] != slice[i]) ++changed;
        }
        report.users.push_back(std::move(user_report));
    }
    report.flipped_fraction =
        labels.empty() ? 0.0 : static_cast<double>(changed) / static_cast<double>(labels.size());
    return {std::move(out), report};
}

std::string FlipReport::to_json() const {
    nlohmann::json j;
    j["flipped_fraction"] = flipped_fraction;
    j["users"] = nlohmann::json::array();
    for (const auto& u : users) {
        nlohmann::json ju;
        ju["user_id"] = u.user_id;
        ju["drawn_errors"] = u.drawn_errors;
        ju["affected_segments"] = u.affected_segments;
        ju["flipped_fraction"] = u.flipped_fraction;
        if (u.empty_segments_warning) ju["warning"] = "no segments to flip";
        j["users"].push_back(std::move(ju));
    }
    return j.dump(2);
}

namespace {

std::int64_t truncated_poisson(double lambda, Rng& rng) {
    if (!(lambda > 0.0)) {
        throw DomainError("simulate_p2d_validation: perturbation lambda must be > 0");
    }
    std::uint64_t k = 0;
    do {
        k = rng.poisson(lambda);
    } while (k == 0);
    return static_cast<std::int64_t>(k);
}

std::int64_t perturbed_count(std::int64_t true_count, double lambda, Rng& rng) {
    const std::int64_t k = truncated_poisson(lambda, rng);
    if (true_count - k < 0) return true_count + k;
    return rng.bernoulli(0.5) ? true_count + k : true_count - k;
}

}  // namespace

P2dOutcome simulate_p2d_validation(std::int64_t true_count, bool perturb, Rng& rng,
                                   const P2dParams& params) {
    if (true_count < 0) {
        throw DomainError("simulate_p2d_validation: true count must be >= 0");
    }
    P2dOutcome outcome;
    outcome.presented_count = perturb ? perturbed_count(true_count, params.lambda, rng) : true_count;
    if (perturb) {
        if (rng.bernoulli(params.p_modify_given_perturbed)) {
            outcome.response = P2dResponse::Modified;
            outcome.reported_count = rng.bernoulli(params.p_correct_given_modify)
                                         ? true_count
                                         : perturbed_count(true_count, params.lambda, rng);
        } else {
            outcome.response = P2dResponse::Confirmed;
            outcome.reported_count = outcome.presented_count;
        }
    } else {
        if (rng.bernoulli(params.p_modify_given_clean)) {
            outcome.response = P2dResponse::Modified;
            outcome.reported_count = perturbed_count(true_count, params.lambda, rng);
        } else {
            outcome.response = P2dResponse::Confirmed;
            outcome.reported_count = true_count;
        }
    }
    return outcome;
}

}  // namespace bibo
