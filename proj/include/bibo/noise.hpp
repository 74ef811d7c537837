#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bibo/dataset.hpp"
#include "bibo/rng.hpp"
#include "bibo/types.hpp"

namespace bibo {

enum class FlipAssumption : std::uint8_t {
    // A mislabeled segment takes its neighbor's label: the previous
    // segment's, or the following one's for the first segment.
    OneFlip = 0,
    // A mislabeled segment's labels are inverted BI <-> BO.
    FullFlip = 1,
};

std::string_view to_string(FlipAssumption assumption);
FlipAssumption flip_assumption_from_string(std::string_view text);

// Fully determines a corrupted label vector given the segment structure.
struct NoiseSpec {
    FlipAssumption assumption = FlipAssumption::OneFlip;
    double lambda = 0.7;  // Poisson mean, errors per user
    std::uint64_t seed = 0;
};

struct UserFlipReport {
    int user_id = 0;
    std::uint64_t drawn_errors = 0;  // NE
    std::vector<int> affected_segments;
    double flipped_fraction = 0.0;  // of this user's rows
    bool empty_segments_warning = false;
};

struct FlipReport {
    std::vector<UserFlipReport> users;
    double flipped_fraction = 0.0;  // of all rows
    std::string to_json() const;
};

std::uint64_t draw_poisson(double lambda, Rng& rng);

// Draws NE ~ Poisson(spec.lambda), samples min(NE, #segments) segments
// without replacement and rewrites their labels under the assumption.
// Pure: inputs untouched. Segments must tile the label vector.
std::pair<std::vector<Bibo>, UserFlipReport> flip_labels(std::span<const TripSegment> segments,
                                                         std::span<const Bibo> labels,
                                                         const NoiseSpec& spec, Rng& rng);

// One user's slice of the canonical label vector, with its segments
// expressed relative to the slice.
struct SegmentedLabels {
    int user_id = 0;
    std::size_t row_begin = 0;
    std::size_t row_count = 0;
    std::vector<TripSegment> segments;
};

// Per-user error simulation over the whole dataset; every user flips with an
// independent stream derived from spec.seed.
std::pair<std::vector<Bibo>, FlipReport> propagate_errors(
    std::span<const SegmentedLabels> users, std::span<const Bibo> labels, const NoiseSpec& spec);

// ---- Wizard-of-Oz person-to-device validation ----

// Response probabilities calibrated to the observed validation margins:
// 14 replies, 7 perturbed / 7 not, 8 modified / 6 confirmed, with 6 of the 7
// perturbed presentations modified and half of those corrections successful.
struct P2dParams {
    double lambda = 0.7;  // magnitude of count perturbations (zero-truncated)
    double p_modify_given_perturbed = 6.0 / 7.0;
    double p_correct_given_modify = 0.5;
    double p_modify_given_clean = 2.0 / 7.0;
};

enum class P2dResponse : std::uint8_t { Confirmed = 0, Modified = 1 };

struct P2dOutcome {
    std::int64_t presented_count = 0;
    std::int64_t reported_count = 0;
    P2dResponse response = P2dResponse::Confirmed;
};

P2dOutcome simulate_p2d_validation(std::int64_t true_count, bool perturb, Rng& rng,
                                   const P2dParams& params = {});

}  // namespace bibo
