#pragma once

#include <cstdint>

#include "adskew/demographics.hpp"

namespace adskew {

/// Which delivery rate misidentified "Other" individuals receive for the
/// skewed ad: the advantaged group's rate or the disadvantaged group's.
enum class OthersTreatment { Advantaged, Disadvantaged };

/// Delivery model parameters: every targeted individual sees an ad with
/// base probability rate_r; the first ad's rate is multiplied by skew_s
/// for group A and by (2 - skew_s) for group B, the second ad is
/// unskewed. skew_s = 1 means no algorithmic skew.
struct DeliveryParams {
    double rate_r = 0.0;
    double skew_s = 1.0;
    OthersTreatment others = OthersTreatment::Advantaged;

    void validate() const;

    /// Per-individual probability of seeing ad 1 given their true group.
    double ad1_rate(Group g) const noexcept;
    /// Everyone sees ad 2 at the base rate.
    double ad2_rate() const noexcept { return rate_r; }
};

/// Label basis under which delivery counts are grouped.
enum class Basis { True, Inferred, Corrected };

const char* to_string(Basis basis) noexcept;
const char* to_string(OthersTreatment treatment) noexcept;

/// Expected (or sampled) recipients of each ad by group. Totals count
/// only the A and B columns; the o fields are zero except under the
/// Corrected basis, where they carry the delivered true-Others excluded
/// from the totals.
struct DeliveryCounts {
    Basis basis = Basis::True;
    double n1_a = 0.0;
    double n1_b = 0.0;
    double n1_o = 0.0;
    double n2_a = 0.0;
    double n2_b = 0.0;
    double n2_o = 0.0;

    double n1() const noexcept { return n1_a + n1_b; }
    double n2() const noexcept { return n2_a + n2_b; }
};

/// Expected delivery for an audience targeted by true attributes
/// (half group A, half group B, no Others).
DeliveryCounts simulate_true_targeted(std::int64_t size_u, const DeliveryParams& params);

struct InferredDelivery {
    /// What the platform reports: recipients grouped by inferred label,
    /// mislabeled individuals folded into their inferred half.
    DeliveryCounts inferred;
    /// The same deliveries regrouped by true label (true Others tracked
    /// in the o fields, excluded from totals). Available in simulation
    /// only; serves as ground truth for the correction.
    DeliveryCounts omniscient;
};

/// Expected delivery for an audience targeted by inferred attributes.
InferredDelivery simulate_inferred_targeted(const AudienceComposition& comp,
                                            const DeliveryParams& params);

/// Monte-Carlo delivery: every individual independently sees each ad with
/// their group's rate. Counts are integers; identical seeds give
/// identical counts (draws are hand-rolled over mt19937_64, so results
/// do not depend on the platform's distribution implementations).
InferredDelivery simulate_stochastic(const AudienceComposition& comp,
                                     const DeliveryParams& params, std::uint64_t seed);

} // namespace adskew
