#include "adskew/synthetic.hpp"

#include <cmath>
#include <random>
#include <string>

#include "adskew/error.hpp"

namespace adskew {

namespace {

double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct LabelPlan {
    Group label;
    double wrong_first;  // planted rate of the first wrong group
    double wrong_second; // planted rate of the second wrong group
    Group first;
    Group second;
};

void set_probability(LabeledRecord& record, Group g, double p) {
    switch (g) {
    case Group::A: record.prob_a = p; break;
    case Group::B: record.prob_b = p; break;
    case Group::Other: record.prob_o = p; break;
    }
}

} // namespace

void PlantedConfusion::validate() const {
    for (double rate : {b_given_a, o_given_a, a_given_b, o_given_b, a_given_o, b_given_o}) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            raise(ErrorCode::InvalidArgument, "planted rates must lie in [0,1]");
        }
    }
    if (b_given_a + o_given_a > 1.0 || a_given_b + o_given_b > 1.0 || a_given_o + b_given_o > 1.0) {
        raise(ErrorCode::InvalidArgument, "planted rates for one label must sum to at most 1");
    }
    if (!(frac_inferred_a >= 0.0 && frac_inferred_b >= 0.0 &&
          frac_inferred_a + frac_inferred_b <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "label fractions must be non-negative and sum to at most 1");
    }
    if (!(below_threshold_frac >= 0.0 && below_threshold_frac < 1.0)) {
        raise(ErrorCode::InvalidArgument, "below-threshold fraction must lie in [0,1)");
    }
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        raise(ErrorCode::InvalidArgument, "threshold must be in (0,1]");
    }
    if (below_threshold_frac > 0.0 && threshold <= 0.36) {
        raise(ErrorCode::InvalidArgument,
              "below-threshold records need threshold > 0.36 (a dominant probability "
              "cannot stay under the threshold otherwise)");
    }
}

std::vector<LabeledRecord> generate_synthetic(std::size_t count, const PlantedConfusion& spec,
                                              std::uint64_t seed) {
    spec.validate();

    const LabelPlan plans[] = {
        {Group::A, spec.b_given_a, spec.o_given_a, Group::B, Group::Other},
        {Group::B, spec.a_given_b, spec.o_given_b, Group::A, Group::Other},
        {Group::Other, spec.a_given_o, spec.b_given_o, Group::A, Group::B},
    };

    // Confidence lives in [low, 1); records below low + (1-low)*total are
    // misclassified, so raising the evaluation threshold strips wrong
    // records first and the empirical rates can only fall.
    const double low = std::max(spec.threshold, 0.5001);

    std::mt19937_64 rng(seed);
    std::vector<LabeledRecord> records;
    records.reserve(count);

    for (std::size_t i = 0; i < count; ++i) {
        LabeledRecord record;

        if (unit_draw(rng) < spec.below_threshold_frac) {
            // a record no threshold >= spec.threshold will ever assign
            const double top = 0.35 + unit_draw(rng) * (spec.threshold - 0.36);
            const Group position = plans[static_cast<int>(unit_draw(rng) * 3.0) % 3].label;
            record.true_group = plans[static_cast<int>(unit_draw(rng) * 3.0) % 3].label;
            const double split = (0.45 + 0.1 * unit_draw(rng)) * (1.0 - top);
            int filled = 0;
            for (const LabelPlan& plan : plans) {
                if (plan.label == position) {
                    set_probability(record, plan.label, top);
                } else {
                    set_probability(record, plan.label,
                                    filled++ == 0 ? split : 1.0 - top - split);
                }
            }
            records.push_back(record);
            continue;
        }

        const double pick = unit_draw(rng);
        const LabelPlan& plan = pick < spec.frac_inferred_a ? plans[0]
                                : pick < spec.frac_inferred_a + spec.frac_inferred_b ? plans[1]
                                                                                      : plans[2];
        const double total_wrong = plan.wrong_first + plan.wrong_second;
        const double confidence = low + (1.0 - low) * unit_draw(rng);
        const double cutoff = low + (1.0 - low) * total_wrong;

        record.true_group = plan.label;
        if (confidence < cutoff && total_wrong > 0.0) {
            record.true_group =
                unit_draw(rng) * total_wrong < plan.wrong_first ? plan.first : plan.second;
        }

        const double split = (0.25 + 0.5 * unit_draw(rng)) * (1.0 - confidence);
        int filled = 0;
        for (const LabelPlan& other : plans) {
            if (other.label == plan.label) {
                set_probability(record, other.label, confidence);
            } else {
                set_probability(record, other.label,
                                filled++ == 0 ? split : 1.0 - confidence - split);
            }
        }
        records.push_back(record);
    }
    return records;
}

} // namespace adskew
