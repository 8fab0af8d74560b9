#pragma once

#include <cstdint>
#include <vector>

#include "adskew/demographics.hpp"

namespace adskew {

/// Recipe for a synthetic labeled population with known confusion. The
/// planted rates hold (in expectation) for assignments at `threshold`;
/// raising the evaluation threshold above it can only lower them,
/// because misclassification is confined to the low-confidence end of
/// each label's records.
struct PlantedConfusion {
    double b_given_a = 0.0;
    double o_given_a = 0.0;
    double a_given_b = 0.0;
    double o_given_b = 0.0;
    double a_given_o = 0.0;
    double b_given_o = 0.0;

    double frac_inferred_a = 0.5; ///< share of records labeled A
    double frac_inferred_b = 0.5; ///< share labeled B; remainder labeled Other
    double below_threshold_frac = 0.0; ///< share with max probability under the threshold
    double threshold = 0.5;

    void validate() const;
};

/// Deterministic (per seed) population generator.
std::vector<LabeledRecord> generate_synthetic(std::size_t count, const PlantedConfusion& spec,
                                              std::uint64_t seed);

} // namespace adskew
