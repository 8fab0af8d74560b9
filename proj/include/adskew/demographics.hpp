#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace adskew {

/// The two audited demographic groups plus the residual category.
/// GroupA is the disadvantaged group, GroupB the advantaged one.
enum class Group { A, B, Other };

const char* to_string(Group g) noexcept;

/// One individual from a ground-truth sample: their true group and the
/// classifier's probability mass over the three categories.
struct LabeledRecord {
    Group true_group = Group::Other;
    double prob_a = 0.0;
    double prob_b = 0.0;
    double prob_o = 0.0;

    /// Throws Error(InvalidRecord) unless each probability is in [0,1]
    /// and they sum to 1 within 1e-6.
    void validate() const;
};

/// Misclassification rates of the attribute classifier measured on the
/// targeted audience. fdr(x,y) is the fraction of people labeled y whose
/// true group is x. Aggregates are sums of the two off-label components.
struct FdrMatrix {
    double b_given_a = 0.0;
    double o_given_a = 0.0;
    double a_given_b = 0.0;
    double o_given_b = 0.0;
    double a_given_o = 0.0; // kept for completeness, unused downstream
    double b_given_o = 0.0;

    double star_a() const noexcept { return b_given_a + o_given_a; }
    double star_b() const noexcept { return a_given_b + o_given_b; }
    double star_o() const noexcept { return a_given_o + b_given_o; }

    /// Throws Error(InvalidArgument) unless every component and aggregate
    /// lies in [0,1].
    void validate() const;
};

/// Expected true-group composition of an audience built by labeling
/// individuals with the classifier: half inferred-A, half inferred-B,
/// each half broken down by true group. Counts are real-valued
/// expectations; rounding is a display concern.
struct AudienceComposition {
    double size_u = 0.0;
    double a_in_inferred_a = 0.0;
    double b_in_inferred_a = 0.0;
    double o_in_inferred_a = 0.0;
    double a_in_inferred_b = 0.0;
    double b_in_inferred_b = 0.0;
    double o_in_inferred_b = 0.0;

    double half_size() const noexcept { return size_u / 2.0; }
    double inferred_a_total() const noexcept {
        return a_in_inferred_a + b_in_inferred_a + o_in_inferred_a;
    }
    double inferred_b_total() const noexcept {
        return a_in_inferred_b + b_in_inferred_b + o_in_inferred_b;
    }
};

/// Thresholded label assignment: returns the group with the largest
/// probability when that probability reaches `threshold` (inclusive),
/// otherwise nullopt and the record is excluded from audience
/// construction. Ties resolve A > B > Other.
std::optional<Group> assign_inferred_label(const LabeledRecord& record, double threshold);

struct FdrEstimate {
    FdrMatrix matrix;
    std::size_t assigned_a = 0;
    std::size_t assigned_b = 0;
    std::size_t assigned_other = 0;
    std::size_t excluded = 0;
};

/// Estimates the misclassification matrix by thresholded assignment over
/// a labeled sample. Requires at least one record assigned to each of
/// inferred-A and inferred-B; throws Error(EmptyInferredGroup) otherwise.
/// When nothing is assigned to inferred-Other its two rates are reported
/// as zero (they are never consumed downstream).
FdrEstimate estimate_fdr(std::span<const LabeledRecord> records, double threshold);

/// Expected true-group breakdown of an audience of `size_u` (even,
/// positive) targeted half inferred-A / half inferred-B under `fdr`.
AudienceComposition compose_audience(std::int64_t size_u, const FdrMatrix& fdr);

} // namespace adskew
