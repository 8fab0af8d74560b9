#include "adskew/demographics.hpp"

#include <array>
#include <cmath>
#include <string>

#include "adskew/error.hpp"

namespace adskew {

namespace {

constexpr double kProbSumTolerance = 1e-6;

int index_of(Group g) noexcept { return static_cast<int>(g); }

bool in_unit_interval(double x) noexcept { return x >= 0.0 && x <= 1.0; }

} // namespace

const char* to_string(Group g) noexcept {
    switch (g) {
    case Group::A: return "A";
    case Group::B: return "B";
    case Group::Other: return "O";
    }
    return "?";
}

void LabeledRecord::validate() const {
    if (!in_unit_interval(prob_a) || !in_unit_interval(prob_b) || !in_unit_interval(prob_o)) {
        raise(ErrorCode::InvalidRecord, "inference probabilities must lie in [0,1]");
    }
    const double sum = prob_a + prob_b + prob_o;
    if (std::fabs(sum - 1.0) > kProbSumTolerance) {
        raise(ErrorCode::InvalidRecord,
              "inference probabilities sum to " + std::to_string(sum) + ", expected 1");
    }
}

void FdrMatrix::validate() const {
    for (double rate : {b_given_a, o_given_a, a_given_b, o_given_b, a_given_o, b_given_o}) {
        if (!in_unit_interval(rate)) {
            raise(ErrorCode::InvalidArgument, "FDR components must lie in [0,1]");
        }
    }
    for (double aggregate : {star_a(), star_b(), star_o()}) {
        if (!in_unit_interval(aggregate)) {
            raise(ErrorCode::InvalidArgument, "aggregate FDR exceeds 1");
        }
    }
}

std::optional<Group> assign_inferred_label(const LabeledRecord& record, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        raise(ErrorCode::InvalidArgument,
              "threshold must be in (0,1], got " + std::to_string(threshold));
    }
    record.validate();

    // argmax with fixed tie order A > B > Other
    Group best = Group::A;
    double best_prob = record.prob_a;
    if (record.prob_b > best_prob) {
        best = Group::B;
        best_prob = record.prob_b;
    }
    if (record.prob_o > best_prob) {
        best = Group::Other;
        best_prob = record.prob_o;
    }
    if (best_prob >= threshold) {
        return best;
    }
    return std::nullopt;
}

FdrEstimate estimate_fdr(std::span<const LabeledRecord> records, double threshold) {
    // counts[assigned][true]
    std::array<std::array<std::size_t, 3>, 3> counts{};
    std::size_t excluded = 0;
    for (const LabeledRecord& record : records) {
        const auto label = assign_inferred_label(record, threshold);
        if (!label) {
            ++excluded;
            continue;
        }
        ++counts[index_of(*label)][index_of(record.true_group)];
    }

    const auto assigned_total = [&counts](Group label) {
        const auto& row = counts[index_of(label)];
        return row[0] + row[1] + row[2];
    };
    const std::size_t assigned_a = assigned_total(Group::A);
    const std::size_t assigned_b = assigned_total(Group::B);
    const std::size_t assigned_other = assigned_total(Group::Other);

    if (assigned_a == 0) {
        raise(ErrorCode::EmptyInferredGroup,
              "no records assigned to inferred-A at threshold " + std::to_string(threshold));
    }
    if (assigned_b == 0) {
        raise(ErrorCode::EmptyInferredGroup,
              "no records assigned to inferred-B at threshold " + std::to_string(threshold));
    }

    const auto rate = [&counts](Group true_group, Group label, std::size_t denom) {
        return static_cast<double>(counts[index_of(label)][index_of(true_group)]) /
               static_cast<double>(denom);
    };

    FdrEstimate out;
    out.matrix.b_given_a = rate(Group::B, Group::A, assigned_a);
    out.matrix.o_given_a = rate(Group::Other, Group::A, assigned_a);
    out.matrix.a_given_b = rate(Group::A, Group::B, assigned_b);
    out.matrix.o_given_b = rate(Group::Other, Group::B, assigned_b);
    if (assigned_other > 0) {
        out.matrix.a_given_o = rate(Group::A, Group::Other, assigned_other);
        out.matrix.b_given_o = rate(Group::B, Group::Other, assigned_other);
    }
    out.assigned_a = assigned_a;
    out.assigned_b = assigned_b;
    out.assigned_other = assigned_other;
    out.excluded = excluded;
    return out;
}

AudienceComposition compose_audience(std::int64_t size_u, const FdrMatrix& fdr) {
    if (size_u <= 0 || size_u % 2 != 0) {
        raise(ErrorCode::InvalidArgument,
              "audience size must be positive and even, got " + std::to_string(size_u));
    }
    fdr.validate();

    const double half = static_cast<double>(size_u) / 2.0;
    AudienceComposition comp;
    comp.size_u = static_cast<double>(size_u);
    comp.a_in_inferred_a = half * (1.0 - fdr.star_a());
    comp.b_in_inferred_a = half * fdr.b_given_a;
    comp.o_in_inferred_a = half * fdr.o_given_a;
    comp.a_in_inferred_b = half * fdr.a_given_b;
    comp.b_in_inferred_b = half * (1.0 - fdr.star_b());
    comp.o_in_inferred_b = half * fdr.o_given_b;
    return comp;
}

} // namespace adskew
