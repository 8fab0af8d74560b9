#include "adskew/delivery.hpp"

#include <cmath>
#include <random>
#include <string>

#include "adskew/error.hpp"

namespace adskew {

namespace {

// uniform in [0,1), bit-stable across platforms
double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void check_composition(const AudienceComposition& comp) {
    for (double cell : {comp.a_in_inferred_a, comp.b_in_inferred_a, comp.o_in_inferred_a,
                        comp.a_in_inferred_b, comp.b_in_inferred_b, comp.o_in_inferred_b}) {
        if (!(cell >= 0.0) || !std::isfinite(cell)) {
            raise(ErrorCode::InvalidArgument, "audience composition counts must be non-negative");
        }
    }
    if (comp.size_u <= 0.0) {
        raise(ErrorCode::InvalidArgument, "audience composition has non-positive size");
    }
}

} // namespace

const char* to_string(Basis basis) noexcept {
    switch (basis) {
    case Basis::True: return "true";
    case Basis::Inferred: return "inferred";
    case Basis::Corrected: return "corrected";
    }
    return "?";
}

const char* to_string(OthersTreatment treatment) noexcept {
    return treatment == OthersTreatment::Advantaged ? "advantaged" : "disadvantaged";
}

void DeliveryParams::validate() const {
    // rate_r = 0 is allowed (nothing gets delivered); skew bounds are strict
    if (!(rate_r >= 0.0 && rate_r <= 1.0)) {
        raise(ErrorCode::InvalidArgument,
              "delivery rate must be in [0,1], got " + std::to_string(rate_r));
    }
    if (!(skew_s > 0.0 && skew_s < 2.0)) {
        raise(ErrorCode::InvalidArgument,
              "skew parameter must be in (0,2), got " + std::to_string(skew_s));
    }
    if (rate_r * skew_s > 1.0 || rate_r * (2.0 - skew_s) > 1.0) {
        raise(ErrorCode::InvalidArgument, "rate*skew exceeds 1; delivery probability invalid");
    }
}

double DeliveryParams::ad1_rate(Group g) const noexcept {
    switch (g) {
    case Group::A: return rate_r * skew_s;
    case Group::B: return rate_r * (2.0 - skew_s);
    case Group::Other:
        return others == OthersTreatment::Advantaged ? rate_r * (2.0 - skew_s) : rate_r * skew_s;
    }
    return rate_r;
}

DeliveryCounts simulate_true_targeted(std::int64_t size_u, const DeliveryParams& params) {
    if (size_u <= 0 || size_u % 2 != 0) {
        raise(ErrorCode::InvalidArgument,
              "audience size must be positive and even, got " + std::to_string(size_u));
    }
    params.validate();

    const double half = static_cast<double>(size_u) / 2.0;
    DeliveryCounts counts;
    counts.basis = Basis::True;
    counts.n1_a = half * params.ad1_rate(Group::A);
    counts.n1_b = half * params.ad1_rate(Group::B);
    counts.n2_a = half * params.ad2_rate();
    counts.n2_b = half * params.ad2_rate();
    return counts;
}

InferredDelivery simulate_inferred_targeted(const AudienceComposition& comp,
                                            const DeliveryParams& params) {
    check_composition(comp);
    params.validate();

    const double rate1_a = params.ad1_rate(Group::A);
    const double rate1_b = params.ad1_rate(Group::B);
    const double rate1_o = params.ad1_rate(Group::Other);
    const double rate2 = params.ad2_rate();

    InferredDelivery out;
    out.inferred.basis = Basis::Inferred;
    out.inferred.n1_a =
        comp.a_in_inferred_a * rate1_a + comp.b_in_inferred_a * rate1_b + comp.o_in_inferred_a * rate1_o;
    out.inferred.n1_b =
        comp.a_in_inferred_b * rate1_a + comp.b_in_inferred_b * rate1_b + comp.o_in_inferred_b * rate1_o;
    out.inferred.n2_a =
        comp.a_in_inferred_a * rate2 + comp.b_in_inferred_a * rate2 + comp.o_in_inferred_a * rate2;
    out.inferred.n2_b =
        comp.a_in_inferred_b * rate2 + comp.b_in_inferred_b * rate2 + comp.o_in_inferred_b * rate2;

    out.omniscient.basis = Basis::Corrected;
    out.omniscient.n1_a = (comp.a_in_inferred_a + comp.a_in_inferred_b) * rate1_a;
    out.omniscient.n1_b = (comp.b_in_inferred_a + comp.b_in_inferred_b) * rate1_b;
    out.omniscient.n1_o = (comp.o_in_inferred_a + comp.o_in_inferred_b) * rate1_o;
    out.omniscient.n2_a = (comp.a_in_inferred_a + comp.a_in_inferred_b) * rate2;
    out.omniscient.n2_b = (comp.b_in_inferred_a + comp.b_in_inferred_b) * rate2;
    out.omniscient.n2_o = (comp.o_in_inferred_a + comp.o_in_inferred_b) * rate2;
    return out;
}

InferredDelivery simulate_stochastic(const AudienceComposition& comp,
                                     const DeliveryParams& params, std::uint64_t seed) {
    check_composition(comp);
    params.validate();

    std::mt19937_64 rng(seed);
    const double rate2 = params.ad2_rate();

    InferredDelivery out;
    out.inferred.basis = Basis::Inferred;
    out.omniscient.basis = Basis::Corrected;

    struct Cell {
        double expected;
        Group true_group;
        bool inferred_a_half;
    };
    const Cell cells[] = {
        {comp.a_in_inferred_a, Group::A, true},     {comp.b_in_inferred_a, Group::B, true},
        {comp.o_in_inferred_a, Group::Other, true}, {comp.a_in_inferred_b, Group::A, false},
        {comp.b_in_inferred_b, Group::B, false},    {comp.o_in_inferred_b, Group::Other, false},
    };

    for (const Cell& cell : cells) {
        const auto members = static_cast<std::int64_t>(std::llround(cell.expected));
        const double rate1 = params.ad1_rate(cell.true_group);
        std::int64_t saw1 = 0;
        std::int64_t saw2 = 0;
        for (std::int64_t i = 0; i < members; ++i) {
            if (unit_draw(rng) < rate1) {
                ++saw1;
            }
            if (unit_draw(rng) < rate2) {
                ++saw2;
            }
        }

        double& inferred1 = cell.inferred_a_half ? out.inferred.n1_a : out.inferred.n1_b;
        double& inferred2 = cell.inferred_a_half ? out.inferred.n2_a : out.inferred.n2_b;
        inferred1 += static_cast<double>(saw1);
        inferred2 += static_cast<double>(saw2);

        switch (cell.true_group) {
        case Group::A:
            out.omniscient.n1_a += static_cast<double>(saw1);
            out.omniscient.n2_a += static_cast<double>(saw2);
            break;
        case Group::B:
            out.omniscient.n1_b += static_cast<double>(saw1);
            out.omniscient.n2_b += static_cast<double>(saw2);
            break;
        case Group::Other:
            out.omniscient.n1_o += static_cast<double>(saw1);
            out.omniscient.n2_o += static_cast<double>(saw2);
            break;
        }
    }
    return out;
}

} // namespace adskew
