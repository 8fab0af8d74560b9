#include "adskew/correction.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <utility>

#include "adskew/error.hpp"

namespace adskew {

namespace {

double relative_residual(double skew_coef, double base_coef, double observed, double rate,
                         double skew) {
    const double lhs = skew_coef * rate * skew + base_coef * rate;
    return std::fabs(lhs - observed) / std::max(std::fabs(observed), 1.0);
}

constexpr double kResidualTolerance = 1e-9;

// re-throws with the stage name attached so callers of the chained audit
// can tell which step failed
template <typename Fn>
auto at_stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), e.what(), name);
    }
}

} // namespace

double SolvedParams::residual_a() const noexcept {
    return relative_residual(skew_coef_a, base_coef_a, observed_a, rate_r, skew_s);
}

double SolvedParams::residual_b() const noexcept {
    return relative_residual(skew_coef_b, base_coef_b, observed_b, rate_r, skew_s);
}

SolvedParams solve_rs(double n1_a_inferred, double n1_b_inferred, std::int64_t size_u,
                      const FdrMatrix& fdr) {
    if (size_u <= 0) {
        raise(ErrorCode::InvalidArgument, "audience size must be positive");
    }
    fdr.validate();
    if (!(n1_a_inferred > 0.0) || !(n1_b_inferred > 0.0)) {
        raise(ErrorCode::InvalidArgument, "ad-1 inferred counts must be positive");
    }

    const double u = static_cast<double>(size_u);
    const double half = u / 2.0;

    SolvedParams solved;
    solved.skew_coef_a = half - u * fdr.star_a();
    solved.base_coef_a = u * fdr.star_a();
    solved.observed_a = n1_a_inferred;
    solved.skew_coef_b = u * fdr.a_given_b - half;
    solved.base_coef_b = u - u * fdr.a_given_b;
    solved.observed_b = n1_b_inferred;

    // both denominators vanish together as FDR_{*,a} + FDR_{a,b} -> 1
    const double rate_denominator =
        solved.base_coef_a * solved.skew_coef_b - solved.skew_coef_a * solved.base_coef_b;
    const double skew_denominator =
        solved.skew_coef_a * solved.observed_b - solved.observed_a * solved.skew_coef_b;
    const double singular_scale = 1e-12 * u * u;
    if (std::fabs(rate_denominator) < singular_scale ||
        std::fabs(skew_denominator) < singular_scale) {
        std::ostringstream msg;
        msg << "singular system: FDR_*a + FDR_ab = " << fdr.star_a() + fdr.a_given_b
            << " is too close to 1";
        throw Error(ErrorCode::SingularSystem, msg.str());
    }

    solved.rate_r = (solved.observed_a * solved.skew_coef_b - solved.skew_coef_a * solved.observed_b) /
                    rate_denominator;
    solved.skew_s = (solved.observed_a * solved.base_coef_b - solved.base_coef_a * solved.observed_b) /
                    skew_denominator;

    if (!(solved.rate_r > 0.0 && solved.rate_r <= 1.0) ||
        !(solved.skew_s > 0.0 && solved.skew_s < 2.0)) {
        std::ostringstream msg;
        msg << "recovered parameters outside valid ranges: R = " << solved.rate_r
            << " (want (0,1]), S = " << solved.skew_s << " (want (0,2))";
        throw Error(ErrorCode::InconsistentInputs, msg.str());
    }
    if (solved.residual_a() > kResidualTolerance || solved.residual_b() > kResidualTolerance) {
        std::ostringstream msg;
        msg << "solution fails the residual check: " << solved.residual_a() << ", "
            << solved.residual_b();
        throw Error(ErrorCode::InconsistentInputs, msg.str());
    }
    return solved;
}

PropagatedFdr propagate_fdr(const AudienceComposition& comp, const SolvedParams& solved,
                            const DeliveryCounts& inferred) {
    for (double count : {inferred.n1_a, inferred.n1_b, inferred.n2_a, inferred.n2_b}) {
        if (!(count > 0.0)) {
            raise(ErrorCode::UndefinedRate,
                  "delivery-audience error rates need positive per-label counts");
        }
    }

    const double rate = solved.rate_r;
    const double skewed = rate * solved.skew_s;        // group-A rate for ad 1
    const double counter = rate * (2.0 - solved.skew_s); // group-B/Other rate for ad 1

    PropagatedFdr out;
    out.ad1.b_given_a = comp.b_in_inferred_a * counter / inferred.n1_a;
    out.ad1.o_given_a = comp.o_in_inferred_a * counter / inferred.n1_a;
    out.ad1.a_given_b = comp.a_in_inferred_b * skewed / inferred.n1_b;
    out.ad1.o_given_b = comp.o_in_inferred_b * counter / inferred.n1_b;
    // the second ad is unskewed, so these reduce to the targeted-audience
    // composition fractions
    out.ad2.b_given_a = comp.b_in_inferred_a * rate / inferred.n2_a;
    out.ad2.o_given_a = comp.o_in_inferred_a * rate / inferred.n2_a;
    out.ad2.a_given_b = comp.a_in_inferred_b * rate / inferred.n2_b;
    out.ad2.o_given_b = comp.o_in_inferred_b * rate / inferred.n2_b;
    return out;
}

DeliveryCounts correct_counts(const DeliveryCounts& inferred, const PropagatedFdr& propagated) {
    DeliveryCounts corrected;
    corrected.basis = Basis::Corrected;
    corrected.n1_a = inferred.n1_a * (1.0 - propagated.ad1.star_a()) +
                     inferred.n1_b * propagated.ad1.a_given_b;
    corrected.n1_b = inferred.n1_a * propagated.ad1.b_given_a +
                     inferred.n1_b * (1.0 - propagated.ad1.star_b());
    corrected.n2_a = inferred.n2_a * (1.0 - propagated.ad2.star_a()) +
                     inferred.n2_b * propagated.ad2.a_given_b;
    corrected.n2_b = inferred.n2_a * propagated.ad2.b_given_a +
                     inferred.n2_b * (1.0 - propagated.ad2.star_b());

    for (double count : {corrected.n1_a, corrected.n1_b, corrected.n2_a, corrected.n2_b}) {
        if (count < 0.0) {
            raise(ErrorCode::InvalidCorrection,
                  "correction produced a negative count; error rates are inconsistent "
                  "with the observed delivery");
        }
    }
    return corrected;
}

DeliveryCounts omniscient_correct(const AudienceComposition& comp, const DeliveryParams& params) {
    return simulate_inferred_targeted(comp, params).omniscient;
}

AuditReport build_audit_report(std::int64_t size_u, const FdrMatrix& fdr,
                               const DeliveryCounts& inferred, double alpha,
                               Alternative alternative, const DeliveryCounts* ground_truth) {
    AuditReport report;
    const AudienceComposition comp =
        at_stage("compose_audience", [&] { return compose_audience(size_u, fdr); });
    report.uncorrected = at_stage("ztest", [&] {
        return ztest(inferred.n1_a, inferred.n1_b, inferred.n2_a, inferred.n2_b, alpha, alternative);
    });
    report.solved = at_stage("solve_rs", [&] {
        return solve_rs(inferred.n1_a, inferred.n1_b, size_u, fdr);
    });
    report.propagated =
        at_stage("propagate_fdr", [&] { return propagate_fdr(comp, report.solved, inferred); });
    report.corrected =
        at_stage("correct_counts", [&] { return correct_counts(inferred, report.propagated); });
    report.corrected_test = at_stage("ztest", [&] {
        return ztest(report.corrected.n1_a, report.corrected.n1_b, report.corrected.n2_a,
                     report.corrected.n2_b, alpha, alternative);
    });
    if (ground_truth != nullptr) {
        report.omniscient = at_stage("ztest", [&] {
            return ztest(ground_truth->n1_a, ground_truth->n1_b, ground_truth->n2_a,
                         ground_truth->n2_b, alpha, alternative);
        });
    }
    return report;
}

AuditResult inference_aware_audit(std::int64_t size_u, const FdrMatrix& fdr,
                                  const DeliveryCounts& inferred, double alpha,
                                  Alternative alternative) {
    return build_audit_report(size_u, fdr, inferred, alpha, alternative).corrected_test;
}

} // namespace adskew
