#pragma once

#include <cstdint>
#include <optional>

#include "adskew/delivery.hpp"
#include "adskew/demographics.hpp"
#include "adskew/stats.hpp"

namespace adskew {

/// Base rate and skew recovered from the first ad's aggregate inferred
/// counts. Each inferred half satisfies a linear relation
///   skew_coef * R * S + base_coef * R = observed
/// whose coefficients depend only on |U| and the misclassification
/// matrix; the two relations are kept for residual checks.
struct SolvedParams {
    double rate_r = 0.0;
    double skew_s = 0.0;
    double skew_coef_a = 0.0; ///< coefficient of R*S in the inferred-A relation
    double base_coef_a = 0.0; ///< coefficient of R in the inferred-A relation
    double observed_a = 0.0;  ///< ad-1 recipients labeled A
    double skew_coef_b = 0.0;
    double base_coef_b = 0.0;
    double observed_b = 0.0;

    /// Relative residual of each relation at the recovered (R, S).
    double residual_a() const noexcept;
    double residual_b() const noexcept;
};

/// Solves the two-equation system for (R, S) in closed form. Throws
/// Error(SingularSystem) when the system degenerates (which happens as
/// FDR_{*,a} + FDR_{a,b} approaches 1) and Error(InconsistentInputs),
/// with the raw values in the message, when the recovered parameters
/// fall outside R in (0,1] or S in (0,2).
SolvedParams solve_rs(double n1_a_inferred, double n1_b_inferred, std::int64_t size_u,
                      const FdrMatrix& fdr);

/// Misclassification rates among the recipients of one ad.
struct AdErrorRates {
    double b_given_a = 0.0;
    double o_given_a = 0.0;
    double a_given_b = 0.0;
    double o_given_b = 0.0;

    double star_a() const noexcept { return b_given_a + o_given_a; }
    double star_b() const noexcept { return a_given_b + o_given_b; }
};

/// Targeted-audience error propagated into each ad's delivery audience.
struct PropagatedFdr {
    AdErrorRates ad1;
    AdErrorRates ad2;
};

/// Propagates the targeted-audience misclassification into delivery-
/// audience rates using the recovered (R, S): mislabeled subgroups reach
/// each ad at their true group's rate, normalized by the ad's observed
/// count for that inferred label. The second ad is unskewed, so its
/// rates reduce to the targeted-audience fractions.
/// Throws Error(UndefinedRate) if an inferred delivery count is zero.
PropagatedFdr propagate_fdr(const AudienceComposition& comp, const SolvedParams& solved,
                            const DeliveryCounts& inferred);

/// Reassigns each ad's inferred counts to estimated true-group counts
/// using the propagated rates. Throws Error(InvalidCorrection) if any
/// corrected count is negative (inconsistent rates vs. counts).
DeliveryCounts correct_counts(const DeliveryCounts& inferred, const PropagatedFdr& propagated);

/// Ground-truth version of the correction, available in simulation only:
/// regroups expected deliveries by true label across both inferred
/// halves, excluding true Others from the totals.
DeliveryCounts omniscient_correct(const AudienceComposition& comp, const DeliveryParams& params);

/// Full inference-aware audit: recover (R, S) from the inferred counts,
/// propagate the error rates, correct the counts, and re-test. Errors
/// from the chained operations are re-thrown tagged with the stage name.
AuditResult inference_aware_audit(std::int64_t size_u, const FdrMatrix& fdr,
                                  const DeliveryCounts& inferred, double alpha,
                                  Alternative alternative = Alternative::Greater);

/// Everything the audit produced, bundled for the JSON report: solver
/// output, propagated rates, corrected counts, and the verdicts with and
/// without correction (plus the omniscient verdict when ground truth is
/// available).
struct AuditReport {
    SolvedParams solved;
    PropagatedFdr propagated;
    DeliveryCounts corrected;
    AuditResult uncorrected;    ///< test on the raw inferred counts
    AuditResult corrected_test; ///< test on the corrected counts
    std::optional<AuditResult> omniscient;
};

AuditReport build_audit_report(std::int64_t size_u, const FdrMatrix& fdr,
                               const DeliveryCounts& inferred, double alpha,
                               Alternative alternative = Alternative::Greater,
                               const DeliveryCounts* ground_truth = nullptr);

} // namespace adskew
