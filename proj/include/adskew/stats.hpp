#pragma once

namespace adskew {

/// Direction of the one-sided alternative for the skew test.
/// Greater tests H1: D > 0 (under-delivery of ad 1 to group A),
/// Less tests H1: D < 0, needed for over-delivery scenarios.
enum class Alternative { Greater, Less };

const char* to_string(Alternative alt) noexcept;

/// Outcome of the two-proportion skew test between a pair of ads.
struct AuditResult {
    double s1_a = 0.0;         ///< fraction of ad-1 recipients in group A
    double s2_a = 0.0;         ///< fraction of ad-2 recipients in group A
    double skew_d = 0.0;       ///< s2_a - s1_a
    double pooled_share = 0.0; ///< group-A share of the pooled recipients
    double std_error = 0.0;
    double z_stat = 0.0;       ///< skew_d / std_error
    double alpha = 0.0;
    double z_critical = 0.0;
    Alternative alternative = Alternative::Greater;
    bool significant = false;
};

/// Two-proportion Z-test for the difference between the group-A
/// recipient shares of two ads. Counts may be real-valued expectations.
/// Throws Error(UndefinedProportion) when an ad reached nobody, and
/// Error(DegenerateTest) when the standard error is zero but the
/// proportions differ.
AuditResult ztest(double n1_a, double n1_b, double n2_a, double n2_b, double alpha,
                  Alternative alternative = Alternative::Greater);

/// Upper-tail standard normal quantile for alpha in (0, 0.5].
double critical_value(double alpha);

} // namespace adskew
