#include "adskew/stats.hpp"

#include <cmath>
#include <string>

#include "adskew/error.hpp"

namespace adskew {

namespace {

// Acklam's rational approximation to the standard normal quantile
// (lower-tail), relative error below 1.2e-9 on (0,1).
double norm_quantile_lower(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // callers only reach this branch with p <= 0.5
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double upper_tail(double z) { return 0.5 * std::erfc(z * kInvSqrt2); }

} // namespace

const char* to_string(Alternative alt) noexcept {
    return alt == Alternative::Greater ? "greater" : "less";
}

double critical_value(double alpha) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        raise(ErrorCode::InvalidArgument,
              "significance level must be in (0, 0.5], got " + std::to_string(alpha));
    }
    double z = -norm_quantile_lower(alpha);
    // two Newton steps against the erfc-based tail polish the estimate
    // to full double precision
    for (int i = 0; i < 2; ++i) {
        const double density = kInvSqrt2Pi * std::exp(-0.5 * z * z);
        if (density <= 0.0) {
            break;
        }
        z += (upper_tail(z) - alpha) / density;
    }
    return z;
}

AuditResult ztest(double n1_a, double n1_b, double n2_a, double n2_b, double alpha,
                  Alternative alternative) {
    for (double count : {n1_a, n1_b, n2_a, n2_b}) {
        if (!(count >= 0.0) || !std::isfinite(count)) {
            raise(ErrorCode::InvalidArgument, "recipient counts must be finite and non-negative");
        }
    }

    const double n1 = n1_a + n1_b;
    const double n2 = n2_a + n2_b;
    if (n1 <= 0.0 || n2 <= 0.0) {
        raise(ErrorCode::UndefinedProportion,
              "an ad with no A/B recipients has no group-A proportion");
    }

    AuditResult result;
    result.alpha = alpha;
    result.alternative = alternative;
    result.z_critical = critical_value(alpha);
    result.s1_a = n1_a / n1;
    result.s2_a = n2_a / n2;
    result.skew_d = result.s2_a - result.s1_a;
    result.pooled_share = (n1_a + n2_a) / (n1 + n2);
    result.std_error =
        std::sqrt(result.pooled_share * (1.0 - result.pooled_share) * (1.0 / n1 + 1.0 / n2));

    if (result.std_error == 0.0) {
        if (result.skew_d != 0.0) {
            raise(ErrorCode::DegenerateTest, "zero standard error with nonzero skew");
        }
        result.z_stat = 0.0;
    } else {
        result.z_stat = result.skew_d / result.std_error;
    }

    const double directed = alternative == Alternative::Greater ? result.z_stat : -result.z_stat;
    result.significant = directed > result.z_critical;
    return result;
}

} // namespace adskew
