#include <cmath>
#include <random>

#include <doctest.h>

#include "adskew/correction.hpp"
#include "adskew/error.hpp"

using namespace adskew;

namespace {

const FdrMatrix kReferenceFdr{0.4727, 0.030, 0.144, 0.032};

struct RandomScenario {
    std::int64_t size_u;
    FdrMatrix fdr;
    DeliveryParams params;
};

// valid tuples kept away from the FDR_*a + FDR_ab = 1 singularity
RandomScenario draw_scenario(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RandomScenario scenario;
    while (true) {
        const double star_a = 0.01 + 0.94 * unit(rng);
        const double a_given_b = 0.01 + 0.94 * unit(rng);
        if (std::fabs(star_a + a_given_b - 1.0) < 0.02) {
            continue;
        }
        const double split = unit(rng);
        scenario.fdr.b_given_a = star_a * split;
        scenario.fdr.o_given_a = star_a * (1.0 - split);
        scenario.fdr.a_given_b = a_given_b;
        scenario.fdr.o_given_b = unit(rng) * (1.0 - a_given_b) * 0.5;
        break;
    }
    double s = 0.02 + 1.96 * unit(rng);
    if (std::fabs(s - 1.0) < 1e-3) {
        s = 0.5;
    }
    const double r = 0.005 + unit(rng) * (0.99 / std::max(s, 2.0 - s) - 0.005);
    scenario.params = DeliveryParams{r, s};
    scenario.size_u = 2 * (100 + static_cast<std::int64_t>(unit(rng) * 200000));
    return scenario;
}

} // namespace

TEST_SUITE("correction") {

TEST_CASE("solve_rs round-trips the simulator exactly") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 0.87});
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, kReferenceFdr);
    CHECK(solved.rate_r == doctest::Approx(0.065).epsilon(1e-12));
    CHECK(solved.skew_s == doctest::Approx(0.87).epsilon(1e-12));
    CHECK(solved.residual_a() < 1e-12);
    CHECK(solved.residual_b() < 1e-12);
}

TEST_CASE("solve_rs tolerates display-rounded counts") {
    const SolvedParams solved = solve_rs(976.0, 1065.0, 30000, kReferenceFdr);
    CHECK(std::fabs(solved.rate_r - 0.065) <= 0.001);
    CHECK(std::fabs(solved.skew_s - 0.87) <= 0.01);
}

TEST_CASE("solve_rs fixed point at no skew") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 1.0});
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, kReferenceFdr);
    CHECK(solved.skew_s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("solve_rs error paths") {
    SUBCASE("singular when the error rates cancel the system") {
        FdrMatrix singular;
        singular.b_given_a = 0.5;
        singular.o_given_a = 0.1; // star_a = 0.6
        singular.a_given_b = 0.4; // star_a + a_given_b = 1
        try {
            solve_rs(500.0, 500.0, 10000, singular);
            FAIL("expected singular-system error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SingularSystem);
        }
    }
    SUBCASE("physically impossible counts are surfaced, not clamped") {
        // far more ad-1 recipients than the audience size allows
        try {
            solve_rs(9000.0, 9500.0, 10000, kReferenceFdr);
            FAIL("expected inconsistent-inputs error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InconsistentInputs);
            CHECK(std::string(e.what()).find("R = ") != std::string::npos);
        }
    }
    SUBCASE("input validation") {
        CHECK_THROWS_AS(solve_rs(0.0, 100.0, 10000, kReferenceFdr), Error);
        CHECK_THROWS_AS(solve_rs(100.0, 100.0, 0, kReferenceFdr), Error);
    }
}

TEST_CASE("propagated rates match the worked example and its oracles") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 0.87});
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, kReferenceFdr);
    const PropagatedFdr prop = propagate_fdr(comp, solved, out.inferred);

    // mislabeled-B share of ad-1 recipients labeled A: 521/976 in the table
    CHECK(prop.ad1.b_given_a == doctest::Approx(0.5337762890450902).epsilon(1e-9));
    CHECK(std::fabs(prop.ad1.b_given_a - 0.534) < 0.001);
    // aggregates are exactly component sums
    CHECK(prop.ad1.star_a() == prop.ad1.b_given_a + prop.ad1.o_given_a);
    CHECK(prop.ad2.star_b() == prop.ad2.a_given_b + prop.ad2.o_given_b);
    // the unskewed second ad reduces to the targeted-audience fractions
    CHECK(prop.ad2.b_given_a == doctest::Approx(kReferenceFdr.b_given_a).epsilon(1e-12));
    CHECK(prop.ad2.a_given_b == doctest::Approx(kReferenceFdr.a_given_b).epsilon(1e-12));
}

TEST_CASE("propagated rates at S = 1 equal the composition fractions for both ads") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 1.0});
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, kReferenceFdr);
    const PropagatedFdr prop = propagate_fdr(comp, solved, out.inferred);
    for (const AdErrorRates& rates : {prop.ad1, prop.ad2}) {
        CHECK(rates.b_given_a == doctest::Approx(kReferenceFdr.b_given_a).epsilon(1e-12));
        CHECK(rates.o_given_a == doctest::Approx(kReferenceFdr.o_given_a).epsilon(1e-12));
        CHECK(rates.a_given_b == doctest::Approx(kReferenceFdr.a_given_b).epsilon(1e-12));
        CHECK(rates.o_given_b == doctest::Approx(kReferenceFdr.o_given_b).epsilon(1e-12));
    }
}

TEST_CASE("propagate_fdr rejects zero delivery counts") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    SolvedParams solved;
    solved.rate_r = 0.065;
    solved.skew_s = 0.87;
    DeliveryCounts empty;
    empty.basis = Basis::Inferred;
    try {
        propagate_fdr(comp, solved, empty);
        FAIL("expected undefined-rate error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedRate);
    }
}

TEST_CASE("zero error rates make the correction an identity") {
    const AudienceComposition comp = compose_audience(30000, FdrMatrix{});
    const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 0.87});
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, FdrMatrix{});
    const PropagatedFdr prop = propagate_fdr(comp, solved, out.inferred);
    CHECK(prop.ad1.star_a() == 0.0);
    CHECK(prop.ad2.star_b() == 0.0);
    const DeliveryCounts corrected = correct_counts(out.inferred, prop);
    CHECK(corrected.n1_a == out.inferred.n1_a);
    CHECK(corrected.n1_b == out.inferred.n1_b);
    CHECK(corrected.n2_a == out.inferred.n2_a);
    CHECK(corrected.n2_b == out.inferred.n2_b);
}

TEST_CASE("corrected counts match the omniscient column on the worked example") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const DeliveryParams params{0.065, 0.87};
    const InferredDelivery out = simulate_inferred_targeted(comp, params);
    const SolvedParams solved = solve_rs(out.inferred.n1_a, out.inferred.n1_b, 30000, kReferenceFdr);
    const DeliveryCounts corrected =
        correct_counts(out.inferred, propagate_fdr(comp, solved, out.inferred));
    const DeliveryCounts omniscient = omniscient_correct(comp, params);

    CHECK(corrected.n1_a == doctest::Approx(omniscient.n1_a).epsilon(1e-9));
    CHECK(corrected.n1_b == doctest::Approx(omniscient.n1_b).epsilon(1e-9));
    CHECK(corrected.n2_a == doctest::Approx(omniscient.n2_a).epsilon(1e-9));
    CHECK(corrected.n2_b == doctest::Approx(omniscient.n2_b).epsilon(1e-9));
    CHECK(std::fabs(std::round(corrected.n1_a) - 544.0) <= 1.0);
    CHECK(std::fabs(std::round(corrected.n1_b) - 1429.0) <= 1.0);
}

TEST_CASE("negative corrected counts are an error, not a clamp") {
    DeliveryCounts inferred;
    inferred.basis = Basis::Inferred;
    inferred.n1_a = 100.0;
    inferred.n1_b = 100.0;
    inferred.n2_a = 100.0;
    inferred.n2_b = 100.0;
    PropagatedFdr prop;
    prop.ad1.b_given_a = 0.9;
    prop.ad1.o_given_a = 0.4; // star 1.3, drives n1_a negative
    try {
        correct_counts(inferred, prop);
        FAIL("expected invalid-correction error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidCorrection);
    }
}

TEST_CASE("omniscient correction on the no-skew worked example") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const DeliveryCounts counts = omniscient_correct(comp, DeliveryParams{0.065, 1.0});
    CHECK(std::fabs(std::round(counts.n1_a) - 625.0) <= 1.0);
    CHECK(std::fabs(std::round(counts.n1_b) - 1265.0) <= 1.0);
    CHECK(counts.n1_a == counts.n2_a);
    CHECK(counts.n1_b == counts.n2_b);

    // zero-error composition reduces to true targeting
    const AudienceComposition clean = compose_audience(30000, FdrMatrix{});
    const DeliveryCounts corrected = omniscient_correct(clean, DeliveryParams{0.065, 0.87});
    const DeliveryCounts truth = simulate_true_targeted(30000, DeliveryParams{0.065, 0.87});
    CHECK(corrected.n1_a == truth.n1_a);
    CHECK(corrected.n1_b == truth.n1_b);
}

TEST_CASE("practical correction equals the omniscient one across random scenarios") {
    std::mt19937_64 rng(20240818);
    for (int trial = 0; trial < 1000; ++trial) {
        const RandomScenario scenario = draw_scenario(rng);
        const AudienceComposition comp = compose_audience(scenario.size_u, scenario.fdr);
        const InferredDelivery out = simulate_inferred_targeted(comp, scenario.params);
        const SolvedParams solved =
            solve_rs(out.inferred.n1_a, out.inferred.n1_b, scenario.size_u, scenario.fdr);
        const DeliveryCounts corrected =
            correct_counts(out.inferred, propagate_fdr(comp, solved, out.inferred));
        const DeliveryCounts omniscient = omniscient_correct(comp, scenario.params);
        CHECK(corrected.n1_a == doctest::Approx(omniscient.n1_a).epsilon(1e-9));
        CHECK(corrected.n1_b == doctest::Approx(omniscient.n1_b).epsilon(1e-9));
        CHECK(corrected.n2_a == doctest::Approx(omniscient.n2_a).epsilon(1e-9));
        CHECK(corrected.n2_b == doctest::Approx(omniscient.n2_b).epsilon(1e-9));
    }
}

TEST_CASE("solve_rs recovers the generating parameters across random scenarios") {
    std::mt19937_64 rng(20240819);
    for (int trial = 0; trial < 1000; ++trial) {
        const RandomScenario scenario = draw_scenario(rng);
        const AudienceComposition comp = compose_audience(scenario.size_u, scenario.fdr);
        const InferredDelivery out = simulate_inferred_targeted(comp, scenario.params);
        const SolvedParams solved =
            solve_rs(out.inferred.n1_a, out.inferred.n1_b, scenario.size_u, scenario.fdr);
        CHECK(solved.rate_r == doctest::Approx(scenario.params.rate_r).epsilon(1e-9));
        CHECK(solved.skew_s == doctest::Approx(scenario.params.skew_s).epsilon(1e-9));
        CHECK(solved.residual_a() < 1e-9);
        CHECK(solved.residual_b() < 1e-9);
    }
}

TEST_CASE("no skew means no measured skew, with or without inference error") {
    std::mt19937_64 rng(20240820);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        FdrMatrix fdr;
        const double star_a = unit(rng);
        const double split = unit(rng);
        fdr.b_given_a = star_a * split;
        fdr.o_given_a = star_a * (1.0 - split);
        const double star_b = unit(rng);
        const double split_b = unit(rng);
        fdr.a_given_b = star_b * split_b;
        fdr.o_given_b = star_b * (1.0 - split_b);
        const double r = 0.001 + 0.998 * unit(rng);
        const std::int64_t size_u = 2 * (10 + static_cast<std::int64_t>(unit(rng) * 100000));

        const DeliveryParams params{r, 1.0};
        const DeliveryCounts truth = simulate_true_targeted(size_u, params);
        const double d_true = truth.n2_a / truth.n2() - truth.n1_a / truth.n1();
        CHECK(std::fabs(d_true) <= 1e-12);

        const InferredDelivery out =
            simulate_inferred_targeted(compose_audience(size_u, fdr), params);
        const double d_inferred =
            out.inferred.n2_a / out.inferred.n2() - out.inferred.n1_a / out.inferred.n1();
        CHECK(std::fabs(d_inferred) <= 1e-12);
    }
}

TEST_CASE("inference error strictly shrinks measured skew when skew exists") {
    std::mt19937_64 rng(20240821);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        FdrMatrix fdr;
        const double star_a = 1e-6 + (1.0 - 1e-6) * unit(rng);
        const double split = unit(rng);
        fdr.b_given_a = star_a * split;
        fdr.o_given_a = star_a * (1.0 - split);
        fdr.a_given_b = 1e-6 + (1.0 - 1e-6) * unit(rng);
        fdr.o_given_b = unit(rng) * (1.0 - fdr.a_given_b);

        double s = 0.02 + 1.96 * unit(rng);
        if (std::fabs(s - 1.0) < 1e-3) {
            s = unit(rng) < 0.5 ? 0.7 : 1.3;
        }
        const double r = 0.005 + unit(rng) * (0.99 / std::max(s, 2.0 - s) - 0.005);
        const std::int64_t size_u = 2 * (10 + static_cast<std::int64_t>(unit(rng) * 100000));

        const DeliveryParams params{r, s};
        const DeliveryCounts truth = simulate_true_targeted(size_u, params);
        const double d_true = truth.n2_a / truth.n2() - truth.n1_a / truth.n1();
        const InferredDelivery out =
            simulate_inferred_targeted(compose_audience(size_u, fdr), params);
        const double d_inferred =
            out.inferred.n2_a / out.inferred.n2() - out.inferred.n1_a / out.inferred.n1();
        CAPTURE(s);
        CAPTURE(star_a);
        CAPTURE(fdr.a_given_b);
        CHECK(std::fabs(d_inferred) < std::fabs(d_true));
    }
}

TEST_CASE("inference_aware_audit reproduces the worked-example verdicts") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);

    SUBCASE("hidden skew becomes detectable") {
        const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 0.87});
        const AuditResult uncorrected =
            ztest(out.inferred.n1_a, out.inferred.n1_b, out.inferred.n2_a, out.inferred.n2_b, 0.05);
        CHECK(uncorrected.z_stat == doctest::Approx(1.3861081263175339).epsilon(1e-9));
        CHECK_FALSE(uncorrected.significant);

        const AuditResult corrected = inference_aware_audit(30000, kReferenceFdr, out.inferred, 0.05);
        CHECK(corrected.z_stat == doctest::Approx(3.7284850998372).epsilon(1e-9));
        CHECK(std::fabs(corrected.z_stat - 3.73) < 0.05);
        CHECK(corrected.significant);
    }

    SUBCASE("no skew stays undetected") {
        const InferredDelivery out = simulate_inferred_targeted(comp, DeliveryParams{0.065, 1.0});
        const AuditResult corrected = inference_aware_audit(30000, kReferenceFdr, out.inferred, 0.05);
        CHECK(std::fabs(corrected.z_stat) <= 1e-12);
        CHECK_FALSE(corrected.significant);
    }

    SUBCASE("zero error matrix leaves the test unchanged") {
        const AudienceComposition clean = compose_audience(30000, FdrMatrix{});
        const InferredDelivery out = simulate_inferred_targeted(clean, DeliveryParams{0.065, 0.87});
        const AuditResult uncorrected =
            ztest(out.inferred.n1_a, out.inferred.n1_b, out.inferred.n2_a, out.inferred.n2_b, 0.05);
        const AuditResult corrected = inference_aware_audit(30000, FdrMatrix{}, out.inferred, 0.05);
        CHECK(corrected.z_stat == uncorrected.z_stat);
        CHECK(corrected.significant == uncorrected.significant);
    }
}

TEST_CASE("chained audit errors carry the failing stage") {
    FdrMatrix singular;
    singular.b_given_a = 0.6;
    singular.a_given_b = 0.4;
    DeliveryCounts counts;
    counts.basis = Basis::Inferred;
    counts.n1_a = 500.0;
    counts.n1_b = 500.0;
    counts.n2_a = 500.0;
    counts.n2_b = 500.0;
    try {
        inference_aware_audit(10000, singular, counts, 0.05);
        FAIL("expected singular-system error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SingularSystem);
        CHECK(e.stage() == "solve_rs");
    }
}

TEST_CASE("audit report bundles all three verdicts") {
    const AudienceComposition comp = compose_audience(30000, kReferenceFdr);
    const DeliveryParams params{0.065, 0.87};
    const InferredDelivery out = simulate_inferred_targeted(comp, params);
    const AuditReport report = build_audit_report(30000, kReferenceFdr, out.inferred, 0.05,
                                                  Alternative::Greater, &out.omniscient);
    REQUIRE(report.omniscient.has_value());
    CHECK_FALSE(report.uncorrected.significant);
    CHECK(report.corrected_test.significant);
    CHECK(report.omniscient->significant);
    CHECK(report.corrected_test.z_stat == doctest::Approx(report.omniscient->z_stat).epsilon(1e-9));
    CHECK(report.solved.rate_r == doctest::Approx(0.065).epsilon(1e-9));
}

} // TEST_SUITE
