#include <sstream>
#include <string>

#include <doctest.h>

#include "adskew/error.hpp"
#include "adskew/io.hpp"

using namespace adskew;
using adskew::io::json;

TEST_SUITE("io") {

TEST_CASE("emitted numbers use 12 significant digits and stay stable") {
    CHECK(io::format_number(0.065) == "0.065");
    CHECK(io::format_number(975.0) == "975");
    CHECK(io::format_number(0.06512820512820511) == "0.0651282051282");
    CHECK(io::round_emitted(0.06512820512820511) == io::round_emitted(0.065128205128204));
    CHECK(io::round_emitted(1.0) == 1.0);
}

TEST_CASE("record CSV parse errors carry line numbers") {
    SUBCASE("bad header") {
        std::stringstream in("group,a,b,o\nA,1,0,0\n");
        CHECK_THROWS_AS(io::read_records_csv(in, "records.csv"), Error);
    }
    SUBCASE("bad group label") {
        std::stringstream in("true_group,prob_a,prob_b,prob_o\nA,1,0,0\nX,0,1,0\n");
        try {
            io::read_records_csv(in, "records.csv");
            FAIL("expected parse error");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find("records.csv:3") != std::string::npos);
        }
    }
    SUBCASE("probabilities off by more than the tolerance") {
        std::stringstream in("true_group,prob_a,prob_b,prob_o\nA,0.5,0.2,0.1\n");
        try {
            io::read_records_csv(in, "records.csv");
            FAIL("expected invalid record");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidRecord);
            CHECK(std::string(e.what()).find(":2") != std::string::npos);
        }
    }
    SUBCASE("wrong field count") {
        std::stringstream in("true_group,prob_a,prob_b,prob_o\nA,0.5,0.5\n");
        CHECK_THROWS_AS(io::read_records_csv(in, "records.csv"), Error);
    }
    SUBCASE("non-numeric probability") {
        std::stringstream in("true_group,prob_a,prob_b,prob_o\nA,x,0.5,0.5\n");
        CHECK_THROWS_AS(io::read_records_csv(in, "records.csv"), Error);
    }
}

TEST_CASE("FdrMatrix JSON round trip") {
    const FdrMatrix fdr{0.4727, 0.030, 0.144, 0.032, 0.01, 0.02};
    const json j = io::to_json(fdr);
    CHECK(j.at("fdr_star_a").get<double>() == doctest::Approx(0.5027));
    const FdrMatrix back = io::fdr_from_json(j);
    CHECK(back.b_given_a == fdr.b_given_a);
    CHECK(back.o_given_a == fdr.o_given_a);
    CHECK(back.a_given_b == fdr.a_given_b);
    CHECK(back.o_given_b == fdr.o_given_b);
    CHECK(back.a_given_o == fdr.a_given_o);
    CHECK(back.b_given_o == fdr.b_given_o);
}

TEST_CASE("FdrMatrix JSON parsing is forgiving about the Other row only") {
    const FdrMatrix fdr = io::fdr_from_json(json{{"fdr_b_given_a", 0.47},
                                                 {"fdr_o_given_a", 0.03},
                                                 {"fdr_a_given_b", 0.14},
                                                 {"fdr_o_given_b", 0.03}});
    CHECK(fdr.a_given_o == 0.0);
    CHECK(fdr.b_given_o == 0.0);

    CHECK_THROWS_AS(io::fdr_from_json(json{{"fdr_b_given_a", 0.47}}), Error);
    CHECK_THROWS_AS(io::fdr_from_json(json{{"fdr_b_given_a", 1.5},
                                           {"fdr_o_given_a", 0.0},
                                           {"fdr_a_given_b", 0.0},
                                           {"fdr_o_given_b", 0.0}}),
                    Error);
    CHECK_THROWS_AS(io::fdr_from_json(json::array()), Error);
}

TEST_CASE("delivery counts JSON round trip") {
    DeliveryCounts counts;
    counts.basis = Basis::Corrected;
    counts.n1_a = 543.982725;
    counts.n1_b = 1428.6392250000001;
    counts.n1_o = 67.7;
    counts.n2_a = 625.2675;
    counts.n2_b = 1264.2825;
    const json j = io::to_json(counts);
    const DeliveryCounts back = io::delivery_counts_from_json(j);
    CHECK(back.basis == Basis::Corrected);
    CHECK(back.n1_a == io::round_emitted(counts.n1_a));
    CHECK(back.n1_b == io::round_emitted(counts.n1_b));
    CHECK(back.n1_o == io::round_emitted(counts.n1_o));
    CHECK(back.n2_a == io::round_emitted(counts.n2_a));
    // emitting again is byte-stable
    CHECK(io::to_json(back).dump() == j.dump());
}

TEST_CASE("sweep config from JSON") {
    const json j{{"s_start", 0.6},
                 {"s_stop", 0.9},
                 {"s_step", 0.05},
                 {"size_u", {10000, 30000}},
                 {"rate_r", 0.05},
                 {"alpha", 0.01},
                 {"fdr_by_threshold",
                  {{"0.5",
                    {{"fdr_b_given_a", 0.47},
                     {"fdr_o_given_a", 0.03},
                     {"fdr_a_given_b", 0.14},
                     {"fdr_o_given_b", 0.03}}}}}};
    const SweepConfig config = io::sweep_config_from_json(j);
    CHECK(config.s_grid.start == 0.6);
    CHECK(config.s_grid.stop == 0.9);
    CHECK(config.s_grid.step == 0.05);
    CHECK(config.size_u == std::vector<std::int64_t>{10000, 30000});
    CHECK(config.rate_r == 0.05);
    CHECK(config.alpha == 0.01);
    REQUIRE(config.fdr_by_threshold.size() == 1);
    CHECK(config.fdr_by_threshold[0].first == "0.5");
    CHECK(config.fdr_by_threshold[0].second.b_given_a == 0.47);

    CHECK_THROWS_AS(io::sweep_config_from_json(json{{"size_u", "nope"}}), Error);
}

TEST_CASE("csv row shapes") {
    CHECK(io::sweep_rows_csv_header() == "size_u,threshold_label,s,z_true,z_inferred,z_corrected");
    SweepRow row;
    row.s = 0.87;
    row.z_true = 4.067851130407916;
    row.z_inferred = 1.3861081263175339;
    row.z_corrected = 3.7284850998372;
    CHECK(io::to_csv_row(30000, "0.5", row) ==
          "30000,0.5,0.87,4.06785113041,1.38610812632,3.72848509984");

    RegionCell cell;
    cell.size_u = 10000;
    cell.threshold_label = "0.5";
    MissedSkewRegion region;
    region.s_low = 0.73;
    region.s_high = 0.90;
    region.corrected_recovers = true;
    cell.region = region;
    CHECK(io::to_csv_row(cell) == "10000,0.5,0.73,0.9,0.17,true");

    RegionCell empty;
    empty.size_u = 10000;
    empty.threshold_label = "0.9";
    CHECK(io::to_csv_row(empty) == "10000,0.9,,,,");

    DeliveryCounts counts;
    counts.basis = Basis::True;
    counts.n1_a = 848.25;
    counts.n1_b = 1101.75;
    counts.n2_a = 975.0;
    counts.n2_b = 975.0;
    CHECK(io::to_csv_row(counts, 0.065, 0.87) ==
          "true,848.25,1101.75,0,975,975,0,0.065,0.87");
}

TEST_CASE("audit result serialization carries the verdict") {
    const AuditResult result = ztest(848, 1102, 975, 975, 0.05);
    const json j = io::to_json(result);
    CHECK(j.at("significant").get<bool>());
    CHECK(j.at("alternative").get<std::string>() == "greater");
    CHECK(j.at("z_stat").get<double>() == doctest::Approx(4.0759086492).epsilon(1e-9));
}

} // TEST_SUITE
