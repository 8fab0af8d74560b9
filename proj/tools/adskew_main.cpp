#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adskew/correction.hpp"
#include "adskew/delivery.hpp"
#include "adskew/demographics.hpp"
#include "adskew/error.hpp"
#include "adskew/io.hpp"
#include "adskew/stats.hpp"
#include "adskew/sweep.hpp"
#include "adskew/synthetic.hpp"

namespace {

using adskew::io::json;

int exit_code_for(adskew::ErrorCode code) {
    // distinct per failure category, starting above the CLI11 codes
    return 10 + static_cast<int>(code);
}

void emit_error(const adskew::Error& e) {
    json err{{"error", adskew::to_string(e.code())}, {"message", e.what()}};
    if (!e.stage().empty()) {
        err["stage"] = e.stage();
    }
    std::cerr << err.dump() << "\n";
}

void write_output(const json& report, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << report.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw adskew::Error(adskew::ErrorCode::IoError, "cannot write " + out_path);
    }
    out << report.dump(2) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw adskew::Error(adskew::ErrorCode::IoError, "cannot write " + path);
    }
    out << text;
}

double round_display(double value) {
    // paper-style integers: half away from zero
    return std::round(value);
}

json rounded_counts(const adskew::DeliveryCounts& counts) {
    return json{{"basis", adskew::to_string(counts.basis)},
                {"n1_a", round_display(counts.n1_a)}, {"n1_b", round_display(counts.n1_b)},
                {"n1_o", round_display(counts.n1_o)}, {"n2_a", round_display(counts.n2_a)},
                {"n2_b", round_display(counts.n2_b)}, {"n2_o", round_display(counts.n2_o)}};
}

adskew::Alternative parse_alternative(const std::string& direction) {
    if (direction == "greater") {
        return adskew::Alternative::Greater;
    }
    if (direction == "less") {
        return adskew::Alternative::Less;
    }
    throw adskew::Error(adskew::ErrorCode::InvalidArgument,
                        "direction must be 'greater' or 'less', got '" + direction + "'");
}

struct SweepFlags {
    std::string config_path;
    std::string fdr_path;
    std::string fdr_label = "default";
    std::vector<std::int64_t> size_u;
    double s_start = 0.0, s_stop = 0.0, s_step = 0.0, rate_r = 0.0, alpha = 0.0;
    bool mirror_above_one = false;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Paired-ad delivery skew audit toolkit: simulate delivery under skew, "
                 "quantify how attribute-inference error hides skew, and correct for it"};
    app.set_version_flag("--version", "adskew 0.1.0");
    app.require_subcommand(1);

    std::string output_dir = ".";
    const char* env_dir = std::getenv("ADSKEW_OUTPUT_DIR");
    if (env_dir != nullptr && *env_dir != '\0') {
        output_dir = env_dir;
    }
    app.add_option("--output-dir", output_dir,
                   "directory for multi-file outputs (env ADSKEW_OUTPUT_DIR)")
        ->capture_default_str();
    // let "adskew sweep --output-dir X" work, not just "adskew --output-dir X sweep"
    app.fallthrough();

    // --- estimate-fdr ---
    auto* cmd_estimate = app.add_subcommand(
        "estimate-fdr", "estimate the misclassification matrix from a labeled CSV");
    std::string records_path;
    double threshold = 0.5;
    std::string estimate_out;
    cmd_estimate->add_option("--records", records_path, "CSV of labeled records")->required();
    cmd_estimate->add_option("--threshold", threshold, "assignment threshold")
        ->capture_default_str();
    cmd_estimate->add_option("--out", estimate_out, "write the report here instead of stdout");

    // --- generate ---
    auto* cmd_generate =
        app.add_subcommand("generate", "write a synthetic labeled population with known confusion");
    std::size_t generate_n = 100000;
    std::uint64_t generate_seed = 1;
    std::string generate_out;
    adskew::PlantedConfusion planted;
    cmd_generate->add_option("--n", generate_n, "number of records")->capture_default_str();
    cmd_generate->add_option("--seed", generate_seed, "generator seed")->capture_default_str();
    cmd_generate->add_option("--out", generate_out, "output CSV path (default stdout)");
    cmd_generate->add_option("--fdr-b-given-a", planted.b_given_a, "planted rate");
    cmd_generate->add_option("--fdr-o-given-a", planted.o_given_a, "planted rate");
    cmd_generate->add_option("--fdr-a-given-b", planted.a_given_b, "planted rate");
    cmd_generate->add_option("--fdr-o-given-b", planted.o_given_b, "planted rate");
    cmd_generate->add_option("--fdr-a-given-o", planted.a_given_o, "planted rate");
    cmd_generate->add_option("--fdr-b-given-o", planted.b_given_o, "planted rate");
    cmd_generate->add_option("--frac-a", planted.frac_inferred_a, "share of records labeled A")
        ->capture_default_str();
    cmd_generate->add_option("--frac-b", planted.frac_inferred_b, "share of records labeled B")
        ->capture_default_str();
    cmd_generate
        ->add_option("--below-frac", planted.below_threshold_frac,
                     "share of records with max probability under the threshold")
        ->capture_default_str();
    cmd_generate->add_option("--threshold", planted.threshold, "threshold the rates hold at")
        ->capture_default_str();

    // --- simulate ---
    auto* cmd_simulate =
        app.add_subcommand("simulate", "expected (or sampled) delivery counts for one scenario");
    std::int64_t sim_u = 30000;
    adskew::DeliveryParams sim_params{0.065, 1.0};
    std::string sim_fdr_path;
    std::string sim_others = "advantaged";
    bool sim_stochastic = false;
    std::uint64_t sim_seed = 1;
    bool sim_rounded = false;
    double sim_alpha = 0.05;
    std::string sim_out;
    cmd_simulate->add_option("--u", sim_u, "targeted audience size")->capture_default_str();
    cmd_simulate->add_option("--r", sim_params.rate_r, "base delivery rate")->capture_default_str();
    cmd_simulate->add_option("--s", sim_params.skew_s, "skew multiplier for ad 1")
        ->capture_default_str();
    cmd_simulate->add_option("--alpha", sim_alpha, "significance level")->capture_default_str();
    cmd_simulate->add_option("--fdr", sim_fdr_path,
                             "FDR matrix JSON; adds inferred-targeting results");
    cmd_simulate->add_option("--others", sim_others, "rate for mislabeled Others")
        ->check(CLI::IsMember({"advantaged", "disadvantaged"}))
        ->capture_default_str();
    cmd_simulate->add_flag("--stochastic", sim_stochastic, "sample individuals instead of "
                                                           "expected values (needs --fdr)");
    cmd_simulate->add_option("--seed", sim_seed, "stochastic mode seed")->capture_default_str();
    cmd_simulate->add_flag("--rounded", sim_rounded, "add paper-style integer counts");
    bool sim_csv = false;
    cmd_simulate->add_flag("--csv", sim_csv, "emit flat count rows instead of the JSON report");
    cmd_simulate->add_option("--out", sim_out, "write the report here instead of stdout");

    // --- audit ---
    auto* cmd_audit = app.add_subcommand(
        "audit", "inference-aware audit of four observed inferred-label delivery counts");
    std::vector<double> audit_counts;
    std::int64_t audit_u = 0;
    std::string audit_fdr_path;
    double audit_alpha = 0.05;
    std::string audit_direction = "greater";
    bool audit_rounded = false;
    std::string audit_out;
    cmd_audit->add_option("counts", audit_counts, "n1_a n1_b n2_a n2_b")
        ->expected(4)
        ->required();
    cmd_audit->add_option("--u", audit_u, "targeted audience size")->required();
    cmd_audit->add_option("--fdr", audit_fdr_path, "FDR matrix JSON")->required();
    cmd_audit->add_option("--alpha", audit_alpha, "significance level")->capture_default_str();
    cmd_audit->add_option("--direction", audit_direction, "alternative: greater or less")
        ->check(CLI::IsMember({"greater", "less"}))
        ->capture_default_str();
    cmd_audit->add_flag("--rounded", audit_rounded, "add paper-style integer counts");
    cmd_audit->add_option("--out", audit_out, "write the report here instead of stdout");

    // --- solve-rs ---
    auto* cmd_solve = app.add_subcommand(
        "solve-rs", "recover base rate and skew from ad-1 inferred delivery counts");
    std::vector<double> solve_counts;
    std::int64_t solve_u = 0;
    std::string solve_fdr_path;
    std::string solve_out;
    cmd_solve->add_option("counts", solve_counts, "n1_a n1_b (inferred labels)")
        ->expected(2)
        ->required();
    cmd_solve->add_option("--u", solve_u, "targeted audience size")->required();
    cmd_solve->add_option("--fdr", solve_fdr_path, "FDR matrix JSON")->required();
    cmd_solve->add_option("--out", solve_out, "write the report here instead of stdout");

    // --- sweep ---
    auto* cmd_sweep = app.add_subcommand(
        "sweep", "sweep skew over a grid and report where inference error hides it");
    SweepFlags sweep_flags;
    auto* opt_config = cmd_sweep->add_option("--config", sweep_flags.config_path,
                                             "JSON config (flags override its values)");
    auto* opt_fdr = cmd_sweep->add_option("--fdr", sweep_flags.fdr_path,
                                          "single FDR matrix JSON (alternative to a config)");
    cmd_sweep->add_option("--fdr-label", sweep_flags.fdr_label, "threshold label for --fdr")
        ->capture_default_str();
    auto* opt_u = cmd_sweep->add_option("--u", sweep_flags.size_u, "audience sizes");
    auto* opt_start = cmd_sweep->add_option("--s-start", sweep_flags.s_start, "grid start");
    auto* opt_stop = cmd_sweep->add_option("--s-stop", sweep_flags.s_stop, "grid stop");
    auto* opt_step = cmd_sweep->add_option("--s-step", sweep_flags.s_step, "grid step");
    auto* opt_r = cmd_sweep->add_option("--r", sweep_flags.rate_r, "base delivery rate");
    auto* opt_alpha = cmd_sweep->add_option("--alpha", sweep_flags.alpha, "significance level");
    cmd_sweep->add_flag("--above-one", sweep_flags.mirror_above_one,
                        "also search S > 1 with the mirrored test direction");

    // --- repro ---
    auto* cmd_repro = app.add_subcommand(
        "repro", "reproduce the built-in baseline and hidden-skew worked examples");
    bool repro_rounded = false;
    std::string repro_out;
    cmd_repro->add_flag("--rounded", repro_rounded, "add paper-style integer counts");
    cmd_repro->add_option("--out", repro_out, "write the report here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_estimate) {
            const auto records = adskew::io::read_records_file(records_path);
            const auto estimate = adskew::estimate_fdr(records, threshold);
            json report = adskew::io::to_json(estimate);
            report["threshold"] = threshold;
            report["records"] = records.size();
            write_output(report, estimate_out);
        } else if (*cmd_generate) {
            const auto records = adskew::generate_synthetic(generate_n, planted, generate_seed);
            if (generate_out.empty()) {
                adskew::io::write_records_csv(std::cout, records);
            } else {
                std::ofstream out(generate_out);
                if (!out) {
                    throw adskew::Error(adskew::ErrorCode::IoError, "cannot write " + generate_out);
                }
                adskew::io::write_records_csv(out, records);
            }
        } else if (*cmd_simulate) {
            sim_params.others = sim_others == "advantaged" ? adskew::OthersTreatment::Advantaged
                                                           : adskew::OthersTreatment::Disadvantaged;
            json report{{"parameters",
                         {{"size_u", sim_u},
                          {"rate_r", adskew::io::round_emitted(sim_params.rate_r)},
                          {"skew_s", adskew::io::round_emitted(sim_params.skew_s)},
                          {"others_treatment", adskew::to_string(sim_params.others)}}}};
            std::vector<adskew::DeliveryCounts> csv_rows;
            if (sim_fdr_path.empty()) {
                if (sim_stochastic) {
                    throw adskew::Error(adskew::ErrorCode::InvalidArgument,
                                        "--stochastic needs --fdr (it samples the composed "
                                        "inferred-label audience)");
                }
                const auto counts = adskew::simulate_true_targeted(sim_u, sim_params);
                report["true"] = adskew::io::to_json(counts);
                csv_rows.push_back(counts);
                if (sim_rounded) {
                    report["rounded"] = {{"true", rounded_counts(counts)}};
                }
            } else {
                const auto scenario = adskew::build_scenario(
                    sim_u, sim_params, adskew::io::read_fdr_file(sim_fdr_path), sim_alpha);
                report = adskew::io::to_json(scenario);
                csv_rows = {scenario.true_counts, scenario.inferred, scenario.omniscient,
                            scenario.corrected};
                if (sim_stochastic) {
                    const auto sampled =
                        adskew::simulate_stochastic(scenario.composition, sim_params, sim_seed);
                    report["stochastic"] = {{"seed", sim_seed},
                                            {"inferred", adskew::io::to_json(sampled.inferred)},
                                            {"omniscient", adskew::io::to_json(sampled.omniscient)}};
                }
                if (sim_rounded) {
                    report["rounded"] = {{"true", rounded_counts(scenario.true_counts)},
                                         {"inferred", rounded_counts(scenario.inferred)},
                                         {"omniscient", rounded_counts(scenario.omniscient)},
                                         {"corrected", rounded_counts(scenario.corrected)}};
                }
            }
            if (sim_csv) {
                std::ostringstream rows;
                rows << adskew::io::delivery_counts_csv_header() << "\n";
                for (const auto& counts : csv_rows) {
                    rows << adskew::io::to_csv_row(counts, sim_params.rate_r, sim_params.skew_s)
                         << "\n";
                }
                if (sim_out.empty()) {
                    std::cout << rows.str();
                } else {
                    write_text_file(sim_out, rows.str());
                }
            } else {
                write_output(report, sim_out);
            }
        } else if (*cmd_audit) {
            adskew::DeliveryCounts observed;
            observed.basis = adskew::Basis::Inferred;
            observed.n1_a = audit_counts[0];
            observed.n1_b = audit_counts[1];
            observed.n2_a = audit_counts[2];
            observed.n2_b = audit_counts[3];
            const auto report = adskew::build_audit_report(
                audit_u, adskew::io::read_fdr_file(audit_fdr_path), observed, audit_alpha,
                parse_alternative(audit_direction));
            json out = adskew::io::to_json(report);
            out["inputs"] = {{"size_u", audit_u}, {"counts", adskew::io::to_json(observed)}};
            if (audit_rounded) {
                out["rounded"] = {{"corrected", rounded_counts(report.corrected)}};
            }
            // verdict line on stderr; stdout stays machine-readable
            std::fprintf(stderr,
                         "verdict: uncorrected Z = %.4f (%s), corrected Z = %.4f (%s), "
                         "critical %.4f at alpha %g\n",
                         report.uncorrected.z_stat,
                         report.uncorrected.significant ? "significant" : "not significant",
                         report.corrected_test.z_stat,
                         report.corrected_test.significant ? "significant" : "not significant",
                         report.corrected_test.z_critical, audit_alpha);
            write_output(out, audit_out);
        } else if (*cmd_solve) {
            const auto solved = adskew::solve_rs(solve_counts[0], solve_counts[1], solve_u,
                                                 adskew::io::read_fdr_file(solve_fdr_path));
            write_output(adskew::io::to_json(solved), solve_out);
        } else if (*cmd_sweep) {
            adskew::SweepConfig config;
            if (opt_config->count() > 0) {
                std::ifstream in(sweep_flags.config_path);
                if (!in) {
                    throw adskew::Error(adskew::ErrorCode::IoError,
                                        "cannot open " + sweep_flags.config_path);
                }
                json j;
                try {
                    in >> j;
                } catch (const json::exception& e) {
                    throw adskew::Error(adskew::ErrorCode::ParseError,
                                        sweep_flags.config_path + ": " + e.what());
                }
                config = adskew::io::sweep_config_from_json(j);
            }
            // command-line flags override config-file values
            if (opt_fdr->count() > 0) {
                config.fdr_by_threshold = {{sweep_flags.fdr_label,
                                            adskew::io::read_fdr_file(sweep_flags.fdr_path)}};
            }
            if (opt_u->count() > 0) {
                config.size_u = sweep_flags.size_u;
            }
            if (opt_start->count() > 0) {
                config.s_grid.start = sweep_flags.s_start;
            }
            if (opt_stop->count() > 0) {
                config.s_grid.stop = sweep_flags.s_stop;
            }
            if (opt_step->count() > 0) {
                config.s_grid.step = sweep_flags.s_step;
            }
            if (opt_r->count() > 0) {
                config.rate_r = sweep_flags.rate_r;
            }
            if (opt_alpha->count() > 0) {
                config.alpha = sweep_flags.alpha;
            }
            config.validate();

            const double z_critical = adskew::critical_value(config.alpha);
            std::filesystem::create_directories(output_dir);

            std::ostringstream rows_csv;
            rows_csv << adskew::io::sweep_rows_csv_header() << "\n";
            json rows_json = json::array();
            json regions_json = json::array();
            std::ostringstream regions_csv;
            regions_csv << adskew::io::region_table_csv_header() << "\n";

            for (std::int64_t size_u : config.size_u) {
                for (const auto& [label, fdr] : config.fdr_by_threshold) {
                    adskew::RegionCell cell;
                    cell.size_u = size_u;
                    cell.threshold_label = label;
                    try {
                        const auto rows = adskew::sweep_s(config.s_grid, size_u, config.rate_r,
                                                          fdr, config.alpha);
                        for (const auto& row : rows) {
                            rows_csv << adskew::io::to_csv_row(size_u, label, row) << "\n";
                            json row_json = adskew::io::to_json(row);
                            row_json["size_u"] = size_u;
                            row_json["threshold_label"] = label;
                            rows_json.push_back(std::move(row_json));
                        }
                        cell.region = adskew::detect_missed_region(rows, z_critical);
                        if (sweep_flags.mirror_above_one) {
                            const auto mirrored = adskew::detect_missed_region(
                                rows, z_critical, adskew::RegionSide::AboveOne);
                            if (mirrored) {
                                adskew::RegionCell above = cell;
                                above.threshold_label = label + " (S>1)";
                                above.region = mirrored;
                                regions_csv << adskew::io::to_csv_row(above) << "\n";
                                regions_json.push_back(adskew::io::to_json(above));
                            }
                        }
                    } catch (const adskew::Error& e) {
                        cell.error = std::string(adskew::to_string(e.code())) + ": " + e.what();
                    }
                    regions_csv << adskew::io::to_csv_row(cell) << "\n";
                    regions_json.push_back(adskew::io::to_json(cell));
                }
            }

            const auto out_path = [&output_dir](const char* name) {
                return (std::filesystem::path(output_dir) / name).string();
            };
            write_text_file(out_path("sweep_rows.csv"), rows_csv.str());
            write_text_file(out_path("sweep_regions.csv"), regions_csv.str());
            write_text_file(out_path("sweep_rows.json"), rows_json.dump(2) + "\n");
            write_text_file(out_path("sweep_regions.json"), regions_json.dump(2) + "\n");
            std::cout << "wrote sweep_rows.{csv,json} and sweep_regions.{csv,json} to "
                      << output_dir << "\n";
        } else if (*cmd_repro) {
            const auto experiments = adskew::repro_thought_experiments();
            json report = adskew::io::to_json(experiments);
            if (repro_rounded) {
                const auto add_rounded = [](json& j, const adskew::ScenarioReport& scenario) {
                    j["rounded"] = {{"true", rounded_counts(scenario.true_counts)},
                                    {"inferred", rounded_counts(scenario.inferred)},
                                    {"omniscient", rounded_counts(scenario.omniscient)},
                                    {"corrected", rounded_counts(scenario.corrected)}};
                };
                add_rounded(report["baseline"], experiments.baseline);
                add_rounded(report["skewed"], experiments.skewed);
            }
            write_output(report, repro_out);
        }
    } catch (const adskew::Error& e) {
        emit_error(e);
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
        return 70;
    }
    return 0;
}
