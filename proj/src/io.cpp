#include "adskew/io.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "adskew/error.hpp"

namespace adskew::io {

namespace {

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line << ": " << what;
    throw Error(ErrorCode::ParseError, msg.str());
}

double parse_probability(const std::string& field, const std::string& source, std::size_t line) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        parse_fail(source, line, "not a number: '" + field + "'");
    }
    return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

std::string shortest_repr(double value) {
    char buffer[32];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

double get_rate(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) {
        return fallback;
    }
    if (!j.at(key).is_number()) {
        throw Error(ErrorCode::ParseError, std::string("field '") + key + "' must be a number");
    }
    return j.at(key).get<double>();
}

double require_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw Error(ErrorCode::ParseError, std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

json rates_json(const AdErrorRates& rates) {
    return json{{"fdr_b_given_a", round_emitted(rates.b_given_a)},
                {"fdr_o_given_a", round_emitted(rates.o_given_a)},
                {"fdr_a_given_b", round_emitted(rates.a_given_b)},
                {"fdr_o_given_b", round_emitted(rates.o_given_b)},
                {"fdr_star_a", round_emitted(rates.star_a())},
                {"fdr_star_b", round_emitted(rates.star_b())}};
}

} // namespace

double round_emitted(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return std::strtod(buffer, nullptr);
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

std::vector<LabeledRecord> read_records_csv(std::istream& in, const std::string& source_name) {
    std::string line;
    std::size_t line_number = 0;
    std::vector<LabeledRecord> records;

    if (!std::getline(in, line)) {
        parse_fail(source_name, 1, "empty file, expected header true_group,prob_a,prob_b,prob_o");
    }
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "true_group,prob_a,prob_b,prob_o") {
        parse_fail(source_name, 1, "unexpected header '" + line + "'");
    }

    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() != 4) {
            parse_fail(source_name, line_number,
                       "expected 4 fields, got " + std::to_string(fields.size()));
        }

        LabeledRecord record;
        if (fields[0] == "A") {
            record.true_group = Group::A;
        } else if (fields[0] == "B") {
            record.true_group = Group::B;
        } else if (fields[0] == "O") {
            record.true_group = Group::Other;
        } else {
            parse_fail(source_name, line_number,
                       "true_group must be A, B or O, got '" + fields[0] + "'");
        }
        record.prob_a = parse_probability(fields[1], source_name, line_number);
        record.prob_b = parse_probability(fields[2], source_name, line_number);
        record.prob_o = parse_probability(fields[3], source_name, line_number);
        try {
            record.validate();
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << source_name << ":" << line_number << ": " << e.what();
            throw Error(ErrorCode::InvalidRecord, msg.str());
        }
        records.push_back(record);
    }
    return records;
}

std::vector<LabeledRecord> read_records_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    return read_records_csv(in, path);
}

void write_records_csv(std::ostream& out, const std::vector<LabeledRecord>& records) {
    out << "true_group,prob_a,prob_b,prob_o\n";
    for (const LabeledRecord& record : records) {
        out << to_string(record.true_group) << ',' << shortest_repr(record.prob_a) << ','
            << shortest_repr(record.prob_b) << ',' << shortest_repr(record.prob_o) << '\n';
    }
}

json to_json(const FdrMatrix& fdr) {
    return json{{"fdr_b_given_a", round_emitted(fdr.b_given_a)},
                {"fdr_o_given_a", round_emitted(fdr.o_given_a)},
                {"fdr_a_given_b", round_emitted(fdr.a_given_b)},
                {"fdr_o_given_b", round_emitted(fdr.o_given_b)},
                {"fdr_a_given_o", round_emitted(fdr.a_given_o)},
                {"fdr_b_given_o", round_emitted(fdr.b_given_o)},
                {"fdr_star_a", round_emitted(fdr.star_a())},
                {"fdr_star_b", round_emitted(fdr.star_b())},
                {"fdr_star_o", round_emitted(fdr.star_o())}};
}

FdrMatrix fdr_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "FDR matrix must be a JSON object");
    }
    FdrMatrix fdr;
    fdr.b_given_a = require_number(j, "fdr_b_given_a");
    fdr.o_given_a = require_number(j, "fdr_o_given_a");
    fdr.a_given_b = require_number(j, "fdr_a_given_b");
    fdr.o_given_b = require_number(j, "fdr_o_given_b");
    fdr.a_given_o = get_rate(j, "fdr_a_given_o", 0.0);
    fdr.b_given_o = get_rate(j, "fdr_b_given_o", 0.0);
    fdr.validate();
    return fdr;
}

FdrMatrix read_fdr_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    return fdr_from_json(j);
}

json to_json(const FdrEstimate& estimate) {
    return json{{"matrix", to_json(estimate.matrix)},
                {"assigned_a", estimate.assigned_a},
                {"assigned_b", estimate.assigned_b},
                {"assigned_other", estimate.assigned_other},
                {"excluded", estimate.excluded}};
}

json to_json(const AudienceComposition& comp) {
    return json{{"size_u", round_emitted(comp.size_u)},
                {"inferred_a",
                 {{"true_a", round_emitted(comp.a_in_inferred_a)},
                  {"true_b", round_emitted(comp.b_in_inferred_a)},
                  {"true_o", round_emitted(comp.o_in_inferred_a)}}},
                {"inferred_b",
                 {{"true_a", round_emitted(comp.a_in_inferred_b)},
                  {"true_b", round_emitted(comp.b_in_inferred_b)},
                  {"true_o", round_emitted(comp.o_in_inferred_b)}}}};
}

json to_json(const DeliveryCounts& counts) {
    return json{{"basis", to_string(counts.basis)},
                {"n1_a", round_emitted(counts.n1_a)},
                {"n1_b", round_emitted(counts.n1_b)},
                {"n1_o", round_emitted(counts.n1_o)},
                {"n2_a", round_emitted(counts.n2_a)},
                {"n2_b", round_emitted(counts.n2_b)},
                {"n2_o", round_emitted(counts.n2_o)},
                {"n1", round_emitted(counts.n1())},
                {"n2", round_emitted(counts.n2())}};
}

DeliveryCounts delivery_counts_from_json(const json& j) {
    DeliveryCounts counts;
    const std::string basis = j.value("basis", "inferred");
    if (basis == "true") {
        counts.basis = Basis::True;
    } else if (basis == "inferred") {
        counts.basis = Basis::Inferred;
    } else if (basis == "corrected") {
        counts.basis = Basis::Corrected;
    } else {
        throw Error(ErrorCode::ParseError, "unknown basis '" + basis + "'");
    }
    counts.n1_a = require_number(j, "n1_a");
    counts.n1_b = require_number(j, "n1_b");
    counts.n2_a = require_number(j, "n2_a");
    counts.n2_b = require_number(j, "n2_b");
    counts.n1_o = get_rate(j, "n1_o", 0.0);
    counts.n2_o = get_rate(j, "n2_o", 0.0);
    return counts;
}

json to_json(const AuditResult& result) {
    return json{{"s1_a", round_emitted(result.s1_a)},
                {"s2_a", round_emitted(result.s2_a)},
                {"skew_d", round_emitted(result.skew_d)},
                {"pooled_share", round_emitted(result.pooled_share)},
                {"std_error", round_emitted(result.std_error)},
                {"z_stat", round_emitted(result.z_stat)},
                {"alpha", round_emitted(result.alpha)},
                {"z_critical", round_emitted(result.z_critical)},
                {"alternative", to_string(result.alternative)},
                {"significant", result.significant}};
}

json to_json(const SolvedParams& solved) {
    return json{{"rate_r", round_emitted(solved.rate_r)},
                {"skew_s", round_emitted(solved.skew_s)},
                {"equations",
                 {{"inferred_a",
                   {{"skew_coef", round_emitted(solved.skew_coef_a)},
                    {"base_coef", round_emitted(solved.base_coef_a)},
                    {"observed", round_emitted(solved.observed_a)},
                    {"residual", round_emitted(solved.residual_a())}}},
                  {"inferred_b",
                   {{"skew_coef", round_emitted(solved.skew_coef_b)},
                    {"base_coef", round_emitted(solved.base_coef_b)},
                    {"observed", round_emitted(solved.observed_b)},
                    {"residual", round_emitted(solved.residual_b())}}}}}};
}

json to_json(const PropagatedFdr& propagated) {
    return json{{"ad1", rates_json(propagated.ad1)}, {"ad2", rates_json(propagated.ad2)}};
}

json to_json(const AuditReport& report) {
    json j{{"solved", to_json(report.solved)},
           {"propagated", to_json(report.propagated)},
           {"corrected_counts", to_json(report.corrected)},
           {"test_uncorrected", to_json(report.uncorrected)},
           {"test_corrected", to_json(report.corrected_test)}};
    if (report.omniscient) {
        j["test_omniscient"] = to_json(*report.omniscient);
    }
    return j;
}

json to_json(const ScenarioReport& scenario) {
    const auto half_json = [](const HalfDelivery& half) {
        return json{{"true_a", round_emitted(half.a)},
                    {"true_b", round_emitted(half.b)},
                    {"true_o", round_emitted(half.o)}};
    };
    return json{
        {"parameters",
         {{"size_u", scenario.size_u},
          {"rate_r", round_emitted(scenario.params.rate_r)},
          {"skew_s", round_emitted(scenario.params.skew_s)},
          {"others_treatment", to_string(scenario.params.others)},
          {"alpha", round_emitted(scenario.alpha)}}},
        {"fdr", to_json(scenario.fdr)},
        {"targeted_audience", to_json(scenario.composition)},
        {"delivery",
         {{"true", to_json(scenario.true_counts)},
          {"inferred", to_json(scenario.inferred)},
          {"inferred_breakdown",
           {{"ad1",
             {{"inferred_a", half_json(scenario.ad1_half_a)},
              {"inferred_b", half_json(scenario.ad1_half_b)}}},
            {"ad2",
             {{"inferred_a", half_json(scenario.ad2_half_a)},
              {"inferred_b", half_json(scenario.ad2_half_b)}}}}},
          {"omniscient", to_json(scenario.omniscient)},
          {"corrected", to_json(scenario.corrected)}}},
        {"tests",
         {{"true", to_json(scenario.stat_true)},
          {"inferred", to_json(scenario.stat_inferred)},
          {"omniscient", to_json(scenario.stat_omniscient)},
          {"corrected", to_json(scenario.stat_corrected)}}}};
}

json to_json(const ThoughtExperiments& experiments) {
    return json{{"baseline", to_json(experiments.baseline)},
                {"skewed", to_json(experiments.skewed)}};
}

json to_json(const SweepRow& row) {
    return json{{"s", round_emitted(row.s)},
                {"z_true", round_emitted(row.z_true)},
                {"z_inferred", round_emitted(row.z_inferred)},
                {"z_corrected", round_emitted(row.z_corrected)},
                {"sig_true", row.sig_true},
                {"sig_inferred", row.sig_inferred},
                {"sig_corrected", row.sig_corrected}};
}

json to_json(const MissedSkewRegion& region) {
    return json{{"s_low", round_emitted(region.s_low)},
                {"s_high", round_emitted(region.s_high)},
                {"width", round_emitted(region.width())},
                {"corrected_recovers", region.corrected_recovers},
                {"fragmented", region.fragmented}};
}

json to_json(const RegionCell& cell) {
    json j{{"size_u", cell.size_u}, {"threshold_label", cell.threshold_label}};
    j["region"] = cell.region ? to_json(*cell.region) : json(nullptr);
    if (!cell.error.empty()) {
        j["error"] = cell.error;
    }
    return j;
}

SweepConfig sweep_config_from_json(const json& j) {
    if (!j.is_object()) {
        throw Error(ErrorCode::ParseError, "sweep config must be a JSON object");
    }
    SweepConfig config;
    config.s_grid.start = get_rate(j, "s_start", config.s_grid.start);
    config.s_grid.stop = get_rate(j, "s_stop", config.s_grid.stop);
    config.s_grid.step = get_rate(j, "s_step", config.s_grid.step);
    config.rate_r = get_rate(j, "rate_r", config.rate_r);
    config.alpha = get_rate(j, "alpha", config.alpha);
    if (j.contains("size_u")) {
        if (!j.at("size_u").is_array()) {
            throw Error(ErrorCode::ParseError, "size_u must be an array");
        }
        config.size_u.clear();
        for (const auto& entry : j.at("size_u")) {
            if (!entry.is_number_integer()) {
                throw Error(ErrorCode::ParseError, "size_u entries must be integers");
            }
            config.size_u.push_back(entry.get<std::int64_t>());
        }
    }
    if (j.contains("fdr_by_threshold")) {
        if (!j.at("fdr_by_threshold").is_object()) {
            throw Error(ErrorCode::ParseError, "fdr_by_threshold must map labels to matrices");
        }
        for (const auto& [label, matrix] : j.at("fdr_by_threshold").items()) {
            config.fdr_by_threshold.emplace_back(label, fdr_from_json(matrix));
        }
    }
    return config;
}

std::string delivery_counts_csv_header() {
    return "basis,n1_a,n1_b,n1_o,n2_a,n2_b,n2_o,rate_r,skew_s";
}

std::string to_csv_row(const DeliveryCounts& counts, double rate_r, double skew_s) {
    std::ostringstream row;
    row << to_string(counts.basis) << ',' << format_number(counts.n1_a) << ','
        << format_number(counts.n1_b) << ',' << format_number(counts.n1_o) << ','
        << format_number(counts.n2_a) << ',' << format_number(counts.n2_b) << ','
        << format_number(counts.n2_o) << ',' << format_number(rate_r) << ','
        << format_number(skew_s);
    return row.str();
}

std::string sweep_rows_csv_header() {
    return "size_u,threshold_label,s,z_true,z_inferred,z_corrected";
}

std::string to_csv_row(std::int64_t size_u, const std::string& threshold_label,
                       const SweepRow& row) {
    std::ostringstream out;
    out << size_u << ',' << threshold_label << ',' << format_number(row.s) << ','
        << format_number(row.z_true) << ',' << format_number(row.z_inferred) << ','
        << format_number(row.z_corrected);
    return out.str();
}

std::string region_table_csv_header() {
    return "size_u,threshold_label,s_low,s_high,width,corrected_recovers";
}

std::string to_csv_row(const RegionCell& cell) {
    std::ostringstream out;
    out << cell.size_u << ',' << cell.threshold_label << ',';
    if (cell.region) {
        out << format_number(cell.region->s_low) << ',' << format_number(cell.region->s_high)
            << ',' << format_number(cell.region->width()) << ','
            << (cell.region->corrected_recovers ? "true" : "false");
    } else {
        out << ",,,";
    }
    return out.str();
}

} // namespace adskew::io
