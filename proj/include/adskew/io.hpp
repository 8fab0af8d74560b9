#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "adskew/correction.hpp"
#include "adskew/delivery.hpp"
#include "adskew/demographics.hpp"
#include "adskew/stats.hpp"
#include "adskew/sweep.hpp"

namespace adskew::io {

using json = nlohmann::json;

/// Rounds to 12 significant decimal digits. All emitted numbers go
/// through this so reports are byte-stable and round-trip losslessly.
double round_emitted(double value);

// --- labeled-record CSV (header: true_group,prob_a,prob_b,prob_o) ---

std::vector<LabeledRecord> read_records_csv(std::istream& in, const std::string& source_name);
std::vector<LabeledRecord> read_records_file(const std::string& path);
void write_records_csv(std::ostream& out, const std::vector<LabeledRecord>& records);

// --- JSON (de)serialization ---

json to_json(const FdrMatrix& fdr);
FdrMatrix fdr_from_json(const json& j);
FdrMatrix read_fdr_file(const std::string& path);

json to_json(const FdrEstimate& estimate);
json to_json(const AudienceComposition& comp);
json to_json(const DeliveryCounts& counts);
DeliveryCounts delivery_counts_from_json(const json& j);
json to_json(const AuditResult& result);
json to_json(const SolvedParams& solved);
json to_json(const PropagatedFdr& propagated);
json to_json(const AuditReport& report);
json to_json(const ScenarioReport& scenario);
json to_json(const ThoughtExperiments& experiments);
json to_json(const SweepRow& row);
json to_json(const MissedSkewRegion& region);
json to_json(const RegionCell& cell);

SweepConfig sweep_config_from_json(const json& j);

// --- CSV emission for plot data ---

/// One counts row: basis, six counts, then the generating parameters.
std::string delivery_counts_csv_header();
std::string to_csv_row(const DeliveryCounts& counts, double rate_r, double skew_s);

std::string sweep_rows_csv_header();
std::string to_csv_row(std::int64_t size_u, const std::string& threshold_label,
                       const SweepRow& row);

std::string region_table_csv_header();
std::string to_csv_row(const RegionCell& cell);

/// Number formatting used by every emitter: shortest representation of
/// the 12-significant-digit value.
std::string format_number(double value);

} // namespace adskew::io
