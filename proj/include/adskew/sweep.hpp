#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adskew/correction.hpp"
#include "adskew/delivery.hpp"
#include "adskew/demographics.hpp"
#include "adskew/stats.hpp"

namespace adskew {

/// Inclusive arithmetic grid over the skew parameter.
struct SGrid {
    double start = 0.50;
    double stop = 1.00;
    double step = 0.01;

    void validate() const;
    std::vector<double> points() const;
};

struct SweepConfig {
    SGrid s_grid;
    std::vector<std::int64_t> size_u;
    double rate_r = 0.065;
    /// Misclassification matrices keyed by a threshold label (e.g. "0.5").
    std::vector<std::pair<std::string, FdrMatrix>> fdr_by_threshold;
    double alpha = 0.05;

    void validate() const;
};

/// One grid point: the three test statistics and their verdicts.
struct SweepRow {
    double s = 0.0;
    double z_true = 0.0;
    double z_inferred = 0.0;
    double z_corrected = 0.0;
    bool sig_true = false;
    bool sig_inferred = false;
    bool sig_corrected = false;
};

/// Evaluates the grid for one (|U|, fdr) cell: per point, the skew test
/// on a true-targeted audience, on an inferred-targeted audience without
/// correction, and with the inference-aware correction. Rows ascend in s.
/// Errors from a grid point are re-thrown tagged with that point.
std::vector<SweepRow> sweep_s(const SGrid& grid, std::int64_t size_u, double rate_r,
                              const FdrMatrix& fdr, double alpha);

/// Which side of s = 1 to search for hidden skew. BelowOne uses the
/// default H1: D > 0 verdicts; AboveOne mirrors the test direction.
enum class RegionSide { BelowOne, AboveOne };

/// Contiguous grid interval where the true-attribute audit detects skew
/// but the uncorrected inferred-attribute audit does not.
struct MissedSkewRegion {
    double s_low = 0.0;
    double s_high = 0.0;
    /// Whether the corrected statistic is significant at every point.
    bool corrected_recovers = false;
    /// Set when qualifying points formed more than one contiguous run
    /// (the widest run is reported).
    bool fragmented = false;

    double width() const noexcept { return s_high - s_low; }
};

/// Scans rows (sorted by s) for the maximal run of points with
/// z_true > z_critical and z_inferred <= z_critical, restricted to the
/// requested side of s = 1. Returns nullopt when no point qualifies.
std::optional<MissedSkewRegion> detect_missed_region(std::span<const SweepRow> rows,
                                                     double z_critical,
                                                     RegionSide side = RegionSide::BelowOne);

struct RegionCell {
    std::int64_t size_u = 0;
    std::string threshold_label;
    std::optional<MissedSkewRegion> region;
    std::string error; ///< nonempty when this cell failed; grid continues
};

/// Evaluates detect_missed_region for every (|U|, threshold) pair of the
/// config. Per-cell failures are recorded in place without aborting.
std::vector<RegionCell> sweep_grid(const SweepConfig& config);

/// Delivered true-group breakdown within one inferred half for one ad.
struct HalfDelivery {
    double a = 0.0;
    double b = 0.0;
    double o = 0.0;
};

/// Full cell set of one worked scenario: composition, per-basis delivery
/// counts (with per-half true-group breakdowns), corrected counts, and
/// the four test results.
struct ScenarioReport {
    std::int64_t size_u = 0;
    DeliveryParams params;
    FdrMatrix fdr;
    double alpha = 0.0;
    AudienceComposition composition;
    DeliveryCounts true_counts;
    DeliveryCounts inferred;
    HalfDelivery ad1_half_a; ///< ad-1 recipients inside the inferred-A half
    HalfDelivery ad1_half_b;
    HalfDelivery ad2_half_a;
    HalfDelivery ad2_half_b;
    DeliveryCounts omniscient;
    DeliveryCounts corrected; ///< practical correction output
    AuditResult stat_true;
    AuditResult stat_inferred;
    AuditResult stat_omniscient;
    AuditResult stat_corrected;
};

struct ThoughtExperiments {
    ScenarioReport baseline; ///< |U|=30,000, R=0.065, S=1
    ScenarioReport skewed;   ///< same with S=0.87
};

/// Reproduces the two built-in worked examples (no-skew baseline and
/// hidden-skew case) with the Th=0.5 misclassification rates.
ThoughtExperiments repro_thought_experiments();

/// Builds the full report for one parameter set; used by the thought
/// experiments and the CLI simulate command.
ScenarioReport build_scenario(std::int64_t size_u, const DeliveryParams& params,
                              const FdrMatrix& fdr, double alpha);

} // namespace adskew
