#include "adskew/sweep.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "adskew/error.hpp"

namespace adskew {

namespace {

// Rates for the Th=0.5 classifier measured on a 100k ground-truth
// sample, used by the built-in worked examples.
const FdrMatrix kReferenceFdr{0.4727, 0.030, 0.144, 0.032, 0.0, 0.0};

constexpr std::int64_t kScenarioAudience = 30000;
constexpr double kScenarioRate = 0.065;
constexpr double kScenarioAlpha = 0.05;

bool qualifies(const SweepRow& row, double z_critical, RegionSide side) {
    if (side == RegionSide::BelowOne) {
        return row.s < 1.0 && row.z_true > z_critical && row.z_inferred <= z_critical;
    }
    return row.s > 1.0 && -row.z_true > z_critical && -row.z_inferred <= z_critical;
}

bool recovers(const SweepRow& row, double z_critical, RegionSide side) {
    return side == RegionSide::BelowOne ? row.z_corrected > z_critical
                                        : -row.z_corrected > z_critical;
}

} // namespace

void SGrid::validate() const {
    if (!(step > 0.0)) {
        raise(ErrorCode::InvalidArgument, "grid step must be positive");
    }
    if (!(start > 0.0 && stop < 2.0 && start <= stop)) {
        raise(ErrorCode::InvalidArgument, "grid bounds must satisfy 0 < start <= stop < 2");
    }
}

std::vector<double> SGrid::points() const {
    validate();
    std::vector<double> out;
    const auto steps = static_cast<std::int64_t>(std::llround((stop - start) / step));
    out.reserve(static_cast<std::size_t>(steps) + 1);
    // the tolerance absorbs accumulation noise only; a stop that is not on
    // the lattice truncates to the last point below it
    for (std::int64_t i = 0; i <= steps + 1; ++i) {
        const double s = start + static_cast<double>(i) * step;
        if (s > stop + step * 1e-6) {
            break;
        }
        out.push_back(s);
    }
    return out;
}

void SweepConfig::validate() const {
    s_grid.validate();
    if (size_u.empty()) {
        raise(ErrorCode::InvalidArgument, "sweep needs at least one audience size");
    }
    if (fdr_by_threshold.empty()) {
        raise(ErrorCode::InvalidArgument, "sweep needs at least one FDR matrix");
    }
    for (const auto& [label, fdr] : fdr_by_threshold) {
        fdr.validate();
    }
    DeliveryParams probe{rate_r, 1.0};
    probe.validate();
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        raise(ErrorCode::InvalidArgument, "significance level must be in (0, 0.5]");
    }
}

std::vector<SweepRow> sweep_s(const SGrid& grid, std::int64_t size_u, double rate_r,
                              const FdrMatrix& fdr, double alpha) {
    const AudienceComposition comp = compose_audience(size_u, fdr);
    std::vector<SweepRow> rows;
    const std::vector<double> points = grid.points();
    rows.reserve(points.size());

    for (double s : points) {
        try {
            const DeliveryParams params{rate_r, s};
            const DeliveryCounts truth = simulate_true_targeted(size_u, params);
            const InferredDelivery delivered = simulate_inferred_targeted(comp, params);

            SweepRow row;
            row.s = s;
            const AuditResult stat_true =
                ztest(truth.n1_a, truth.n1_b, truth.n2_a, truth.n2_b, alpha);
            const AuditResult stat_inferred =
                ztest(delivered.inferred.n1_a, delivered.inferred.n1_b, delivered.inferred.n2_a,
                      delivered.inferred.n2_b, alpha);
            const AuditResult stat_corrected =
                inference_aware_audit(size_u, fdr, delivered.inferred, alpha);
            row.z_true = stat_true.z_stat;
            row.z_inferred = stat_inferred.z_stat;
            row.z_corrected = stat_corrected.z_stat;
            row.sig_true = stat_true.significant;
            row.sig_inferred = stat_inferred.significant;
            row.sig_corrected = stat_corrected.significant;
            rows.push_back(row);
        } catch (const Error& e) {
            std::ostringstream stage;
            stage << "sweep s=" << s;
            throw Error(e.code(), e.what(), stage.str());
        }
    }
    return rows;
}

std::optional<MissedSkewRegion> detect_missed_region(std::span<const SweepRow> rows,
                                                     double z_critical, RegionSide side) {
    struct Run {
        std::size_t begin = 0;
        std::size_t end = 0; // exclusive
        std::size_t size() const { return end - begin; }
    };

    std::vector<Run> runs;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!qualifies(rows[i], z_critical, side)) {
            continue;
        }
        if (!runs.empty() && runs.back().end == i) {
            runs.back().end = i + 1;
        } else {
            runs.push_back({i, i + 1});
        }
    }
    if (runs.empty()) {
        return std::nullopt;
    }

    const Run* widest = &runs.front();
    for (const Run& run : runs) {
        if (run.size() > widest->size()) {
            widest = &run;
        }
    }

    MissedSkewRegion region;
    region.s_low = rows[widest->begin].s;
    region.s_high = rows[widest->end - 1].s;
    region.fragmented = runs.size() > 1;
    region.corrected_recovers = true;
    for (std::size_t i = widest->begin; i < widest->end; ++i) {
        if (!recovers(rows[i], z_critical, side)) {
            region.corrected_recovers = false;
            break;
        }
    }
    return region;
}

std::vector<RegionCell> sweep_grid(const SweepConfig& config) {
    config.validate();
    const double z_critical = critical_value(config.alpha);

    std::vector<RegionCell> cells;
    cells.reserve(config.size_u.size() * config.fdr_by_threshold.size());
    for (std::int64_t size_u : config.size_u) {
        for (const auto& [label, fdr] : config.fdr_by_threshold) {
            RegionCell cell;
            cell.size_u = size_u;
            cell.threshold_label = label;
            try {
                const std::vector<SweepRow> rows =
                    sweep_s(config.s_grid, size_u, config.rate_r, fdr, config.alpha);
                cell.region = detect_missed_region(rows, z_critical);
            } catch (const Error& e) {
                cell.error = std::string(to_string(e.code())) + ": " + e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

ScenarioReport build_scenario(std::int64_t size_u, const DeliveryParams& params,
                              const FdrMatrix& fdr, double alpha) {
    ScenarioReport report;
    report.size_u = size_u;
    report.params = params;
    report.fdr = fdr;
    report.alpha = alpha;

    report.composition = compose_audience(size_u, fdr);
    report.true_counts = simulate_true_targeted(size_u, params);

    const InferredDelivery delivered = simulate_inferred_targeted(report.composition, params);
    report.inferred = delivered.inferred;
    report.omniscient = delivered.omniscient;

    const AudienceComposition& comp = report.composition;
    const double rate1_a = params.ad1_rate(Group::A);
    const double rate1_b = params.ad1_rate(Group::B);
    const double rate1_o = params.ad1_rate(Group::Other);
    const double rate2 = params.ad2_rate();
    report.ad1_half_a = {comp.a_in_inferred_a * rate1_a, comp.b_in_inferred_a * rate1_b,
                         comp.o_in_inferred_a * rate1_o};
    report.ad1_half_b = {comp.a_in_inferred_b * rate1_a, comp.b_in_inferred_b * rate1_b,
                         comp.o_in_inferred_b * rate1_o};
    report.ad2_half_a = {comp.a_in_inferred_a * rate2, comp.b_in_inferred_a * rate2,
                         comp.o_in_inferred_a * rate2};
    report.ad2_half_b = {comp.a_in_inferred_b * rate2, comp.b_in_inferred_b * rate2,
                         comp.o_in_inferred_b * rate2};

    const AuditReport audit =
        build_audit_report(size_u, fdr, report.inferred, alpha, Alternative::Greater,
                           &report.omniscient);
    report.corrected = audit.corrected;
    report.stat_inferred = audit.uncorrected;
    report.stat_corrected = audit.corrected_test;
    report.stat_omniscient = *audit.omniscient;
    report.stat_true = ztest(report.true_counts.n1_a, report.true_counts.n1_b,
                             report.true_counts.n2_a, report.true_counts.n2_b, alpha);
    return report;
}

ThoughtExperiments repro_thought_experiments() {
    ThoughtExperiments out;
    out.baseline = build_scenario(kScenarioAudience, DeliveryParams{kScenarioRate, 1.0},
                                  kReferenceFdr, kScenarioAlpha);
    out.skewed = build_scenario(kScenarioAudience, DeliveryParams{kScenarioRate, 0.87},
                                kReferenceFdr, kScenarioAlpha);
    return out;
}

} // namespace adskew
