"""Paired-ad delivery skew auditing with inference-error correction."""

from adskew._core import (  # noqa: F401
    AdErrorRates,
    Alternative,
    AudienceComposition,
    AuditError,
    AuditReport,
    AuditResult,
    Basis,
    DeliveryCounts,
    DeliveryParams,
    FdrEstimate,
    FdrMatrix,
    Group,
    HalfDelivery,
    InferredDelivery,
    LabeledRecord,
    MissedSkewRegion,
    OthersTreatment,
    PlantedConfusion,
    PropagatedFdr,
    RegionSide,
    ScenarioReport,
    SGrid,
    SolvedParams,
    SweepRow,
    ThoughtExperiments,
    assign_inferred_label,
    build_audit_report,
    build_scenario,
    compose_audience,
    correct_counts,
    critical_value,
    detect_missed_region,
    estimate_fdr,
    generate_synthetic,
    inference_aware_audit,
    omniscient_correct,
    propagate_fdr,
    repro_thought_experiments,
    simulate_inferred_targeted,
    simulate_stochastic,
    simulate_true_targeted,
    solve_rs,
    sweep_s,
    ztest,
)

__version__ = "0.1.0"
