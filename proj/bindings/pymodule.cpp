#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "adskew/correction.hpp"
#include "adskew/delivery.hpp"
#include "adskew/demographics.hpp"
#include "adskew/error.hpp"
#include "adskew/stats.hpp"
#include "adskew/sweep.hpp"
#include "adskew/synthetic.hpp"

namespace py = pybind11;
using namespace adskew;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Paired-ad delivery skew auditing with inference-error correction";

    py::register_exception<Error>(m, "AuditError");

    py::enum_<Group>(m, "Group")
        .value("A", Group::A)
        .value("B", Group::B)
        .value("Other", Group::Other);

    py::enum_<OthersTreatment>(m, "OthersTreatment")
        .value("Advantaged", OthersTreatment::Advantaged)
        .value("Disadvantaged", OthersTreatment::Disadvantaged);

    py::enum_<Basis>(m, "Basis")
        .value("True_", Basis::True)
        .value("Inferred", Basis::Inferred)
        .value("Corrected", Basis::Corrected);

    py::enum_<Alternative>(m, "Alternative")
        .value("Greater", Alternative::Greater)
        .value("Less", Alternative::Less);

    py::enum_<RegionSide>(m, "RegionSide")
        .value("BelowOne", RegionSide::BelowOne)
        .value("AboveOne", RegionSide::AboveOne);

    py::class_<LabeledRecord>(m, "LabeledRecord")
        .def(py::init([](Group true_group, double prob_a, double prob_b, double prob_o) {
                 LabeledRecord record{true_group, prob_a, prob_b, prob_o};
                 record.validate();
                 return record;
             }),
             py::arg("true_group"), py::arg("prob_a"), py::arg("prob_b"), py::arg("prob_o"))
        .def_readonly("true_group", &LabeledRecord::true_group)
        .def_readonly("prob_a", &LabeledRecord::prob_a)
        .def_readonly("prob_b", &LabeledRecord::prob_b)
        .def_readonly("prob_o", &LabeledRecord::prob_o);

    py::class_<FdrMatrix>(m, "FdrMatrix")
        .def(py::init([](double b_given_a, double o_given_a, double a_given_b, double o_given_b,
                         double a_given_o, double b_given_o) {
                 FdrMatrix fdr{b_given_a, o_given_a, a_given_b, o_given_b, a_given_o, b_given_o};
                 fdr.validate();
                 return fdr;
             }),
             py::arg("b_given_a"), py::arg("o_given_a"), py::arg("a_given_b"),
             py::arg("o_given_b"), py::arg("a_given_o") = 0.0, py::arg("b_given_o") = 0.0)
        .def_readonly("b_given_a", &FdrMatrix::b_given_a)
        .def_readonly("o_given_a", &FdrMatrix::o_given_a)
        .def_readonly("a_given_b", &FdrMatrix::a_given_b)
        .def_readonly("o_given_b", &FdrMatrix::o_given_b)
        .def_readonly("a_given_o", &FdrMatrix::a_given_o)
        .def_readonly("b_given_o", &FdrMatrix::b_given_o)
        .def_property_readonly("star_a", &FdrMatrix::star_a)
        .def_property_readonly("star_b", &FdrMatrix::star_b)
        .def_property_readonly("star_o", &FdrMatrix::star_o);

    py::class_<AudienceComposition>(m, "AudienceComposition")
        .def_readonly("size_u", &AudienceComposition::size_u)
        .def_readonly("a_in_inferred_a", &AudienceComposition::a_in_inferred_a)
        .def_readonly("b_in_inferred_a", &AudienceComposition::b_in_inferred_a)
        .def_readonly("o_in_inferred_a", &AudienceComposition::o_in_inferred_a)
        .def_readonly("a_in_inferred_b", &AudienceComposition::a_in_inferred_b)
        .def_readonly("b_in_inferred_b", &AudienceComposition::b_in_inferred_b)
        .def_readonly("o_in_inferred_b", &AudienceComposition::o_in_inferred_b);

    py::class_<FdrEstimate>(m, "FdrEstimate")
        .def_readonly("matrix", &FdrEstimate::matrix)
        .def_readonly("assigned_a", &FdrEstimate::assigned_a)
        .def_readonly("assigned_b", &FdrEstimate::assigned_b)
        .def_readonly("assigned_other", &FdrEstimate::assigned_other)
        .def_readonly("excluded", &FdrEstimate::excluded);

    py::class_<DeliveryParams>(m, "DeliveryParams")
        .def(py::init([](double rate_r, double skew_s, OthersTreatment others) {
                 DeliveryParams params{rate_r, skew_s, others};
                 params.validate();
                 return params;
             }),
             py::arg("rate_r"), py::arg("skew_s"),
             py::arg("others") = OthersTreatment::Advantaged)
        .def_readonly("rate_r", &DeliveryParams::rate_r)
        .def_readonly("skew_s", &DeliveryParams::skew_s)
        .def_readonly("others", &DeliveryParams::others);

    py::class_<DeliveryCounts>(m, "DeliveryCounts")
        .def(py::init([](double n1_a, double n1_b, double n2_a, double n2_b, Basis basis) {
                 DeliveryCounts counts;
                 counts.basis = basis;
                 counts.n1_a = n1_a;
                 counts.n1_b = n1_b;
                 counts.n2_a = n2_a;
                 counts.n2_b = n2_b;
                 return counts;
             }),
             py::arg("n1_a"), py::arg("n1_b"), py::arg("n2_a"), py::arg("n2_b"),
             py::arg("basis") = Basis::Inferred)
        .def_readonly("basis", &DeliveryCounts::basis)
        .def_readonly("n1_a", &DeliveryCounts::n1_a)
        .def_readonly("n1_b", &DeliveryCounts::n1_b)
        .def_readonly("n1_o", &DeliveryCounts::n1_o)
        .def_readonly("n2_a", &DeliveryCounts::n2_a)
        .def_readonly("n2_b", &DeliveryCounts::n2_b)
        .def_readonly("n2_o", &DeliveryCounts::n2_o)
        .def_property_readonly("n1", &DeliveryCounts::n1)
        .def_property_readonly("n2", &DeliveryCounts::n2);

    py::class_<InferredDelivery>(m, "InferredDelivery")
        .def_readonly("inferred", &InferredDelivery::inferred)
        .def_readonly("omniscient", &InferredDelivery::omniscient);

    py::class_<AuditResult>(m, "AuditResult")
        .def_readonly("s1_a", &AuditResult::s1_a)
        .def_readonly("s2_a", &AuditResult::s2_a)
        .def_readonly("skew_d", &AuditResult::skew_d)
        .def_readonly("pooled_share", &AuditResult::pooled_share)
        .def_readonly("std_error", &AuditResult::std_error)
        .def_readonly("z_stat", &AuditResult::z_stat)
        .def_readonly("alpha", &AuditResult::alpha)
        .def_readonly("z_critical", &AuditResult::z_critical)
        .def_readonly("alternative", &AuditResult::alternative)
        .def_readonly("significant", &AuditResult::significant);

    py::class_<SolvedParams>(m, "SolvedParams")
        .def_readonly("rate_r", &SolvedParams::rate_r)
        .def_readonly("skew_s", &SolvedParams::skew_s)
        .def_property_readonly("residual_a", &SolvedParams::residual_a)
        .def_property_readonly("residual_b", &SolvedParams::residual_b);

    py::class_<AdErrorRates>(m, "AdErrorRates")
        .def_readonly("b_given_a", &AdErrorRates::b_given_a)
        .def_readonly("o_given_a", &AdErrorRates::o_given_a)
        .def_readonly("a_given_b", &AdErrorRates::a_given_b)
        .def_readonly("o_given_b", &AdErrorRates::o_given_b)
        .def_property_readonly("star_a", &AdErrorRates::star_a)
        .def_property_readonly("star_b", &AdErrorRates::star_b);

    py::class_<PropagatedFdr>(m, "PropagatedFdr")
        .def_readonly("ad1", &PropagatedFdr::ad1)
        .def_readonly("ad2", &PropagatedFdr::ad2);

    py::class_<AuditReport>(m, "AuditReport")
        .def_readonly("solved", &AuditReport::solved)
        .def_readonly("propagated", &AuditReport::propagated)
        .def_readonly("corrected", &AuditReport::corrected)
        .def_readonly("uncorrected", &AuditReport::uncorrected)
        .def_readonly("corrected_test", &AuditReport::corrected_test)
        .def_readonly("omniscient", &AuditReport::omniscient);

    py::class_<SGrid>(m, "SGrid")
        .def(py::init([](double start, double stop, double step) {
                 SGrid grid{start, stop, step};
                 grid.validate();
                 return grid;
             }),
             py::arg("start"), py::arg("stop"), py::arg("step"))
        .def("points", &SGrid::points);

    py::class_<SweepRow>(m, "SweepRow")
        .def_readonly("s", &SweepRow::s)
        .def_readonly("z_true", &SweepRow::z_true)
        .def_readonly("z_inferred", &SweepRow::z_inferred)
        .def_readonly("z_corrected", &SweepRow::z_corrected)
        .def_readonly("sig_true", &SweepRow::sig_true)
        .def_readonly("sig_inferred", &SweepRow::sig_inferred)
        .def_readonly("sig_corrected", &SweepRow::sig_corrected);

    py::class_<MissedSkewRegion>(m, "MissedSkewRegion")
        .def_readonly("s_low", &MissedSkewRegion::s_low)
        .def_readonly("s_high", &MissedSkewRegion::s_high)
        .def_readonly("corrected_recovers", &MissedSkewRegion::corrected_recovers)
        .def_readonly("fragmented", &MissedSkewRegion::fragmented)
        .def_property_readonly("width", &MissedSkewRegion::width);

    py::class_<HalfDelivery>(m, "HalfDelivery")
        .def_readonly("a", &HalfDelivery::a)
        .def_readonly("b", &HalfDelivery::b)
        .def_readonly("o", &HalfDelivery::o);

    py::class_<ScenarioReport>(m, "ScenarioReport")
        .def_readonly("size_u", &ScenarioReport::size_u)
        .def_readonly("composition", &ScenarioReport::composition)
        .def_readonly("true_counts", &ScenarioReport::true_counts)
        .def_readonly("inferred", &ScenarioReport::inferred)
        .def_readonly("omniscient", &ScenarioReport::omniscient)
        .def_readonly("corrected", &ScenarioReport::corrected)
        .def_readonly("stat_true", &ScenarioReport::stat_true)
        .def_readonly("stat_inferred", &ScenarioReport::stat_inferred)
        .def_readonly("stat_omniscient", &ScenarioReport::stat_omniscient)
        .def_readonly("stat_corrected", &ScenarioReport::stat_corrected);

    py::class_<ThoughtExperiments>(m, "ThoughtExperiments")
        .def_readonly("baseline", &ThoughtExperiments::baseline)
        .def_readonly("skewed", &ThoughtExperiments::skewed);

    py::class_<PlantedConfusion>(m, "PlantedConfusion")
        .def(py::init([](double b_given_a, double o_given_a, double a_given_b, double o_given_b,
                         double frac_inferred_a, double frac_inferred_b,
                         double below_threshold_frac, double threshold) {
                 PlantedConfusion spec;
                 spec.b_given_a = b_given_a;
                 spec.o_given_a = o_given_a;
                 spec.a_given_b = a_given_b;
                 spec.o_given_b = o_given_b;
                 spec.frac_inferred_a = frac_inferred_a;
                 spec.frac_inferred_b = frac_inferred_b;
                 spec.below_threshold_frac = below_threshold_frac;
                 spec.threshold = threshold;
                 spec.validate();
                 return spec;
             }),
             py::arg("b_given_a"), py::arg("o_given_a"), py::arg("a_given_b"),
             py::arg("o_given_b"), py::arg("frac_inferred_a") = 0.5,
             py::arg("frac_inferred_b") = 0.5, py::arg("below_threshold_frac") = 0.0,
             py::arg("threshold") = 0.5);

    m.def("assign_inferred_label", &assign_inferred_label, py::arg("record"),
          py::arg("threshold"));
    m.def(
        "estimate_fdr",
        [](const std::vector<LabeledRecord>& records, double threshold) {
            return estimate_fdr(records, threshold);
        },
        py::arg("records"), py::arg("threshold"));
    m.def("compose_audience", &compose_audience, py::arg("size_u"), py::arg("fdr"));
    m.def("simulate_true_targeted", &simulate_true_targeted, py::arg("size_u"),
          py::arg("params"));
    m.def("simulate_inferred_targeted", &simulate_inferred_targeted, py::arg("comp"),
          py::arg("params"));
    m.def("simulate_stochastic", &simulate_stochastic, py::arg("comp"), py::arg("params"),
          py::arg("seed"));
    m.def("ztest", &ztest, py::arg("n1_a"), py::arg("n1_b"), py::arg("n2_a"), py::arg("n2_b"),
          py::arg("alpha"), py::arg("alternative") = Alternative::Greater);
    m.def("critical_value", &critical_value, py::arg("alpha"));
    m.def("solve_rs", &solve_rs, py::arg("n1_a_inferred"), py::arg("n1_b_inferred"),
          py::arg("size_u"), py::arg("fdr"));
    m.def("propagate_fdr", &propagate_fdr, py::arg("comp"), py::arg("solved"),
          py::arg("inferred"));
    m.def("correct_counts", &correct_counts, py::arg("inferred"), py::arg("propagated"));
    m.def("omniscient_correct", &omniscient_correct, py::arg("comp"), py::arg("params"));
    m.def("inference_aware_audit", &inference_aware_audit, py::arg("size_u"), py::arg("fdr"),
          py::arg("inferred"), py::arg("alpha"),
          py::arg("alternative") = Alternative::Greater);
    m.def(
        "build_audit_report",
        [](std::int64_t size_u, const FdrMatrix& fdr, const DeliveryCounts& inferred,
           double alpha, Alternative alternative) {
            return build_audit_report(size_u, fdr, inferred, alpha, alternative);
        },
        py::arg("size_u"), py::arg("fdr"), py::arg("inferred"), py::arg("alpha"),
        py::arg("alternative") = Alternative::Greater);
    m.def("sweep_s", &sweep_s, py::arg("grid"), py::arg("size_u"), py::arg("rate_r"),
          py::arg("fdr"), py::arg("alpha"));
    m.def(
        "detect_missed_region",
        [](const std::vector<SweepRow>& rows, double z_critical, RegionSide side) {
            return detect_missed_region(rows, z_critical, side);
        },
        py::arg("rows"), py::arg("z_critical"), py::arg("side") = RegionSide::BelowOne);
    m.def("repro_thought_experiments", &repro_thought_experiments);
    m.def("build_scenario", &build_scenario, py::arg("size_u"), py::arg("params"),
          py::arg("fdr"), py::arg("alpha"));
    m.def("generate_synthetic", &generate_synthetic, py::arg("count"), py::arg("spec"),
          py::arg("seed"));
}
