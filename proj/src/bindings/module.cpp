#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apf/errors.hpp"
#include "apf/eval.hpp"
#include "apf/parser.hpp"
#include "apf/scoring.hpp"
#include "apf/synth.hpp"
#include "apf/util.hpp"

namespace py = pybind11;
using namespace apf;

namespace {

TestInstance make_instance(const std::string& id,
                           const std::vector<std::pair<double, double>>& samples,
                           const std::vector<double>& design_params) {
    TestInstance t;
    t.id = id;
    t.design_params = design_params;
    t.samples.reserve(samples.size());
    for (const auto& [z, v] : samples) t.samples.push_back(Sample{canon6(z), canon6(v)});
    t.validate();
    return t;
}

std::vector<std::pair<double, double>> samples_of(const TestInstance& t) {
    std::vector<std::pair<double, double>> out;
    out.reserve(t.samples.size());
    for (const Sample& s : t.samples) out.emplace_back(s.z, s.value);
    return out;
}

}  // namespace

PYBIND11_MODULE(_apf, m) {
    m.doc() = "requirements-to-formulation pipeline core";

    py::register_exception<Error>(m, "Error");

    py::class_<TestInstance>(m, "TestInstance")
        .def(py::init(&make_instance), py::arg("id"), py::arg("samples"),
             py::arg("design_params") = std::vector<double>{})
        .def_readonly("id", &TestInstance::id)
        .def_readonly("design_params", &TestInstance::design_params)
        .def_property_readonly("samples", &samples_of)
        .def("__repr__", [](const TestInstance& t) {
            return "TestInstance(id='" + t.id + "', n=" + std::to_string(t.samples.size()) +
                   ")";
        });

    py::class_<RequirementSet>(m, "RequirementSet")
        .def_readonly("id", &RequirementSet::id)
        .def_property_readonly("size", &RequirementSet::size)
        .def_property_readonly("text",
                               [](const RequirementSet& rs) { return requirements_text(rs); })
        .def("__repr__", [](const RequirementSet& rs) {
            return "RequirementSet(id='" + rs.id + "', n=" + std::to_string(rs.size()) + ")";
        });

    py::class_<Formulation>(m, "Formulation")
        .def_readonly("id", &Formulation::id)
        .def_property_readonly("text", [](const Formulation& f) { return print_formulation(f); })
        .def_property_readonly("n_objectives", &Formulation::n_objectives)
        .def_property_readonly("n_constraints", &Formulation::n_constraints)
        .def("__repr__", [](const Formulation& f) {
            return "Formulation(id='" + f.id + "', items=" + std::to_string(f.items.size()) +
                   ")";
        });

    py::class_<Ranking>(m, "Ranking")
        .def_readonly("id", &Ranking::id)
        .def_readonly("instance_ids", &Ranking::instance_ids)
        .def_readonly("ranks", &Ranking::ranks);

    py::class_<QualityScore>(m, "QualityScore")
        .def_readonly("value", &QualityScore::value)
        .def_readonly("formulation_id", &QualityScore::formulation_id)
        .def_readonly("reference_ranking_id", &QualityScore::reference_ranking_id);

    py::class_<AlignmentReport>(m, "AlignmentReport")
        .def_readonly("a_obj", &AlignmentReport::a_obj)
        .def_readonly("a_con", &AlignmentReport::a_con)
        .def_readonly("a_total", &AlignmentReport::a_total)
        .def_readonly("alpha", &AlignmentReport::alpha);

    m.def("parse_formulation",
          [](const std::string& text, const std::string& id) {
              return parse_formulation(text, id);
          },
          py::arg("text"), py::arg("id") = "",
          "Parse canonical formulation text (one objective/constraint per line).");
    m.def("print_formulation", &print_formulation, py::arg("formulation"),
          "Canonical text of a formulation; parse(print(f)) round-trips byte-exactly.");
    m.def("render_curve",
          [](const std::vector<double>& x, std::uint64_t seed, const std::string& id) {
              return render_curve(DesignParams{x}, BandSpec{}, SamplingSpec{}, seed, id);
          },
          py::arg("design_params"), py::arg("seed") = 0, py::arg("id") = "curve",
          "Deterministic five-band benchmark curve for a design vector in [0,1]^d.");
    m.def("sample_instances",
          [](std::size_t count, std::uint64_t seed) {
              return sample_instances(count, BandSpec{}, SamplingSpec{}, seed);
          },
          py::arg("count"), py::arg("seed") = 0);
    m.def("extract_requirements",
          [](const TestInstance& source, std::uint64_t seed) {
              return extract_requirements(source, BandSpec{},
                                          IntentTemplateSpec::default_five_band(), seed);
          },
          py::arg("source"), py::arg("seed") = 0,
          "Requirement set realized from a source curve's band aggregates.");
    m.def("benchmark_requirement_set", [] { return benchmark_requirement_set(); });
    m.def("compile_requirements", &compile_requirements, py::arg("requirements"),
          "Ground-truth formulation compiled directly from the requirements.");
    m.def("induced_ranking",
          [](const Formulation& f, const std::vector<TestInstance>& insts,
             const std::string& id) { return induced_ranking(f, insts, EvalOptions{}, id); },
          py::arg("formulation"), py::arg("instances"), py::arg("id") = "induced",
          "Feasibility-first, Pareto-front, violation-ordered ranking.");
    m.def("oracle_ranking", &oracle_ranking, py::arg("requirements"), py::arg("instances"));
    m.def("spearman", &spearman, py::arg("a"), py::arg("b"),
          "Tie-corrected Spearman correlation of two rankings over the same ids.");
    m.def("quality_score",
          [](const Formulation& f, const std::vector<TestInstance>& insts,
             const Ranking& reference) { return quality_score(f, insts, reference); },
          py::arg("formulation"), py::arg("instances"), py::arg("reference"));
    m.def("evaluate_alignment",
          [](const Formulation& f, const std::vector<TestInstance>& insts,
             const Ranking& ground_truth, const std::vector<bool>& ground_truth_feasible,
             double alpha) {
              return evaluate_alignment(f, insts, ground_truth, ground_truth_feasible, alpha);
          },
          py::arg("formulation"), py::arg("instances"), py::arg("ground_truth"),
          py::arg("ground_truth_feasible"), py::arg("alpha") = 0.5);
}
