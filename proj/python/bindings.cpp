#include "bellforge/cli.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace bellforge;

namespace {

QuestionSet specials_from(const std::vector<std::string>& items, int m) {
    std::vector<Question> qs;
    for (const auto& s : items) qs.push_back(parse_question(s));
    if (qs.empty()) throw std::invalid_argument("need at least one special question");
    const int n = static_cast<int>(qs.front().size());
    return make_set(m, n, std::move(qs));
}

std::vector<std::string> strings(const QuestionSet& s) {
    std::vector<std::string> out;
    for (const auto& q : s.members) out.push_back(to_string(q));
    return out;
}

}  // namespace

PYBIND11_MODULE(_bellforge, m) {
    m.doc() = "bellforge core bindings";

    py::class_<Strategy>(m, "Strategy")
        .def_readonly("n", &Strategy::n)
        .def_property_readonly("factorized", &Strategy::factorized)
        .def("to_json", [](const Strategy& s) { return strategy_to_json(s); });

    m.def("honest_strategy", &honest_strategy, py::arg("n"));
    m.def("depolarize", [](const Strategy& s, double p) {
        return depolarize(s, NoiseSpec{NoiseSpec::Kind::depolarizing, p});
    }, py::arg("strategy"), py::arg("p"));
    m.def("conjugate", &conjugate);
    m.def("densify", &densify);
    m.def("strategy_from_json", &strategy_from_json);

    m.def("pauli", &pauli, py::arg("basis"));
    m.def("regularize", [](const Mat& t) { return regularize(t); });
    m.def("operator_norm", [](const Mat& t) { return operator_norm(t); });

    m.def("question_set", [](const std::vector<std::string>& specials, int mm) {
        return strings(build_question_set(specials_from(specials, mm)));
    }, py::arg("specials"), py::arg("m") = 5);
    m.def("reduced_set", [](const std::vector<std::string>& specials, int j, int mm) {
        return strings(reduced_set(specials_from(specials, mm), j));
    }, py::arg("specials"), py::arg("j"), py::arg("m") = 5);
    m.def("base_set_bound", &base_set_bound);
    m.def("correlator_bound", &correlator_bound);

    m.def("audit_json", [](const Strategy& s, const std::vector<std::string>& specials) {
        return to_json(full_audit(s, specials_from(specials, 5))).dump();
    });
    m.def("sampled_audit_json", [](const Strategy& s, const std::vector<std::string>& specials, std::uint64_t trials,
                                   std::uint64_t seed, double alpha) {
        auto sp = specials_from(specials, 5);
        return to_json(estimate_from_trials(simulate_tally(s, sp, trials, seed), sp, alpha)).dump();
    }, py::arg("strategy"), py::arg("specials"), py::arg("trials"), py::arg("seed"), py::arg("alpha") = 0.01);
    m.def("relations_json", [](const Strategy& s, const std::vector<std::string>& specials, const std::string& chi,
                               double eps) {
        return to_json(relation_check(s, specials_from(specials, 5), parse_question(chi)), eps).dump();
    });
    m.def("isometry_json", [](const Strategy& s, const std::vector<std::string>& specials, const std::string& chi) {
        return to_json(apply_isometry(s, specials_from(specials, 5), parse_question(chi))).dump();
    });
    m.def("prepare_json", [](const Strategy& s, const std::vector<std::string>& specials, const std::string& chi) {
        return to_json(prep_distance_report(s, specials_from(specials, 5), parse_question(chi))).dump();
    });
    m.def("run", [](std::vector<std::string> args) {
        args.insert(args.begin(), "bellforge");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        return run_cli(static_cast<int>(argv.size()), argv.data());
    });
}
