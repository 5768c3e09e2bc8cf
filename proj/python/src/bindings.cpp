#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "blocksymm/bounds_mc.hpp"
#include "blocksymm/config.hpp"
#include "blocksymm/errors.hpp"
#include "blocksymm/experiment.hpp"
#include "blocksymm/gaussian_compare.hpp"
#include "blocksymm/remainders.hpp"
#include "blocksymm/report_io.hpp"

namespace py = pybind11;
using namespace blocksymm;

namespace {

PsiSpec psi_of(const std::string& kind, double q, double a, double b) {
    if (kind == "power") return PsiSpec::power(q);
    if (kind == "exponential") return PsiSpec::exponential(a, b);
    throw ValidationError("psi.kind", "must be power or exponential");
}

// Runs a config given as JSON text; returns (exit code, report documents as JSON text).
std::pair<int, std::vector<std::string>> run_json(const std::string& text) {
    const auto cfg = parse_config(nlohmann::json::parse(text));
    ExperimentResult result;
    {
        py::gil_scoped_release release;
        result = run_experiment(cfg);
    }
    if (result.error) throw std::runtime_error(*result.error);
    std::vector<std::string> docs;
    for (const auto& d : result.documents) docs.push_back(dump_report(d));
    return {result.exit_code(), docs};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Block multiplier symmetrization bounds";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<VacuousBoundError>(m, "VacuousBoundError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    m.def("psi_eval", [](const std::string& kind, double x, double q, double a, double b) {
              return psi_eval(psi_of(kind, q, a, b), x);
          },
          py::arg("kind"), py::arg("x"), py::arg("q") = 1.0, py::arg("a") = 1.0, py::arg("b") = 1.0);

    m.def("remainder_rn", [](double q, std::size_t n, double U, double rho_sum) {
              return remainder_Rn(PsiSpec::power(q), n, U, rho_sum);
          },
          py::arg("q"), py::arg("n"), py::arg("U"), py::arg("rho_sum"));
    m.def("remainder_r1", [](double q, std::size_t n, double U, double rho_sum) {
              return remainder_R1(PsiSpec::power(q), n, U, rho_sum);
          },
          py::arg("q"), py::arg("n"), py::arg("U"), py::arg("rho_sum"));
    m.def("remainder_r2", &remainder_R2, py::arg("r"), py::arg("tail_prob"), py::arg("psi_norm"));

    m.def("concentration_general", &concentration_general, py::arg("p"), py::arg("pbar"));
    m.def("concentration_lq", &concentration_lq, py::arg("p"), py::arg("U"), py::arg("q"),
          py::arg("max_mean_moment"));
    m.def("concentration_subexp",
          [](double p, std::size_t n, double U, double a, double b, double gamma, double phi) {
              return concentration_subexp(p, n, U, TailParams{a, b, gamma, phi}).bound;
          },
          py::arg("p"), py::arg("n"), py::arg("U"), py::arg("a"), py::arg("b"), py::arg("gamma"),
          py::arg("phi"));
    m.def("optimal_truncation", &optimal_truncation, py::arg("q"), py::arg("r"), py::arg("phi"),
          py::arg("rho_sum"), py::arg("p"), py::arg("n"), py::arg("M_n"));

    m.def("kolmogorov_distance",
          [](const std::vector<double>& a, const std::vector<double>& b) {
              return kolmogorov_distance(a, b);
          },
          py::arg("a"), py::arg("b"));
    m.def("hoeffding_factor", &hoeffding_factor, py::arg("q"), py::arg("c"), py::arg("p"), py::arg("n"));

    m.def("exact_enumeration",
          [](std::size_t n, std::size_t p, std::size_t b, double q, double scale) {
              DgpSpec spec;
              spec.kind = BoundedRademacher{1.0};
              spec.n = n;
              spec.p = p;
              const auto e = exact_enumeration(spec, make_blocks(n, b), {MultiplierKind::Rademacher},
                                               PsiSpec::power(q), scale);
              py::dict out;
              out["lhs"] = e.lhs;
              out["mid"] = e.mid;
              out["rhs"] = e.rhs;
              return out;
          },
          py::arg("n"), py::arg("p"), py::arg("b"), py::arg("q") = 1.0, py::arg("scale") = 1.0);

    m.def("validate_config", [](const std::string& text) {
        (void)parse_config(nlohmann::json::parse(text));
    }, py::arg("text"));
    m.def("run_config_json", &run_json, py::arg("text"));
}
