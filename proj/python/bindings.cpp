#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qlike/errors.hpp"
#include "qlike/harness.hpp"
#include "qlike/qasm.hpp"
#include "qlike/synthesis.hpp"

namespace py = pybind11;
using namespace qlike;

namespace {

OptimizerConfig make_config(std::uint64_t seed, std::uint64_t restarts, std::uint64_t iterations,
                            const std::string& search_group) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = restarts;
    cfg.iterations = iterations;
    cfg.search_group = parse_search_group(search_group);
    return cfg;
}

ComplexMatrix to_matrix(const std::vector<std::vector<Complex>>& rows) {
    std::vector<Complex> entries;
    for (const auto& r : rows) {
        if (r.size() != rows.size()) {
            throw DimensionError("matrix must be square");
        }
        entries.insert(entries.end(), r.begin(), r.end());
    }
    return ComplexMatrix(rows.size(), rows.size(), std::move(entries));
}

NoiseModel make_noise(double dep1, double dep2, double readout) {
    NoiseModel n{dep1, dep2, readout};
    n.validate();
    return n;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "qlike core bindings; results are returned as JSON text";
    m.attr("__version__") = std::string(tool_version());

    py::register_exception<QasmParseError>(m, "QasmParseError", PyExc_ValueError);
    py::register_exception<SynthesisError>(m, "SynthesisError", PyExc_ValueError);

    m.def("kl_divergence",
          [](const std::vector<double>& p, const std::vector<double>& q) { return kl_divergence(p, q).nats; },
          py::arg("p"), py::arg("q"));
    m.def("exact_log_likelihood",
          [](std::uint64_t n, std::uint64_t heads, double q) {
              return exact_log_likelihood(TossRecord(n, heads), BinaryDist(q)).nats;
          },
          py::arg("n"), py::arg("heads"), py::arg("q"));
    m.def("approx_log_likelihood",
          [](std::uint64_t n, std::uint64_t heads, double q) {
              return approx_log_likelihood(TossRecord(n, heads), BinaryDist(q));
          },
          py::arg("n"), py::arg("heads"), py::arg("q"));

    m.def("optimize_json",
          [](double beta, double delta, const std::string& strategy, std::uint64_t seed, std::uint64_t restarts,
             std::uint64_t iterations, const std::string& search_group) {
              const auto cfg = make_config(seed, restarts, iterations, search_group);
              py::gil_scoped_release release;
              return to_json(run_strategy(PreparationParams(beta, delta), parse_strategy(strategy), cfg)).dump();
          },
          py::arg("beta"), py::arg("delta"), py::arg("strategy"), py::arg("seed"), py::arg("restarts") = 8,
          py::arg("iterations") = 5000, py::arg("search_group") = "so4");

    m.def("compare_json",
          [](double beta, double delta, std::uint64_t seed, std::optional<std::pair<double, double>> reference) {
              const auto cfg = make_config(seed, 8, 5000, "so4");
              std::optional<Reference> ref;
              if (reference) {
                  ref = Reference{reference->first, reference->second};
              }
              py::gil_scoped_release release;
              return compare_json(run_compare(PreparationParams(beta, delta), cfg), ref).dump();
          },
          py::arg("beta"), py::arg("delta"), py::arg("seed"), py::arg("reference") = py::none());

    m.def("decompose_json",
          [](const std::vector<std::vector<Complex>>& u) {
              return to_json(decompose_two_qubit(UnitaryMatrix::from(to_matrix(u)))).dump();
          },
          py::arg("unitary"));

    m.def("export_qasm",
          [](double beta, double delta, const std::string& strategy, std::uint64_t seed) {
              const auto cfg = make_config(seed, 8, 5000, "so4");
              const auto ex = build_export(PreparationParams(beta, delta), parse_strategy(strategy), cfg);
              return std::make_pair(emit_qasm(ex.a), emit_qasm(ex.b));
          },
          py::arg("beta"), py::arg("delta"), py::arg("strategy"), py::arg("seed"));

    m.def("roundtrip_qasm", [](const std::string& text) { return emit_qasm(parse_qasm(text)); }, py::arg("text"));

    m.def("born_probabilities",
          [](const std::string& qasm, double dep1, double dep2, double readout) {
              const auto p = noisy_probabilities(parse_qasm(qasm), make_noise(dep1, dep2, readout));
              return std::vector<double>(p.probs().begin(), p.probs().end());
          },
          py::arg("qasm"), py::arg("depolarizing_1q") = 0.0, py::arg("depolarizing_2q") = 0.0,
          py::arg("readout_flip") = 0.0);

    m.def("sample_json",
          [](const std::string& qasm, std::uint64_t shots, std::uint64_t seed, std::uint64_t workers, double dep1,
             double dep2, double readout) {
              const Circuit c = parse_qasm(qasm);
              const NoiseModel noise = make_noise(dep1, dep2, readout);
              py::gil_scoped_release release;
              return to_json(sample_shots(c, shots, noise, seed, workers)).dump();
          },
          py::arg("qasm"), py::arg("shots"), py::arg("seed"), py::arg("workers") = 1,
          py::arg("depolarizing_1q") = 0.0, py::arg("depolarizing_2q") = 0.0, py::arg("readout_flip") = 0.0);

    m.def("curve_csv",
          [](double beta, double delta, std::uint64_t n_max, std::uint64_t seed) {
              const auto cfg = make_config(seed, 8, 5000, "so4");
              CurveOptions options;
              options.n_max = n_max;
              options.seed = seed;
              py::gil_scoped_release release;
              const auto result = run_curve(PreparationParams(beta, delta), cfg, options);
              return curve_csv(result, metadata_json("curve", seed, Json{{"beta", beta}, {"delta", delta}}));
          },
          py::arg("beta"), py::arg("delta"), py::arg("n_max"), py::arg("seed"));
}
