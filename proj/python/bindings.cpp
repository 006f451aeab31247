#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qdrift/errors.hpp"
#include "qdrift/experiments.hpp"
#include "qdrift/formulas.hpp"
#include "qdrift/metrics.hpp"
#include "qdrift/serialize.hpp"

namespace py = pybind11;
using namespace qdrift;

namespace {

py::array_t<Complex> to_numpy(const ComplexMatrix& m) {
  const auto d = static_cast<py::ssize_t>(m.dim());
  py::array_t<Complex> out({d, d});
  auto span = m.data();
  std::copy(span.begin(), span.end(), out.mutable_data());
  return out;
}

ComplexMatrix from_numpy(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) throw ValidationError("expected a square matrix");
  const auto d = static_cast<std::size_t>(a.shape(0));
  return ComplexMatrix(d, std::vector<Complex>(a.data(), a.data() + d * d));
}

py::array_t<Complex> state_to_numpy(const StateVector& s) {
  py::array_t<Complex> out(static_cast<py::ssize_t>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) out.mutable_at(i) = s[i];
  return out;
}

StateVector state_from_numpy(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 1) throw ValidationError("expected a 1-d state vector");
  return StateVector(std::vector<Complex>(a.data(), a.data() + a.shape(0)));
}

Hamiltonian hamiltonian_from_terms(int n, const py::list& terms) {
  std::vector<HamiltonianTerm> out;
  for (const auto& item : terms) {
    const auto pair = item.cast<py::tuple>();
    if (pair.size() != 2) throw ValidationError("terms are (coefficient, pauli string or matrix) pairs");
    const double c = pair[0].cast<double>();
    if (py::isinstance<py::str>(pair[1])) {
      out.push_back({c, PauliString(pair[1].cast<std::string>())});
    } else {
      out.push_back({c, from_numpy(pair[1].cast<py::array_t<Complex, py::array::c_style | py::array::forcecast>>())});
    }
  }
  return Hamiltonian(n, std::move(out));
}

ExperimentConfig config_with(const std::string& name, const py::dict& overrides) {
  Json j = Json::object();
  for (const auto& [k, v] : overrides) {
    j[k.cast<std::string>()] = Json::parse(py::module_::import("json").attr("dumps")(v).cast<std::string>());
  }
  return config_from_json(j, default_config(name));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Randomized product formulas for Hamiltonian simulation";
  m.attr("__version__") = QDRIFT_VERSION;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<Hamiltonian>(m, "Hamiltonian")
      .def(py::init(&hamiltonian_from_terms), py::arg("n"), py::arg("terms"))
      .def_property_readonly("num_qubits", &Hamiltonian::num_qubits)
      .def_property_readonly("num_terms", &Hamiltonian::num_terms)
      .def_property_readonly("lam", &Hamiltonian::lambda)
      .def_property_readonly("probabilities", &Hamiltonian::probabilities)
      .def_property_readonly("term_norms", &Hamiltonian::term_norms)
      .def("dense", [](const Hamiltonian& h) { return to_numpy(dense(h)); })
      .def("to_json", [](const Hamiltonian& h) { return hamiltonian_to_json(h).dump(); })
      .def_static("from_json", [](const std::string& s) { return hamiltonian_from_json(Json::parse(s)); })
      .def("__repr__", [](const Hamiltonian& h) {
        std::ostringstream os;
        os << "Hamiltonian(n=" << h.num_qubits() << ", terms=" << h.num_terms() << ", lambda=" << h.lambda() << ")";
        return os.str();
      });

  m.def("heisenberg_1d", &heisenberg_1d, py::arg("n"));
  m.def("single_site_z", &single_site_z, py::arg("n"), py::arg("scale") = 1.0);
  m.def(
      "all_z_strings",
      [](int n, double weight, std::optional<std::vector<int>> signs) {
        return signs ? all_z_strings(n, *signs, weight) : all_z_strings(n, weight);
      },
      py::arg("n"), py::arg("weight") = 1.0, py::arg("signs") = py::none());

  py::class_<ProductFormulaPlan>(m, "Plan")
      .def_property_readonly("steps",
                             [](const ProductFormulaPlan& p) {
                               py::list out;
                               for (const auto& s : p.steps) out.append(py::make_tuple(s.term, s.duration, s.rescaled));
                               return out;
                             })
      .def_property_readonly("method", [](const ProductFormulaPlan& p) { return p.meta.method; })
      .def_property_readonly("seed", [](const ProductFormulaPlan& p) { return p.meta.seed; })
      .def("__len__", [](const ProductFormulaPlan& p) { return p.steps.size(); })
      .def("to_json", [](const ProductFormulaPlan& p) { return plan_to_json(p).dump(); })
      .def_static("from_json", [](const std::string& s) { return plan_from_json(Json::parse(s)); });

  m.def(
      "qdrift_sample",
      [](const Hamiltonian& h, double t, std::uint64_t gates, std::uint64_t seed, std::uint64_t stream) {
        SeededRng rng(seed, stream);
        return qdrift_sample(h, t, gates, rng);
      },
      py::arg("h"), py::arg("t"), py::arg("gates"), py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("first_order_plan", &first_order_plan, py::arg("h"), py::arg("t"), py::arg("gates"));
  m.def("suzuki_plan", &suzuki_blocks_plan, py::arg("h"), py::arg("t"), py::arg("blocks") = 1, py::arg("order") = 1);
  m.def(
      "permuted_suzuki_plan",
      [](const Hamiltonian& h, double t, int blocks, int order, std::uint64_t seed) {
        SeededRng rng(seed);
        return permuted_suzuki_plan(h, t, blocks, order, rng);
      },
      py::arg("h"), py::arg("t"), py::arg("blocks") = 1, py::arg("order") = 1, py::arg("seed") = 0);
  m.def("suzuki_q", &suzuki_q, py::arg("p"));

  m.def("realize_unitary", [](const ProductFormulaPlan& p, const Hamiltonian& h) { return to_numpy(realize_unitary(p, h)); });
  m.def("exact_unitary", [](const Hamiltonian& h, double t) { return to_numpy(exact_unitary(h, t)); });
  m.def("apply_plan", [](const ProductFormulaPlan& p, const Hamiltonian& h, const py::array_t<Complex>& psi) {
    return state_to_numpy(apply_plan(p, h, state_from_numpy(psi)));
  });

  m.def("worst_case_error", [](const py::array_t<Complex>& u, const py::array_t<Complex>& v) {
    return worst_case_error(from_numpy(u), from_numpy(v));
  });
  m.def("diamond_distance", [](const py::array_t<Complex>& u, const py::array_t<Complex>& v) {
    return unitary_diamond_distance(from_numpy(u), from_numpy(v));
  });
  m.def(
      "error_decomposition",
      [](const Hamiltonian& h, double t, std::uint64_t gates, const ProductFormulaPlan& p) {
        const ErrorReport r = error_decomposition(h, t, gates, p);
        return py::dict(py::arg("bias") = r.bias, py::arg("fluctuation") = r.fluctuation, py::arg("total") = r.total);
      },
      py::arg("h"), py::arg("t"), py::arg("gates"), py::arg("plan"));

  m.def("bias_bound", &bias_bound, py::arg("t"), py::arg("lam"), py::arg("gates"));
  m.def("freedman_tail", &freedman_tail, py::arg("tau"), py::arg("t"), py::arg("lam"), py::arg("gates"),
        py::arg("num_qubits"));
  m.def("vector_tail_trace", &vector_tail_trace, py::arg("eps"), py::arg("t"), py::arg("lam"), py::arg("gates"));
  m.def(
      "gate_counts",
      [](double eps, double delta, double t, double lam, int n) {
        const GateCounts c = gate_counts(eps, delta, t, lam, n);
        return py::dict(py::arg("worst_case") = c.worst_case, py::arg("fixed_input") = c.fixed_input,
                        py::arg("average") = c.average);
      },
      py::arg("eps"), py::arg("delta"), py::arg("t"), py::arg("lam"), py::arg("num_qubits"));

  m.def(
      "run_experiment",
      [](const std::string& name, const py::dict& overrides) {
        const ExperimentConfig cfg = config_with(name, overrides);
        ResultTable table;
        {
          py::gil_scoped_release release;
          table = run_experiment(cfg);
        }
        return table.to_csv();
      },
      py::arg("name"), py::arg("overrides") = py::dict(),
      "Run a named experiment and return its CSV text. `overrides` uses the JSON config keys.");
}
