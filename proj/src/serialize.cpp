#include "qdrift/serialize.hpp"

#include <cmath>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("key '") + key + "' has the wrong type");
  }
}

}  // namespace

Json hamiltonian_to_json(const Hamiltonian& h) {
  Json terms = Json::array();
  for (const auto& term : h.terms()) {
    Json t{{"coeff", term.coefficient}};
    if (term.is_pauli()) {
      t["pauli"] = term.pauli().letters();
    } else {
      Json m = Json::array();
      for (const Complex& z : term.matrix().data()) m.push_back({z.real(), z.imag()});
      t["matrix"] = std::move(m);
    }
    terms.push_back(std::move(t));
  }
  return Json{{"n", h.num_qubits()}, {"terms", std::move(terms)}};
}

Hamiltonian hamiltonian_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("hamiltonian: expected an object");
  const int n = field<int>(j, "n");
  if (!j.contains("terms") || !j["terms"].is_array()) throw ValidationError("hamiltonian: 'terms' must be an array");
  std::vector<HamiltonianTerm> terms;
  for (const auto& t : j["terms"]) {
    HamiltonianTerm term;
    term.coefficient = field<double>(t, "coeff");
    if (t.contains("pauli")) {
      term.op = PauliString(field<std::string>(t, "pauli"));
    } else if (t.contains("matrix")) {
      const auto& m = t["matrix"];
      if (!m.is_array()) throw ValidationError("hamiltonian: 'matrix' must be an array");
      const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(m.size()))));
      if (dim * dim != m.size()) throw ValidationError("hamiltonian: 'matrix' must hold d*d entries");
      std::vector<Complex> entries;
      entries.reserve(m.size());
      for (const auto& z : m) {
        if (!z.is_array() || z.size() != 2) throw ValidationError("hamiltonian: matrix entries are [re, im]");
        entries.emplace_back(z[0].get<double>(), z[1].get<double>());
      }
      term.op = ComplexMatrix(dim, std::move(entries));
    } else {
      throw ValidationError("hamiltonian: each term needs 'pauli' or 'matrix'");
    }
    terms.push_back(std::move(term));
  }
  return Hamiltonian(n, std::move(terms));
}

Json plan_to_json(const ProductFormulaPlan& plan) {
  Json steps = Json::array();
  for (const auto& s : plan.steps) {
    steps.push_back({{"term", s.term}, {"duration", s.duration}, {"rescaled", s.rescaled}});
  }
  const auto& m = plan.meta;
  return Json{{"method", m.method},       {"t", m.t},
              {"gates", m.gates},         {"order", m.order},
              {"blocks", m.blocks},       {"seed", m.seed},
              {"stream", m.stream},       {"hamiltonian", m.hamiltonian_fingerprint},
              {"steps", std::move(steps)}};
}

ProductFormulaPlan plan_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("plan: expected an object");
  ProductFormulaPlan plan;
  plan.meta.method = j.value("method", std::string("custom"));
  plan.meta.t = j.value("t", 0.0);
  plan.meta.gates = j.value("gates", std::uint64_t{0});
  plan.meta.order = j.value("order", 0);
  plan.meta.blocks = j.value("blocks", 0);
  plan.meta.seed = j.value("seed", std::uint64_t{0});
  plan.meta.stream = j.value("stream", std::uint64_t{0});
  plan.meta.hamiltonian_fingerprint = j.value("hamiltonian", std::string());
  if (!j.contains("steps") || !j["steps"].is_array()) throw ValidationError("plan: 'steps' must be an array");
  for (const auto& s : j["steps"]) {
    plan.steps.push_back({field<std::size_t>(s, "term"), field<double>(s, "duration"), s.value("rescaled", false)});
  }
  return plan;
}

Json error_report_to_json(const ErrorReport& r) {
  return Json{{"kind", to_string(r.kind)}, {"bias", r.bias}, {"fluctuation", r.fluctuation}, {"total", r.total}};
}

Json gate_counts_to_json(const GateCounts& c) {
  return Json{{"worst_case", c.worst_case},
              {"fixed_input", c.fixed_input},
              {"average", c.average},
              {"worst_case_real", c.worst_case_real},
              {"fixed_input_real", c.fixed_input_real},
              {"average_real", c.average_real}};
}

Json config_to_json(const ExperimentConfig& cfg) {
  return Json{{"experiment", cfg.experiment},
              {"model", cfg.model},
              {"n", cfg.n_values},
              {"t", cfg.t},
              {"gates", cfg.gates},
              {"reps", cfg.reps},
              {"seed", cfg.seed},
              {"method", cfg.method},
              {"order", cfg.order},
              {"blocks", cfg.blocks},
              {"metrics", cfg.metrics},
              {"workers", cfg.workers},
              {"eps", cfg.eps},
              {"eps_grid", cfg.eps_grid},
              {"signs", cfg.signs},
              {"per_basis_rows", cfg.per_basis_rows}};
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig cfg) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key == "experiment") cfg.experiment = field<std::string>(j, "experiment");
    else if (key == "model") cfg.model = field<std::string>(j, "model");
    else if (key == "n") cfg.n_values = j["n"].is_array() ? field<std::vector<int>>(j, "n") : std::vector<int>{field<int>(j, "n")};
    else if (key == "t") cfg.t = field<double>(j, "t");
    else if (key == "gates") cfg.gates = j["gates"].is_array() ? field<std::vector<std::uint64_t>>(j, "gates")
                                                              : std::vector<std::uint64_t>{field<std::uint64_t>(j, "gates")};
    else if (key == "reps") cfg.reps = field<int>(j, "reps");
    else if (key == "seed") cfg.seed = field<std::uint64_t>(j, "seed");
    else if (key == "method") cfg.method = field<std::string>(j, "method");
    else if (key == "order") cfg.order = field<int>(j, "order");
    else if (key == "blocks") cfg.blocks = field<int>(j, "blocks");
    else if (key == "metrics") cfg.metrics = field<std::vector<std::string>>(j, "metrics");
    else if (key == "workers") cfg.workers = field<int>(j, "workers");
    else if (key == "eps") cfg.eps = field<double>(j, "eps");
    else if (key == "eps_grid") cfg.eps_grid = field<std::vector<double>>(j, "eps_grid");
    else if (key == "signs") cfg.signs = field<std::string>(j, "signs");
    else if (key == "per_basis_rows") cfg.per_basis_rows = field<bool>(j, "per_basis_rows");
    else throw ValidationError("config: unknown key '" + key + "'");
  }
  return cfg;
}

Json summary_to_json(const ExperimentConfig& cfg, const ResultTable& table) {
  Json metrics = Json::object();
  for (const auto& [name, s] : summarize(table)) {
    metrics[name] = {{"mean", s.mean}, {"std", s.std}, {"count", s.count}};
  }
  Json aggregates = Json::object();
  for (const auto& row : table.rows()) {
    if (row.rep >= 0) continue;
    aggregates[row.metric + "@n=" + std::to_string(row.n) + ",N=" + std::to_string(row.gates)] = row.value;
  }
  return Json{{"version", QDRIFT_VERSION},
              {"rng", SeededRng::algorithm()},
              {"config", config_to_json(cfg)},
              {"metrics", std::move(metrics)},
              {"aggregates", std::move(aggregates)}};
}

}  // namespace qdrift
