// qdrift: sample randomized product formulas, evaluate bounds, run the
// Monte Carlo experiments and plot their CSV output.
//
// Exit codes: 0 success, 1 numeric failure, 2 invalid input.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qdrift/errors.hpp"
#include "qdrift/experiments.hpp"
#include "qdrift/formulas.hpp"
#include "qdrift/metrics.hpp"
#include "qdrift/plot.hpp"
#include "qdrift/serialize.hpp"

using namespace qdrift;

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitValidation = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(what + ": " + e.what());
  }
}

struct SimulateArgs {
  std::string model = "heisenberg";
  std::string hamiltonian_path;
  int n = 4;
  double t = 2.0;
  std::string method = "qdrift";
  std::uint64_t gates = 160;
  int order = 1;
  int blocks = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  const Hamiltonian h = a.hamiltonian_path.empty()
                            ? make_model(a.model, a.n)
                            : hamiltonian_from_json(parse_json(read_file(a.hamiltonian_path), "--hamiltonian"));
  if (h.num_qubits() > kMaxDenseQubits) throw ValidationError("--n: simulate is limited to n <= 12");

  ExperimentConfig cfg;
  cfg.experiment = "fig3-gatecount";
  cfg.t = a.t;
  cfg.method = a.method;
  cfg.order = a.order;
  cfg.blocks = a.blocks;
  SeededRng rng(a.seed);
  const ProductFormulaPlan plan = make_plan(cfg, h, a.gates, rng);

  ErrorReport report;
  if (a.method == "qdrift") {
    report = error_decomposition(h, a.t, a.gates, plan);
  } else {
    // A deterministic plan is its own expectation.
    report.total = worst_case_error(exact_unitary(h, a.t), realize_unitary(plan, h));
    report.bias = report.total;
  }

  Json report_json = error_report_to_json(report);
  if (a.method == "permuted-suzuki") {
    // The mean over permutations has no cheap closed form; only the total is reported.
    report_json["bias"] = nullptr;
    report_json["fluctuation"] = nullptr;
  }
  Json out{{"version", QDRIFT_VERSION},
           {"inputs",
            {{"model", a.hamiltonian_path.empty() ? a.model : a.hamiltonian_path},
             {"n", h.num_qubits()},
             {"t", a.t},
             {"method", a.method},
             {"gates", a.gates},
             {"order", a.order},
             {"blocks", a.blocks},
             {"seed", a.seed}}},
           {"lambda", h.lambda()},
           {"bias_bound", a.method == "qdrift" ? Json(bias_bound(a.t, h.lambda(), a.gates)) : Json(nullptr)},
           {"report", report_json},
           {"plan", plan_to_json(plan)}};
  write_file(a.out, out.dump(2) + "\n");
  return 0;
}

struct BoundsArgs {
  double t = 2.0;
  double lambda = 3.0;
  int n = 4;
  double eps = 0.5;
  double delta = 0.1;
  std::uint64_t gates = 0;
  double prefactor = 1.0;
  std::string out;
};

int run_bounds(const BoundsArgs& a) {
  const GateCounts counts = gate_counts(a.eps, a.delta, a.t, a.lambda, a.n);
  const std::uint64_t gates = a.gates ? a.gates : counts.worst_case;
  const double step = step_radius_bound(a.t, a.lambda, gates);
  const Theorem3Bounds th3 =
      theorem3_bounds(BoundParams::uniform(gates, step, step_bias_bound(a.t, a.lambda, gates), a.n), a.prefactor);
  Json out{{"version", QDRIFT_VERSION},
           {"inputs",
            {{"t", a.t}, {"lambda", a.lambda}, {"n", a.n}, {"eps", a.eps}, {"delta", a.delta}, {"gates", gates},
             {"prefactor", a.prefactor}}},
           {"gate_counts", gate_counts_to_json(counts)},
           {"bias_bound", bias_bound(a.t, a.lambda, gates)},
           {"step_bias_bound", step_bias_bound(a.t, a.lambda, gates)},
           {"step_radius_bound", step},
           {"tails",
            {{"freedman_half_eps", freedman_tail(a.eps / 2.0, a.t, a.lambda, gates, a.n)},
             {"freedman_simplified", freedman_tail_simplified(a.eps, a.t, a.lambda, gates, a.n)},
             {"vector_l2", vector_tail_l2(a.eps, a.t, a.lambda, gates)},
             {"vector_trace", vector_tail_trace(a.eps, a.t, a.lambda, gates)}}},
           {"theorem3", {{"worst", th3.worst}, {"typical", th3.typical}, {"fixed", th3.fixed}, {"average", th3.average}}},
           {"expected_error_estimate", expected_diamond_error_estimate(a.t, a.lambda, gates, a.n, a.prefactor)}};
  const std::string text = out.dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_file(a.out, text);
  }
  return 0;
}

struct ExperimentArgs {
  std::string name;
  std::string config_path;
  std::vector<int> n;
  int nmin = 0;
  int nmax = 0;
  double t = 0.0;
  std::vector<std::uint64_t> gates;
  int reps = 0;
  std::uint64_t seed = 0;
  std::string method;
  int order = 0;
  int blocks = 0;
  std::vector<std::string> metrics;
  int workers = 1;
  double eps = 0.0;
  std::vector<double> eps_grid;
  std::string signs;
  std::string out;
  std::string summary;
};

int run_experiment_cmd(const ExperimentArgs& a, CLI::App& sub) {
  ExperimentConfig cfg = default_config(a.name);
  bool config_gates = false;
  if (!a.config_path.empty()) {
    const Json j = parse_json(read_file(a.config_path), "--config");
    if (j.contains("experiment") && j["experiment"] != a.name) {
      throw ValidationError("--config: experiment '" + j["experiment"].get<std::string>() + "' does not match '" +
                            a.name + "'");
    }
    cfg = config_from_json(j, cfg);
    config_gates = j.contains("gates");
  }
  auto given = [&](const char* flag) { return sub.get_option(flag)->count() > 0; };
  if (given("--n")) cfg.n_values = a.n;
  if (given("--nmin") || given("--nmax")) {
    const int lo = given("--nmin") ? a.nmin : cfg.n_values.front();
    const int hi = given("--nmax") ? a.nmax : cfg.n_values.back();
    if (lo > hi) throw ValidationError("--nmin: must not exceed --nmax");
    cfg.n_values.clear();
    for (int n = lo; n <= hi; ++n) cfg.n_values.push_back(n);
  }
  if (given("--t")) cfg.t = a.t;
  if (given("--gates")) {
    cfg.gates = a.gates;
  } else if (a.name == "ghz" && !config_gates) {
    // Largest qDRIFT plan that can never touch n/2 sites.
    const int nmin = *std::min_element(cfg.n_values.begin(), cfg.n_values.end());
    cfg.gates = {static_cast<std::uint64_t>(std::max(1, nmin / 2 - 1))};
  }
  if (given("--reps")) cfg.reps = a.reps;
  if (given("--seed")) cfg.seed = a.seed;
  if (given("--method")) cfg.method = a.method;
  if (given("--order")) cfg.order = a.order;
  if (given("--blocks")) cfg.blocks = a.blocks;
  if (given("--metrics")) cfg.metrics = a.metrics;
  if (given("--workers")) cfg.workers = a.workers;
  if (given("--eps")) cfg.eps = a.eps;
  if (given("--eps-grid")) cfg.eps_grid = a.eps_grid;
  if (given("--signs")) cfg.signs = a.signs;
  if (given("--per-basis")) cfg.per_basis_rows = true;
  cfg.validate();

  const ResultTable table = run_experiment(cfg);
  if (a.out.empty()) {
    table.write_csv(std::cout);
  } else {
    write_file(a.out, table.to_csv());
  }
  if (!a.summary.empty()) write_file(a.summary, summary_to_json(cfg, table).dump(2) + "\n");
  return 0;
}

struct PlotArgs {
  std::string csv;
  std::string out;
  PlotOptions options;
};

int run_plot(const PlotArgs& a) {
  const std::string text = read_file(a.csv);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("plot: '" + a.csv + "' is empty");
  const ResultTable table = ResultTable::parse_csv(text);
  if (table.size() == 0) throw ValidationError("plot: '" + a.csv + "' has no data rows");
  write_file(a.out, render_svg(table, a.options));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized product formulas: sampling, error bounds and experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", QDRIFT_VERSION);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample one plan and report its error decomposition");
  simulate->add_option("--model", sim.model, "Built-in model")
      ->check(CLI::IsMember({"heisenberg", "single-site-z", "all-z-strings"}));
  simulate->add_option("--hamiltonian", sim.hamiltonian_path, "Hamiltonian JSON file (overrides --model)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--n", sim.n, "Qubits")->check(CLI::Range(1, kMaxDenseQubits));
  simulate->add_option("--t", sim.t, "Evolution time")->check(CLI::NonNegativeNumber);
  simulate->add_option("--method", sim.method)->check(CLI::IsMember({"qdrift", "first-order", "suzuki", "permuted-suzuki"}));
  simulate->add_option("--gates", sim.gates, "Gate count N")->check(CLI::PositiveNumber);
  simulate->add_option("--order", sim.order, "Suzuki order parameter p")->check(CLI::PositiveNumber);
  simulate->add_option("--blocks", sim.blocks, "Suzuki blocks r")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed);
  simulate->add_option("--out", sim.out, "Output JSON path")->required();

  BoundsArgs bnd;
  auto* bounds = app.add_subcommand("bounds", "Print gate counts and tail bounds as JSON");
  bounds->add_option("--t", bnd.t)->check(CLI::NonNegativeNumber);
  bounds->add_option("--lambda", bnd.lambda)->check(CLI::NonNegativeNumber);
  bounds->add_option("--n", bnd.n)->check(CLI::Range(1, 64));
  bounds->add_option("--eps", bnd.eps)->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--delta", bnd.delta)->check(CLI::Range(0.0, 1.0));
  bounds->add_option("--gates", bnd.gates, "N for the tail values (default: worst-case count)");
  bounds->add_option("--prefactor", bnd.prefactor, "Constant for the suppressed-constant bounds")
      ->check(CLI::NonNegativeNumber);
  bounds->add_option("--out", bnd.out);

  ExperimentArgs ex;
  auto* experiment = app.add_subcommand("experiment", "Run a named Monte Carlo experiment");
  experiment->add_option("name", ex.name)
      ->required()
      ->check(CLI::IsMember({"fig3-gatecount", "fig3-systemsize", "ghz", "diagonal-union", "tails",
                             "saturation-single", "saturation-many", "suzuki"}));
  experiment->add_option("--config", ex.config_path, "JSON config; flags override it")->check(CLI::ExistingFile);
  experiment->add_option("--n", ex.n)->delimiter(',');
  experiment->add_option("--nmin", ex.nmin)->check(CLI::PositiveNumber);
  experiment->add_option("--nmax", ex.nmax)->check(CLI::PositiveNumber);
  experiment->add_option("--t", ex.t)->check(CLI::NonNegativeNumber);
  experiment->add_option("--gates", ex.gates)->delimiter(',');
  experiment->add_option("--reps", ex.reps)->check(CLI::PositiveNumber);
  experiment->add_option("--seed", ex.seed);
  experiment->add_option("--method", ex.method);
  experiment->add_option("--order", ex.order);
  experiment->add_option("--blocks", ex.blocks);
  experiment->add_option("--metrics", ex.metrics)->delimiter(',');
  experiment->add_option("--workers", ex.workers, "Parallel repetitions")->check(CLI::PositiveNumber);
  experiment->add_option("--eps", ex.eps);
  experiment->add_option("--eps-grid", ex.eps_grid)->delimiter(',');
  experiment->add_option("--signs", ex.signs);
  experiment->add_flag("--per-basis", "Emit one deviation row per basis state (diagonal-union)");
  experiment->add_option("--out", ex.out, "CSV path (default: stdout)");
  experiment->add_option("--summary", ex.summary, "Summary JSON path");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "Render a results CSV as an SVG line chart");
  plot->add_option("csv", pl.csv)->required()->check(CLI::ExistingFile);
  plot->add_option("--out", pl.out)->required();
  plot->add_option("--x", pl.options.x)->check(CLI::IsMember({"auto", "N", "n"}));
  plot->add_option("--scale", pl.options.scale)->check(CLI::IsMember({"auto", "log", "linear"}));
  plot->add_option("--xlabel", pl.options.xlabel);
  plot->add_option("--ylabel", pl.options.ylabel);
  plot->add_option("--title", pl.options.title);
  plot->add_option("--metrics", pl.options.metrics)->delimiter(',');
  plot->add_option("--reference", pl.options.references)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*bounds) return run_bounds(bnd);
    if (*experiment) return run_experiment_cmd(ex, *experiment);
    if (*plot) return run_plot(pl);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitValidation;
}
