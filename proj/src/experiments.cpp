#include "qdrift/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "qdrift/errors.hpp"
#include "qdrift/metrics.hpp"

namespace qdrift {

namespace {

const std::set<std::string> kMetrics{"worst-case", "fixed-input", "fixed-input-trace"};
const std::set<std::string> kMethods{"qdrift", "first-order", "suzuki", "permuted-suzuki"};
const std::set<std::string> kExperiments{"fig3-gatecount",    "fig3-systemsize", "ghz",
                                         "diagonal-union",    "tails",
                                         "saturation-single", "saturation-many", "suzuki"};

// Runs fn(rep) for rep in [0, reps) on up to `workers` threads. Callers write
// into per-rep slots, so results never depend on scheduling.
template <class Fn>
void for_each_rep(int reps, int workers, Fn&& fn) {
  const int threads = std::clamp(workers, 1, std::max(reps, 1));
  if (threads == 1) {
    for (int r = 0; r < reps; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < reps; r = next++) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = reps;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t grid_key(int n, std::uint64_t gates, std::uint64_t salt) {
  return splitmix64((static_cast<std::uint64_t>(n) << 48) ^ gates ^ (salt << 56));
}

// Stream for plan sampling, and an independent one for input states.
SeededRng plan_rng(std::uint64_t seed, int n, std::uint64_t gates, int rep) {
  return SeededRng(seed, grid_key(n, gates, 1)).substream(rep);
}
SeededRng state_rng(std::uint64_t seed, int n, std::uint64_t gates, int rep) {
  return SeededRng(seed, grid_key(n, gates, 2)).substream(rep);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string grid_label(const char* name, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s@eps=%.6g", name, v);
  return buf;
}

struct RowSink {
  const ExperimentConfig& cfg;
  ResultTable& table;
  void add(int n, std::uint64_t gates, long long rep, std::string metric, double value) const {
    table.add({cfg.experiment, cfg.model, n, gates, rep, cfg.seed, std::move(metric), value});
  }
};

std::vector<double> default_eps_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 40; ++k) grid.push_back(0.05 * k);
  return grid;
}

double survival(std::span<const double> samples, double eps) {
  const auto hits = std::count_if(samples.begin(), samples.end(), [&](double x) { return x >= eps; });
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<int> sign_pattern(int n, std::string_view kind, std::uint64_t seed) {
  std::vector<int> signs(std::size_t{1} << n, 1);
  if (kind == "random") {
    SeededRng rng(seed, 0x5167);
    for (int& s : signs) s = rng.uniform_index(2) ? 1 : -1;
  } else if (kind != "plus") {
    throw ValidationError("signs: expected 'plus' or 'random'");
  }
  return signs;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!kExperiments.count(experiment)) throw ValidationError("experiment: unknown name '" + experiment + "'");
  if (model.find(',') != std::string::npos) throw ValidationError("model: must not contain ','");
  if (n_values.empty()) throw ValidationError("n: grid must be nonempty");
  for (int n : n_values) {
    if (n < 1 || n > kMaxStateQubits) throw ValidationError("n: each value must lie in [1, 24]");
  }
  if (!std::isfinite(t) || t < 0.0) throw ValidationError("t: must be finite and >= 0");
  if (gates.empty()) throw ValidationError("gates: grid must be nonempty");
  for (auto g : gates) {
    if (g < 1) throw ValidationError("gates: each value must be >= 1");
  }
  if (reps < 1) throw ValidationError("reps: must be >= 1");
  if (workers < 1) throw ValidationError("workers: must be >= 1");
  if (!kMethods.count(method)) throw ValidationError("method: unknown '" + method + "'");
  if (order < 1) throw ValidationError("order: must be >= 1");
  if (blocks < 1) throw ValidationError("blocks: must be >= 1");
  if (metrics.empty()) throw ValidationError("metrics: must be nonempty");
  for (const auto& m : metrics) {
    if (!kMetrics.count(m)) throw ValidationError("metrics: unknown '" + m + "'");
  }
  if (!(eps > 0.0)) throw ValidationError("eps: must be > 0");
  for (double e : eps_grid) {
    if (!(e >= 0.0)) throw ValidationError("eps-grid: values must be >= 0");
  }
  if (signs != "plus" && signs != "random") throw ValidationError("signs: expected 'plus' or 'random'");
}

ExperimentConfig default_config(std::string_view experiment) {
  ExperimentConfig cfg;
  cfg.experiment = std::string(experiment);
  if (experiment == "fig3-gatecount") {
    cfg.gates = {10, 20, 40, 80, 160, 320, 640};
  } else if (experiment == "fig3-systemsize") {
    cfg.n_values = {4, 5, 6, 7, 8};
  } else if (experiment == "ghz") {
    cfg.model = "single-site-z";
    cfg.n_values = {8};
    cfg.t = kGhzTime;
    cfg.gates = {3};
    cfg.reps = 10;
  } else if (experiment == "diagonal-union") {
    cfg.model = "all-z-strings";
    cfg.n_values = {8};
    cfg.t = 1.0;
    cfg.gates = {32};
    cfg.reps = 200;
  } else if (experiment == "tails") {
    cfg.reps = 1000;
  } else if (experiment == "saturation-single") {
    cfg.model = "single-site-z";
    cfg.n_values = {8};
    cfg.t = 1.0;
    cfg.gates = {10000};
    cfg.reps = 500;
  } else if (experiment == "saturation-many") {
    cfg.model = "all-z-strings";
    cfg.n_values = {6};
    cfg.gates = {10000};
    cfg.t = 0.1 * std::sqrt(10000.0) / 64.0;
    cfg.reps = 500;
  } else if (experiment == "suzuki") {
    cfg.t = 1.0;
    cfg.blocks = 4;
    cfg.reps = 20;
    cfg.metrics = {"worst-case"};
  } else {
    throw ValidationError("experiment: unknown name '" + std::string(experiment) + "'");
  }
  return cfg;
}

void ResultTable::append(const ResultTable& other) {
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
}

std::vector<double> ResultTable::select(std::string_view metric, std::optional<int> n,
                                        std::optional<std::uint64_t> gates, bool aggregates) const {
  std::vector<double> out;
  for (const auto& row : rows_) {
    if (row.metric != metric) continue;
    if ((row.rep < 0) != aggregates) continue;
    if (n && row.n != *n) continue;
    if (gates && row.gates != *gates) continue;
    out.push_back(row.value);
  }
  return out;
}

double ResultTable::aggregate(std::string_view metric, std::optional<int> n,
                              std::optional<std::uint64_t> gates) const {
  const auto v = select(metric, n, gates, true);
  if (v.size() != 1) {
    throw ValidationError("aggregate: expected one row for '" + std::string(metric) + "', found " +
                          std::to_string(v.size()));
  }
  return v.front();
}

void ResultTable::write_csv(std::ostream& os) const {
  os << kCsvHeader << '\n';
  for (const auto& r : rows_) {
    os << r.experiment << ',' << r.model << ',' << r.n << ',' << r.gates << ',' << r.rep << ','
       << r.seed << ',' << r.metric << ',' << format_double(r.value) << '\n';
  }
}

std::string ResultTable::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

ResultTable ResultTable::parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ValidationError("csv: unexpected header '" + line + "'");
  ResultTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 8) throw ValidationError("csv: line " + std::to_string(lineno) + " has " +
                                             std::to_string(f.size()) + " fields");
    try {
      table.add({f[0], f[1], std::stoi(f[2]), std::stoull(f[3]), std::stoll(f[4]), std::stoull(f[5]),
                 f[6], std::stod(f[7])});
    } catch (const std::logic_error&) {
      throw ValidationError("csv: malformed number on line " + std::to_string(lineno));
    }
  }
  return table;
}

double Summary::standard_error() const {
  return count > 0 ? std / std::sqrt(static_cast<double>(count)) : 0.0;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(s.count - 1));
  }
  return s;
}

std::map<std::string, Summary> summarize(const ResultTable& table) {
  std::map<std::string, std::vector<double>> groups;
  for (const auto& r : table.rows()) {
    if (r.rep < 0) continue;
    groups[r.metric + "@n=" + std::to_string(r.n) + ",N=" + std::to_string(r.gates)].push_back(r.value);
  }
  std::map<std::string, Summary> out;
  for (const auto& [key, values] : groups) out[key] = summarize(values);
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("loglog_slope: need >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw ValidationError("loglog_slope: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ValidationError("loglog_slope: x values must differ");
  return sxy / sxx;
}

Hamiltonian make_model(std::string_view model, int n) {
  if (model == "heisenberg") return heisenberg_1d(n);
  if (model == "single-site-z") return single_site_z(n, 1.0);
  if (model == "all-z-strings") return all_z_strings(n, 1.0);
  throw ValidationError("model: unknown '" + std::string(model) + "'");
}

StateVector random_product_state(int n, SeededRng& rng) {
  if (n < 1 || n > kMaxStateQubits) throw ValidationError("random_product_state: n must lie in [1, 24]");
  std::vector<Complex> amps{Complex{1.0, 0.0}};
  for (int q = 0; q < n; ++q) {
    Complex a{rng.normal(), rng.normal()};
    Complex b{rng.normal(), rng.normal()};
    const double norm = std::sqrt(std::norm(a) + std::norm(b));
    a /= norm;
    b /= norm;
    // Qubit q becomes the next less significant bit.
    std::vector<Complex> next(amps.size() * 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      next[2 * i] = amps[i] * a;
      next[2 * i + 1] = amps[i] * b;
    }
    amps.swap(next);
  }
  return StateVector(std::move(amps));
}

std::uint64_t CountStats::total() const { return std::accumulate(m.begin(), m.end(), std::uint64_t{0}); }

CountStats count_stats(const ProductFormulaPlan& plan, const Hamiltonian& h) {
  CountStats c;
  c.m.assign(h.num_terms(), 0);
  for (const auto& step : plan.steps) {
    if (step.term >= h.num_terms()) throw ValidationError("count_stats: term index out of range");
    ++c.m[step.term];
  }
  const double n = static_cast<double>(plan.steps.size());
  c.s.resize(c.m.size());
  for (std::size_t j = 0; j < c.m.size(); ++j) {
    c.s[j] = n > 0 ? (static_cast<double>(c.m[j]) - n * h.probabilities()[j]) / std::sqrt(n) : 0.0;
  }
  return c;
}

ProductFormulaPlan make_plan(const ExperimentConfig& cfg, const Hamiltonian& h, std::uint64_t gates,
                             SeededRng& rng) {
  if (cfg.method == "qdrift") return qdrift_sample(h, cfg.t, gates, rng);
  if (cfg.method == "first-order") return first_order_plan(h, cfg.t, gates);
  if (cfg.method == "suzuki") return suzuki_blocks_plan(h, cfg.t, cfg.blocks, cfg.order);
  if (cfg.method == "permuted-suzuki") return permuted_suzuki_plan(h, cfg.t, cfg.blocks, cfg.order, rng);
  throw ValidationError("method: unknown '" + cfg.method + "'");
}

namespace {

void require_dense_grid(const ExperimentConfig& cfg) {
  for (int n : cfg.n_values) {
    if (n > kMaxDenseQubits) throw ValidationError("n: dense experiments require n <= 12");
  }
}

// One row per (rep, metric) at a single (n, N), in rep-major order.
void sample_errors(const ExperimentConfig& cfg, const Hamiltonian& h, const ComplexMatrix& u,
                   std::uint64_t gates, ResultTable& table) {
  const int n = h.num_qubits();
  std::vector<std::vector<double>> per_rep(cfg.reps);
  for_each_rep(cfg.reps, cfg.workers, [&](int rep) {
    SeededRng rng = plan_rng(cfg.seed, n, gates, rep);
    const ProductFormulaPlan plan = make_plan(cfg, h, gates, rng);
    SeededRng srng = state_rng(cfg.seed, n, gates, rep);
    const StateVector psi = random_product_state(n, srng);
    const StateVector upsi = apply(u, psi);
    const StateVector vpsi = apply_plan(plan, h, psi);
    auto& out = per_rep[rep];
    for (const auto& m : cfg.metrics) {
      if (m == "worst-case") {
        out.push_back(worst_case_error(u, realize_unitary(plan, h)));
      } else if (m == "fixed-input") {
        out.push_back(l2_distance(upsi, vpsi));
      } else {
        out.push_back(pure_trace_distance(upsi, vpsi));
      }
    }
  });
  RowSink sink{cfg, table};
  for (int rep = 0; rep < cfg.reps; ++rep) {
    for (std::size_t k = 0; k < cfg.metrics.size(); ++k) sink.add(n, gates, rep, cfg.metrics[k], per_rep[rep][k]);
  }
  for (std::size_t k = 0; k < cfg.metrics.size(); ++k) {
    std::vector<double> col(cfg.reps);
    for (int rep = 0; rep < cfg.reps; ++rep) col[rep] = per_rep[rep][k];
    const Summary s = summarize(col);
    sink.add(n, gates, -1, cfg.metrics[k] + ".mean", s.mean);
    sink.add(n, gates, -1, cfg.metrics[k] + ".std", s.std);
  }
}

}  // namespace

ResultTable run_error_vs_gatecount(const ExperimentConfig& cfg) {
  cfg.validate();
  require_dense_grid(cfg);
  ResultTable table;
  for (int n : cfg.n_values) {
    const Hamiltonian h = make_model(cfg.model, n);
    const ComplexMatrix u = exact_unitary(h, cfg.t);
    for (auto gates : cfg.gates) sample_errors(cfg, h, u, gates, table);
  }
  return table;
}

ResultTable run_error_vs_systemsize(const ExperimentConfig& cfg) {
  cfg.validate();
  require_dense_grid(cfg);
  ResultTable table;
  const std::uint64_t gates = cfg.gates.front();
  for (int n : cfg.n_values) {
    const Hamiltonian h = make_model(cfg.model, n);
    sample_errors(cfg, h, exact_unitary(h, cfg.t), gates, table);
  }
  RowSink sink{cfg, table};
  const int n0 = cfg.n_values.front();
  for (const auto& m : cfg.metrics) {
    const double ref = table.aggregate(m + ".mean", n0, gates);
    for (int n : cfg.n_values) {
      const double ratio = ref > 0.0 ? table.aggregate(m + ".mean", n, gates) / ref : 0.0;
      const double ratio_std = ref > 0.0 ? table.aggregate(m + ".std", n, gates) / ref : 0.0;
      sink.add(n, gates, -1, m + ".ratio", ratio);
      sink.add(n, gates, -1, m + ".ratio-std", ratio_std);
    }
  }
  for (int n : cfg.n_values) {
    sink.add(n, gates, -1, "reference.sqrt-n-ratio", std::sqrt(static_cast<double>(n) / n0));
  }
  return table;
}

Hamiltonian ghz_hamiltonian(int n) { return single_site_z(n, 1.0 / n); }

GhzResult ghz_probe(int n, const ProductFormulaPlan& plan, std::span<const int> hidden) {
  if (n < 1 || n > kMaxStateQubits) throw ValidationError("ghz: n must lie in [1, 24]");
  const Hamiltonian h = ghz_hamiltonian(n);
  std::set<int> touched;
  for (const auto& step : plan.steps) {
    if (step.term >= h.num_terms()) throw ValidationError("ghz: plan step addresses a missing site");
    touched.insert(static_cast<int>(step.term));
  }
  std::uint64_t hidden_mask = 0;
  for (int q : hidden) {
    if (q < 0 || q >= n) throw ValidationError("ghz: hidden site out of range");
    hidden_mask |= std::uint64_t{1} << (n - 1 - q);
  }

  std::vector<Complex> amps(h.dim());
  const double amp = hidden_mask ? 1.0 / std::sqrt(2.0) : 1.0;
  amps[0] += amp;
  if (hidden_mask) amps[hidden_mask] += amp;
  GhzResult res;
  res.state = StateVector(std::move(amps));

  const auto target = target_phases(h, kGhzTime);
  const auto realized = plan_phases(plan, h);
  std::vector<Complex> u(h.dim()), v(h.dim());
  for (std::size_t b = 0; b < h.dim(); ++b) {
    u[b] = std::polar(1.0, -target[b]) * res.state[b];
    v[b] = std::polar(1.0, -realized[b]) * res.state[b];
  }
  res.distance = pure_trace_distance(StateVector(std::move(u)), StateVector(std::move(v)));
  res.touched.assign(touched.begin(), touched.end());
  res.hidden.assign(hidden.begin(), hidden.end());
  return res;
}

GhzResult ghz_counterexample(int n, const ProductFormulaPlan& plan) {
  if (n < 2 || n % 2 != 0) throw ValidationError("ghz: n must be even and >= 2");
  std::set<int> touched;
  for (const auto& step : plan.steps) touched.insert(static_cast<int>(step.term));
  if (static_cast<int>(touched.size()) >= n / 2) {
    throw ValidationError("ghz: plan touches " + std::to_string(touched.size()) +
                          " sites; fewer than n/2 required");
  }
  std::vector<int> hidden;
  for (int q = 0; q < n && static_cast<int>(hidden.size()) < n / 2; ++q) {
    if (!touched.count(q)) hidden.push_back(q);
  }
  return ghz_probe(n, plan, hidden);
}

ResultTable run_ghz(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table;
  RowSink sink{cfg, table};
  for (int n : cfg.n_values) {
    const Hamiltonian h = ghz_hamiltonian(n);
    for (auto gates : cfg.gates) {
      std::vector<double> dist(cfg.reps);
      for_each_rep(cfg.reps, cfg.workers, [&](int rep) {
        SeededRng rng = plan_rng(cfg.seed, n, gates, rep);
        ExperimentConfig local = cfg;
        local.t = kGhzTime;
        dist[rep] = ghz_counterexample(n, make_plan(local, h, gates, rng)).distance;
      });
      for (int rep = 0; rep < cfg.reps; ++rep) sink.add(n, gates, rep, "trace-distance", dist[rep]);
      sink.add(n, gates, -1, "trace-distance.min", *std::min_element(dist.begin(), dist.end()));
    }
  }
  return table;
}

ResultTable diagonal_union_bound_demo(int n, std::span<const int> signs, double t, std::uint64_t gates,
                                      int reps, std::uint64_t seed, double eps, int workers,
                                      bool per_basis_rows) {
  if (n < 1 || n > kMaxDenseQubits) throw ValidationError("diagonal-union: n must lie in [1, 12]");
  if (reps < 1) throw ValidationError("diagonal-union: reps must be >= 1");
  const double weight = std::ldexp(1.0, -n);
  const Hamiltonian h = all_z_strings(n, signs, weight);
  const auto exact = target_phases(h, t);
  const std::size_t dim = h.dim();
  const std::size_t probe = dim - 1;

  std::vector<std::vector<double>> dev(reps);
  for_each_rep(reps, workers, [&](int rep) {
    SeededRng rng = plan_rng(seed, n, gates, rep);
    const auto sampled = plan_phases(qdrift_sample(h, t, gates, rng), h);
    auto& d = dev[rep];
    d.resize(dim);
    for (std::size_t b = 0; b < dim; ++b) d[b] = std::abs(sampled[b] - exact[b]);
  });

  ExperimentConfig cfg = default_config("diagonal-union");
  cfg.seed = seed;
  ResultTable table;
  RowSink sink{cfg, table};
  int max_exceed = 0, probe_exceed = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const double mx = *std::max_element(dev[rep].begin(), dev[rep].end());
    sink.add(n, gates, rep, "max-deviation", mx);
    sink.add(n, gates, rep, "fixed-b-deviation", dev[rep][probe]);
    if (per_basis_rows) {
      for (std::size_t b = 0; b < dim; ++b) sink.add(n, gates, rep, "deviation[" + std::to_string(b) + "]", dev[rep][b]);
    }
    max_exceed += mx > eps;
    probe_exceed += dev[rep][probe] > eps;
  }
  sink.add(n, gates, -1, "max-exceed-fraction", static_cast<double>(max_exceed) / reps);
  sink.add(n, gates, -1, "fixed-b-exceed-fraction", static_cast<double>(probe_exceed) / reps);
  return table;
}

ResultTable run_diagonal_union(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultTable table;
  for (int n : cfg.n_values) {
    const auto signs = sign_pattern(n, cfg.signs, cfg.seed);
    for (auto gates : cfg.gates) {
      ResultTable part =
          diagonal_union_bound_demo(n, signs, cfg.t, gates, cfg.reps, cfg.seed, cfg.eps, cfg.workers, cfg.per_basis_rows);
      for (auto row : part.rows()) {
        row.experiment = cfg.experiment;
        row.model = cfg.model;
        table.add(std::move(row));
      }
    }
  }
  return table;
}

ResultTable tail_dominance_study(const ExperimentConfig& cfg) {
  cfg.validate();
  require_dense_grid(cfg);
  ResultTable table;
  RowSink sink{cfg, table};
  const auto grid = cfg.eps_grid.empty() ? default_eps_grid() : cfg.eps_grid;
  for (int n : cfg.n_values) {
    const Hamiltonian h = make_model(cfg.model, n);
    const ComplexMatrix u = exact_unitary(h, cfg.t);
    for (auto gates : cfg.gates) {
      const ComplexMatrix mean = matrix_power(expected_step(h, cfg.t, gates), gates);
      std::vector<double> fluct(cfg.reps), trace(cfg.reps);
      for_each_rep(cfg.reps, cfg.workers, [&](int rep) {
        SeededRng rng = plan_rng(cfg.seed, n, gates, rep);
        const ProductFormulaPlan plan = qdrift_sample(h, cfg.t, gates, rng);
        const ComplexMatrix v = realize_unitary(plan, h);
        fluct[rep] = operator_norm(v - mean);
        SeededRng srng = state_rng(cfg.seed, n, gates, rep);
        const StateVector psi = random_product_state(n, srng);
        trace[rep] = pure_trace_distance(apply(u, psi), apply(v, psi));
      });
      for (int rep = 0; rep < cfg.reps; ++rep) {
        sink.add(n, gates, rep, "fluctuation", fluct[rep]);
        sink.add(n, gates, rep, "fixed-input-trace", trace[rep]);
      }
      int fluct_violations = 0, trace_violations = 0;
      for (double eps : grid) {
        const double sf = survival(fluct, eps);
        const double bf = freedman_tail(eps, cfg.t, h.lambda(), gates, n);
        const double st = survival(trace, eps);
        const double bt = vector_tail_trace(eps, cfg.t, h.lambda(), gates);
        const bool vf = bf < 1.0 && sf > bf;
        const bool vt = bt < 1.0 && st > bt;
        fluct_violations += vf;
        trace_violations += vt;
        sink.add(n, gates, -1, grid_label("fluctuation.survival", eps), sf);
        sink.add(n, gates, -1, grid_label("fluctuation.bound", eps), bf);
        sink.add(n, gates, -1, grid_label("fluctuation.violation", eps), vf);
        sink.add(n, gates, -1, grid_label("fixed-input-trace.survival", eps), st);
        sink.add(n, gates, -1, grid_label("fixed-input-trace.bound", eps), bt);
        sink.add(n, gates, -1, grid_label("fixed-input-trace.violation", eps), vt);
      }
      sink.add(n, gates, -1, "fluctuation.median", median(fluct));
      sink.add(n, gates, -1, "fixed-input-trace.median", median(trace));
      sink.add(n, gates, -1, "fluctuation.violations", fluct_violations);
      sink.add(n, gates, -1, "fixed-input-trace.violations", trace_violations);
    }
  }
  return table;
}

double single_site_error(std::span<const std::uint64_t> counts, double t, std::uint64_t gates) {
  if (gates < 1) throw ValidationError("single_site_error: gate count must be >= 1");
  const std::size_t n = counts.size();
  const double lambda = static_cast<double>(n);
  // V U^dagger = exp(-i sum_k theta_k Z_k); on |b> the phase is sum_k +-theta_k.
  std::vector<double> theta(n);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    theta[k] = t * (lambda * static_cast<double>(counts[k]) / static_cast<double>(gates) - 1.0);
    total += std::abs(theta[k]);
  }
  if (total <= std::numbers::pi) return 2.0 * std::sin(total / 2.0);
  if (n > static_cast<std::size_t>(kMaxStateQubits)) {
    throw ValidationError("single_site_error: phase sum exceeds pi and n > 24");
  }
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double x = 0.0;
    for (std::size_t k = 0; k < n; ++k) x += (mask >> k & 1) ? -theta[k] : theta[k];
    best = std::max(best, 2.0 * std::abs(std::sin(x / 2.0)));
  }
  return best;
}

double single_site_lower_bound(int n, double t, std::uint64_t gates) {
  const double lambda = n;
  const double x = (n - 1) * t * t * lambda * lambda / static_cast<double>(gates);
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(x) - 0.5 * x;
}

SaturationResult saturation_single_site(int n, double t, std::uint64_t gates, int reps, std::uint64_t seed,
                                        int workers) {
  if (n < 1) throw ValidationError("saturation_single_site: n must be >= 1");
  if (reps < 1) throw ValidationError("saturation_single_site: reps must be >= 1");
  const Hamiltonian h = single_site_z(n, 1.0);
  SaturationResult res;
  res.values.resize(reps);
  for_each_rep(reps, workers, [&](int rep) {
    SeededRng rng = plan_rng(seed, n, gates, rep);
    const CountStats c = count_stats(qdrift_sample(h, t, gates, rng), h);
    res.values[rep] = single_site_error(c.m, t, gates);
  });
  res.error = summarize(res.values);
  res.lower_bound = single_site_lower_bound(n, t, gates);
  return res;
}

double many_body_error(std::span<const std::uint64_t> counts, int n, double t, std::uint64_t gates) {
  if (n < 1 || n > kMaxDenseQubits) throw ValidationError("many_body_error: n must lie in [1, 12]");
  if (counts.size() != (std::size_t{1} << n)) throw ValidationError("many_body_error: need 2^n counts");
  if (gates < 1) throw ValidationError("many_body_error: gate count must be >= 1");
  const double lambda = static_cast<double>(counts.size());
  std::vector<double> sampled(counts.size()), exact(counts.size(), t);
  for (std::size_t p = 0; p < counts.size(); ++p) {
    sampled[p] = t * lambda * static_cast<double>(counts[p]) / static_cast<double>(gates);
  }
  walsh_hadamard(sampled);
  walsh_hadamard(exact);
  return phase_error(sampled, exact);
}

double many_body_lower_bound(int n, double t, std::uint64_t gates) {
  const double lambda = std::ldexp(1.0, n);
  const double x = t * t * lambda * lambda / static_cast<double>(gates);
  return 0.5 * std::sqrt(n * x) - 2.0 * (n + 0.5) * x;
}

SaturationResult saturation_many_body(int n, double t, std::uint64_t gates, int reps, std::uint64_t seed,
                                      int workers) {
  if (n < 1 || n > kMaxDenseQubits) throw ValidationError("saturation_many_body: n must lie in [1, 12]");
  if (reps < 1) throw ValidationError("saturation_many_body: reps must be >= 1");
  const Hamiltonian h = all_z_strings(n, 1.0);
  SaturationResult res;
  res.values.resize(reps);
  for_each_rep(reps, workers, [&](int rep) {
    SeededRng rng = plan_rng(seed, n, gates, rep);
    const CountStats c = count_stats(qdrift_sample(h, t, gates, rng), h);
    res.values[rep] = many_body_error(c.m, n, t, gates);
  });
  res.error = summarize(res.values);
  res.lower_bound = many_body_lower_bound(n, t, gates);
  return res;
}

namespace {

ResultTable saturation_table(const ExperimentConfig& cfg, bool many_body) {
  cfg.validate();
  ResultTable table;
  RowSink sink{cfg, table};
  for (int n : cfg.n_values) {
    for (auto gates : cfg.gates) {
      const SaturationResult r = many_body ? saturation_many_body(n, cfg.t, gates, cfg.reps, cfg.seed, cfg.workers)
                                           : saturation_single_site(n, cfg.t, gates, cfg.reps, cfg.seed, cfg.workers);
      for (int rep = 0; rep < cfg.reps; ++rep) sink.add(n, gates, rep, "worst-case", r.values[rep]);
      sink.add(n, gates, -1, "worst-case.mean", r.error.mean);
      sink.add(n, gates, -1, "worst-case.standard-error", r.error.standard_error());
      sink.add(n, gates, -1, "lower-bound", r.lower_bound);
      sink.add(n, gates, -1, "bound-holds", r.error.mean >= r.lower_bound - 2.0 * r.error.standard_error());
    }
  }
  return table;
}

}  // namespace

ResultTable run_saturation_single(const ExperimentConfig& cfg) { return saturation_table(cfg, false); }
ResultTable run_saturation_many(const ExperimentConfig& cfg) { return saturation_table(cfg, true); }

ResultTable suzuki_comparison(const ExperimentConfig& cfg) {
  cfg.validate();
  require_dense_grid(cfg);
  ResultTable table;
  RowSink sink{cfg, table};
  for (int n : cfg.n_values) {
    const Hamiltonian h = make_model(cfg.model, n);
    const ComplexMatrix u = exact_unitary(h, cfg.t);
    for (int p : {1, 2}) {
      const std::string label = "S" + std::to_string(2 * p);
      const ProductFormulaPlan det = suzuki_blocks_plan(h, cfg.t, cfg.blocks, p);
      const std::uint64_t gates = det.steps.size();
      const double det_error = worst_case_error(u, realize_unitary(det, h));
      std::vector<double> permuted(cfg.reps), drift(cfg.reps);
      for_each_rep(cfg.reps, cfg.workers, [&](int rep) {
        SeededRng rng = plan_rng(cfg.seed, n, gates, rep);
        permuted[rep] = worst_case_error(u, realize_unitary(permuted_suzuki_plan(h, cfg.t, cfg.blocks, p, rng), h));
        drift[rep] = worst_case_error(u, realize_unitary(qdrift_sample(h, cfg.t, gates, rng), h));
      });
      for (int rep = 0; rep < cfg.reps; ++rep) {
        sink.add(n, gates, rep, label + ".deterministic", det_error);
        sink.add(n, gates, rep, label + ".permuted", permuted[rep]);
        sink.add(n, gates, rep, label + ".qdrift", drift[rep]);
      }
      for (const auto& [name, values] :
           {std::pair{".deterministic", std::vector<double>(cfg.reps, det_error)}, std::pair{".permuted", permuted},
            std::pair{".qdrift", drift}}) {
        const Summary s = summarize(values);
        sink.add(n, gates, -1, label + name + ".mean", s.mean);
        sink.add(n, gates, -1, label + name + ".std", s.std);
      }
    }
  }
  return table;
}

ResultTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& e = cfg.experiment;
  if (e == "fig3-gatecount") return run_error_vs_gatecount(cfg);
  if (e == "fig3-systemsize") return run_error_vs_systemsize(cfg);
  if (e == "ghz") return run_ghz(cfg);
  if (e == "diagonal-union") return run_diagonal_union(cfg);
  if (e == "tails") return tail_dominance_study(cfg);
  if (e == "saturation-single") return run_saturation_single(cfg);
  if (e == "saturation-many") return run_saturation_many(cfg);
  return suzuki_comparison(cfg);
}

}  // namespace qdrift
