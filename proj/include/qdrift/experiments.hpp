#pragma once

// Monte Carlo harness. Every repetition draws from its own random stream
// keyed by (master seed, n, N, rep), so tables do not depend on the worker
// count or on execution order.

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qdrift/formulas.hpp"
#include "qdrift/hamiltonian.hpp"
#include "qdrift/linalg.hpp"
#include "qdrift/rng.hpp"

namespace qdrift {

struct ExperimentConfig {
  std::string experiment = "fig3-gatecount";
  std::string model = "heisenberg";
  std::vector<int> n_values{4};
  double t = 2.0;
  std::vector<std::uint64_t> gates{160};
  int reps = 50;
  std::uint64_t seed = 1;
  std::string method = "qdrift";  // qdrift | first-order | suzuki | permuted-suzuki
  int order = 1;                  // p for Suzuki methods
  int blocks = 1;                 // r for Suzuki methods
  std::vector<std::string> metrics{"worst-case", "fixed-input"};
  int workers = 1;
  double eps = 0.5;                // diagonal-union threshold
  std::vector<double> eps_grid{};  // tails; empty means a default grid
  std::string signs = "plus";      // diagonal-union: "plus" or "random"
  bool per_basis_rows = false;     // diagonal-union: emit |S^(b) - S(b)| for every b

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// Defaults for a named experiment.
ExperimentConfig default_config(std::string_view experiment);

struct ResultRow {
  std::string experiment;
  std::string model;
  int n = 0;
  std::uint64_t gates = 0;
  long long rep = 0;  // -1 marks an aggregate row
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

class ResultTable {
 public:
  static constexpr const char* kCsvHeader = "experiment,model,n,N,rep,seed,metric,value";

  void add(ResultRow row) { rows_.push_back(std::move(row)); }
  void append(const ResultTable& other);
  const std::vector<ResultRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }

  // Values of `metric` over per-repetition rows (or aggregate rows only).
  std::vector<double> select(std::string_view metric, std::optional<int> n = std::nullopt,
                             std::optional<std::uint64_t> gates = std::nullopt,
                             bool aggregates = false) const;
  // The unique aggregate value for (metric, n, N); throws if absent.
  double aggregate(std::string_view metric, std::optional<int> n = std::nullopt,
                   std::optional<std::uint64_t> gates = std::nullopt) const;

  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
  static ResultTable parse_csv(std::string_view text);

 private:
  std::vector<ResultRow> rows_;
};

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
  std::size_t count = 0;
  double standard_error() const;
};

Summary summarize(std::span<const double> values);
// Per-repetition rows grouped by "metric@n=..,N=..".
std::map<std::string, Summary> summarize(const ResultTable& table);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

Hamiltonian make_model(std::string_view model, int n);

StateVector random_product_state(int n, SeededRng& rng);

// Multinomial selection counts m and their centered form s = (m - N p) / sqrt(N).
struct CountStats {
  std::vector<std::uint64_t> m;
  std::vector<double> s;
  std::uint64_t total() const;
};
CountStats count_stats(const ProductFormulaPlan& plan, const Hamiltonian& h);

ProductFormulaPlan make_plan(const ExperimentConfig& cfg, const Hamiltonian& h,
                             std::uint64_t gates, SeededRng& rng);

ResultTable run_error_vs_gatecount(const ExperimentConfig& cfg);
// Adds aggregate rows "<metric>.ratio" = mean_n / mean_{n0}, "<metric>.ratio-std",
// and "reference.sqrt-n-ratio" = sqrt(n / n0), where n0 is the first grid entry.
ResultTable run_error_vs_systemsize(const ExperimentConfig& cfg);

// Single-site model H = (1/n) sum_k Z_k evolved for t = pi.
inline constexpr double kGhzTime = 3.14159265358979323846;
Hamiltonian ghz_hamiltonian(int n);

struct GhzResult {
  StateVector state{1};
  double distance = 0.0;
  std::vector<int> touched;
  std::vector<int> hidden;
};

// GHZ on `hidden` tensored with |0> elsewhere; trace distance between the
// exact and the plan evolution of that state.
GhzResult ghz_probe(int n, const ProductFormulaPlan& plan, std::span<const int> hidden);
// Picks n/2 untouched sites as the hidden register. Throws ValidationError
// when n is odd or the plan touches n/2 or more sites.
GhzResult ghz_counterexample(int n, const ProductFormulaPlan& plan);
ResultTable run_ghz(const ExperimentConfig& cfg);

ResultTable diagonal_union_bound_demo(int n, std::span<const int> signs, double t,
                                      std::uint64_t gates, int reps, std::uint64_t seed,
                                      double eps, int workers = 1, bool per_basis_rows = false);
ResultTable run_diagonal_union(const ExperimentConfig& cfg);

// Per repetition: "fluctuation" = ||V - (E V)^N|| and "fixed-input-trace" =
// trace distance of U psi and V psi. Per grid point: empirical survival,
// analytic tail, and a violation flag where the tail is below 1.
ResultTable tail_dominance_study(const ExperimentConfig& cfg);

struct SaturationResult {
  Summary error;
  double lower_bound = 0.0;
  std::vector<double> values;
};

// ||V - U|| for H = sum_k Z_k given the selection counts, via per-site phases.
double single_site_error(std::span<const std::uint64_t> counts, double t, std::uint64_t gates);
double single_site_lower_bound(int n, double t, std::uint64_t gates);
SaturationResult saturation_single_site(int n, double t, std::uint64_t gates, int reps,
                                        std::uint64_t seed, int workers = 1);

// ||V - U|| for H = sum_p Z_p over all 2^n strings, via Walsh-Hadamard phases.
double many_body_error(std::span<const std::uint64_t> counts, int n, double t,
                       std::uint64_t gates);
double many_body_lower_bound(int n, double t, std::uint64_t gates);
SaturationResult saturation_many_body(int n, double t, std::uint64_t gates, int reps,
                                      std::uint64_t seed, int workers = 1);

ResultTable run_saturation_single(const ExperimentConfig& cfg);
ResultTable run_saturation_many(const ExperimentConfig& cfg);

// Deterministic vs permuted Suzuki (p = 1, 2) and qDRIFT at the same gate count.
ResultTable suzuki_comparison(const ExperimentConfig& cfg);

ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace qdrift
