#include <bit>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qdrift/errors.hpp"
#include "qdrift/experiments.hpp"
#include "qdrift/metrics.hpp"
#include "support.hpp"

using namespace qdrift;
using namespace qdrift::testing;

namespace {

ExperimentConfig small(const char* name) {
  ExperimentConfig cfg = default_config(name);
  cfg.workers = 4;
  return cfg;
}

}  // namespace

TEST_CASE("default configs validate") {
  for (const char* name : {"fig3-gatecount", "fig3-systemsize", "ghz", "diagonal-union", "tails",
                           "saturation-single", "saturation-many", "suzuki"}) {
    CHECK_NOTHROW(default_config(name).validate());
    CHECK(default_config(name).experiment == name);
  }
  CHECK_THROWS_AS(default_config("nope"), ValidationError);
  CHECK(default_config("fig3-gatecount").gates.back() == 640);
  CHECK(default_config("fig3-systemsize").n_values == std::vector<int>{4, 5, 6, 7, 8});
}

TEST_CASE("config validation names the field") {
  auto message = [](ExperimentConfig cfg) {
    try {
      cfg.validate();
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  ExperimentConfig cfg;
  cfg.reps = 0;
  CHECK(message(cfg).rfind("reps", 0) == 0);
  cfg = {};
  cfg.gates = {10, 0};
  CHECK(message(cfg).rfind("gates", 0) == 0);
  cfg = {};
  cfg.method = "trotter9";
  CHECK(message(cfg).rfind("method", 0) == 0);
  cfg = {};
  cfg.metrics = {"diamond-ish"};
  CHECK(message(cfg).rfind("metrics", 0) == 0);
  cfg = {};
  cfg.t = -1;
  CHECK(message(cfg).rfind("t:", 0) == 0);
  cfg = {};
  cfg.n_values = {};
  CHECK(message(cfg).rfind("n:", 0) == 0);
  cfg = {};
  cfg.signs = "minus";
  CHECK(message(cfg).rfind("signs", 0) == 0);
}

TEST_CASE("summaries and slopes") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Summary s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(5.0 / 3.0)));
  CHECK(s.count == 4);
  CHECK(s.standard_error() == doctest::Approx(std::sqrt(5.0 / 3.0) / 2));
  CHECK(summarize(std::vector<double>{7.0}).std == 0.0);

  const std::vector<double> x{10, 20, 40, 80};
  std::vector<double> y;
  for (double xi : x) y.push_back(3.0 * std::pow(xi, -0.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), ValidationError);
  CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 0.0}), ValidationError);
}

TEST_CASE("random_product_state") {
  SeededRng a(5), b(5);
  const StateVector s = random_product_state(6, a);
  CHECK(s.dim() == 64);
  CHECK(std::abs(s.norm() - 1.0) <= 1e-12);
  CHECK(l2_distance(s, random_product_state(6, b)) == 0.0);

  // Haar single-qubit states have Bloch components with mean 0 and variance 1/3.
  SeededRng rng(9);
  const int samples = 3000;
  double zsum = 0.0, xsum = 0.0;
  for (int k = 0; k < samples; ++k) {
    const StateVector q = random_product_state(1, rng);
    zsum += std::norm(q[0]) - std::norm(q[1]);
    xsum += 2 * std::real(std::conj(q[0]) * q[1]);
  }
  const double sigma = std::sqrt(1.0 / 3.0 / samples);
  CHECK(std::abs(zsum / samples) <= 3 * sigma);
  CHECK(std::abs(xsum / samples) <= 3 * sigma);

  // Product structure: the first qubit is the most significant bit.
  SeededRng c(2), d(2);
  const StateVector two = random_product_state(2, c);
  const StateVector first = random_product_state(1, d);
  const double p0 = std::norm(two[0]) + std::norm(two[1]);
  CHECK(p0 == doctest::Approx(std::norm(first[0])));
}

TEST_CASE("result table select, aggregate and CSV round trip") {
  ExperimentConfig cfg = small("fig3-gatecount");
  cfg.gates = {20, 40};
  cfg.reps = 6;
  const ResultTable t = run_error_vs_gatecount(cfg);
  CHECK(t.select("worst-case", 4, 20).size() == 6);
  CHECK(t.select("worst-case.mean", 4, 20, true).size() == 1);
  CHECK(t.aggregate("worst-case.mean", 4, 20) == doctest::Approx(summarize(t.select("worst-case", 4, 20)).mean));
  CHECK_THROWS_AS(t.aggregate("worst-case.mean"), ValidationError);

  const ResultTable back = ResultTable::parse_csv(t.to_csv());
  REQUIRE(back.size() == t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& a = t.rows()[i];
    const auto& b = back.rows()[i];
    CHECK(a.experiment == b.experiment);
    CHECK(a.n == b.n);
    CHECK(a.gates == b.gates);
    CHECK(a.rep == b.rep);
    CHECK(a.metric == b.metric);
    CHECK(a.value == b.value);
  }
  CHECK(back.to_csv() == t.to_csv());
  CHECK_THROWS_AS(ResultTable::parse_csv("a,b\n"), ValidationError);
  CHECK_THROWS_AS(ResultTable::parse_csv(std::string(ResultTable::kCsvHeader) + "\nx,y,1\n"), ValidationError);

  const auto groups = summarize(t);
  CHECK(groups.at("worst-case@n=4,N=40").count == 6);
}

TEST_CASE("tables do not depend on the worker count") {
  ExperimentConfig cfg = small("fig3-gatecount");
  cfg.gates = {40, 80};
  cfg.reps = 9;
  cfg.metrics = {"worst-case", "fixed-input", "fixed-input-trace"};
  cfg.workers = 1;
  const std::string one = run_error_vs_gatecount(cfg).to_csv();
  cfg.workers = 4;
  CHECK(run_error_vs_gatecount(cfg).to_csv() == one);
  cfg.workers = 13;
  CHECK(run_error_vs_gatecount(cfg).to_csv() == one);
  cfg.seed = 2;
  CHECK(run_error_vs_gatecount(cfg).to_csv() != one);
}

TEST_CASE("error decays like N^-1/2") {
  ExperimentConfig cfg = small("fig3-gatecount");
  cfg.gates = {160, 320, 640};
  cfg.reps = 30;
  const ResultTable t = run_error_vs_gatecount(cfg);
  std::vector<double> x, worst, fixed;
  for (auto g : cfg.gates) {
    x.push_back(static_cast<double>(g));
    worst.push_back(t.aggregate("worst-case.mean", 4, g));
    fixed.push_back(t.aggregate("fixed-input.mean", 4, g));
    CHECK(fixed.back() <= worst.back());
  }
  CHECK(loglog_slope(x, worst) == doctest::Approx(-0.5).epsilon(0.3));
  CHECK(loglog_slope(x, fixed) == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("t = 0 gives zero error") {
  ExperimentConfig cfg = small("fig3-gatecount");
  cfg.t = 0.0;
  cfg.gates = {16};
  cfg.reps = 4;
  const ResultTable t = run_error_vs_gatecount(cfg);
  for (const auto& r : t.rows()) CHECK(r.value == 0.0);
}

TEST_CASE("system-size ratios are anchored at the first n") {
  ExperimentConfig cfg = small("fig3-systemsize");
  cfg.n_values = {4, 5};
  cfg.reps = 5;
  const ResultTable t = run_error_vs_systemsize(cfg);
  CHECK(t.aggregate("worst-case.ratio", 4, 160) == 1.0);
  CHECK(t.aggregate("fixed-input.ratio", 4, 160) == 1.0);
  CHECK(t.aggregate("reference.sqrt-n-ratio", 5, 160) == doctest::Approx(std::sqrt(5.0 / 4.0)));
  CHECK(t.aggregate("worst-case.ratio", 5, 160) ==
        doctest::Approx(t.aggregate("worst-case.mean", 5, 160) / t.aggregate("worst-case.mean", 4, 160)));
}

TEST_CASE("GHZ counterexample") {
  const int n = 8;
  ProductFormulaPlan plan;
  for (int q : {2, 0, 1, 2}) plan.steps.push_back({static_cast<std::size_t>(q), kGhzTime / 4, true});
  const GhzResult r = ghz_counterexample(n, plan);
  CHECK(r.touched == std::vector<int>{0, 1, 2});
  CHECK(r.hidden == std::vector<int>{3, 4, 5, 6});
  CHECK(r.distance == doctest::Approx(1.0));
  // GHZ on sites 3..6: |00000000> + |00011110>
  CHECK(std::abs(r.state[0]) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(r.state[0b00011110]) == doctest::Approx(1 / std::sqrt(2.0)));

  plan.steps.push_back({3, 0.1, true});
  CHECK_THROWS_AS(ghz_counterexample(n, plan), ValidationError);
  CHECK_THROWS_AS(ghz_counterexample(7, ProductFormulaPlan{}), ValidationError);

  // n = 2: one hidden site carries the relative phase -1 unless the plan rotates it.
  const std::vector<int> second{1};
  CHECK(ghz_probe(2, ProductFormulaPlan{}, second).distance == doctest::Approx(1.0));
  CHECK(ghz_counterexample(2, ProductFormulaPlan{}).hidden == std::vector<int>{0});
  CHECK(ghz_counterexample(2, ProductFormulaPlan{}).distance == doctest::Approx(1.0));
  CHECK(ghz_probe(2, first_order_plan(ghz_hamiltonian(2), kGhzTime, 2), second).distance <= 1e-7);
  // Hiding both sites doubles the phase to +1, so the probe loses its power.
  const std::vector<int> both{0, 1};
  CHECK(ghz_probe(2, ProductFormulaPlan{}, both).distance <= 1e-7);

  ExperimentConfig cfg = small("ghz");
  const ResultTable t = run_ghz(cfg);
  CHECK(t.select("trace-distance").size() == 10);
  CHECK(t.aggregate("trace-distance.min", 8, 3) == doctest::Approx(1.0));
}

TEST_CASE("diagonal union bound demo") {
  const int n = 4;
  std::vector<int> plus(16, 1);
  const Hamiltonian h = all_z_strings(n, plus, 1.0 / 16);
  const auto s = target_phases(h, 1.0);
  CHECK(s[0] == doctest::Approx(1.0));
  for (std::size_t b = 1; b < 16; ++b) CHECK(std::abs(s[b]) <= 1e-15);

  const ResultTable t = diagonal_union_bound_demo(n, plus, 1.0, 100000, 3, 7, 0.5, 3, true);
  for (double v : t.select("max-deviation")) CHECK(v < 0.05);
  CHECK(t.select("deviation[15]").size() == 3);
  CHECK(t.select("fixed-b-deviation") == t.select("deviation[15]"));

  ExperimentConfig cfg = small("diagonal-union");
  const ResultTable d = run_diagonal_union(cfg);
  CHECK(d.aggregate("max-exceed-fraction", 8, 32) <= 0.5);
  CHECK(d.aggregate("fixed-b-exceed-fraction", 8, 32) <= d.aggregate("max-exceed-fraction", 8, 32));
  CHECK_THROWS_AS(diagonal_union_bound_demo(13, plus, 1.0, 10, 1, 1, 0.5), ValidationError);
}

TEST_CASE("tail study") {
  ExperimentConfig cfg = small("tails");
  cfg.n_values = {3};
  cfg.gates = {40, 80};
  cfg.reps = 400;
  cfg.eps_grid = {0.0, 0.2, 0.5, 1.0};
  const ResultTable t = tail_dominance_study(cfg);
  const double ratio = t.aggregate("fluctuation.median", 3, 40) / t.aggregate("fluctuation.median", 3, 80);
  CHECK(ratio >= 1.2);
  CHECK(ratio <= 1.7);
  CHECK(t.aggregate("fluctuation.violations", 3, 40) == 0.0);
  CHECK(t.aggregate("fixed-input-trace.violations", 3, 40) == 0.0);
  CHECK(t.aggregate("fluctuation.survival@eps=0", 3, 40) == 1.0);
  for (double v : t.select("fixed-input-trace", 3, 40)) CHECK(v <= 1.0 + 1e-12);
}

TEST_CASE("fixed-input trace tail at large N, where it is informative") {
  ExperimentConfig cfg = small("tails");
  cfg.gates = {20000};
  cfg.reps = 100;
  cfg.eps_grid = {0.5, 0.75, 1.0};
  const ResultTable t = tail_dominance_study(cfg);
  CHECK(t.aggregate("fixed-input-trace.bound@eps=0.5", 4, 20000) < 1.0);
  CHECK(t.aggregate("fixed-input-trace.survival@eps=0.5", 4, 20000) <=
        t.aggregate("fixed-input-trace.bound@eps=0.5", 4, 20000));
  CHECK(t.aggregate("fixed-input-trace.violations", 4, 20000) == 0.0);
}

TEST_CASE("single-site saturation") {
  const Hamiltonian h = single_site_z(3, 1.0);
  for (double t : {0.4, 3.0}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      SeededRng rng(seed);
      const std::uint64_t gates = t > 1 ? 5 : 20;
      const ProductFormulaPlan plan = qdrift_sample(h, t, gates, rng);
      const CountStats c = count_stats(plan, h);
      CHECK(c.total() == gates);
      const double dense_err = worst_case_error(exact_unitary(h, t), realize_unitary(plan, h));
      CHECK(single_site_error(c.m, t, gates) == doctest::Approx(dense_err).epsilon(1e-9));
    }
  }
  const std::vector<std::uint64_t> even{100, 100, 100, 100};
  CHECK(single_site_error(even, 1.0, 400) <= 1e-15);

  const SaturationResult r = saturation_single_site(8, 1.0, 10000, 200, 1, 4);
  CHECK(r.values.size() == 200);
  CHECK(r.lower_bound > 0.0);
  CHECK(r.error.mean >= r.lower_bound - 2 * r.error.standard_error());
}

TEST_CASE("many-body saturation") {
  const Hamiltonian h = all_z_strings(3, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng rng(seed);
    const ProductFormulaPlan plan = qdrift_sample(h, 0.3, 30, rng);
    const CountStats c = count_stats(plan, h);
    const double dense_err = worst_case_error(exact_unitary(h, 0.3), realize_unitary(plan, h));
    CHECK(many_body_error(c.m, 3, 0.3, 30) == doctest::Approx(dense_err).epsilon(1e-9));
  }
  const std::vector<std::uint64_t> even(8, 50);
  CHECK(many_body_error(even, 3, 1.0, 400) <= 1e-12);
  CHECK_THROWS_AS(many_body_error(even, 4, 1.0, 400), ValidationError);

  // t lambda / sqrt(N) = 0.02, where the lower bound is positive.
  const std::uint64_t gates = 10000;
  const double t = 0.02 * std::sqrt(static_cast<double>(gates)) / 64.0;
  const SaturationResult r = saturation_many_body(6, t, gates, 100, 1, 4);
  CHECK(r.lower_bound > 0.0);
  CHECK(r.error.mean >= r.lower_bound - 2 * r.error.standard_error());
}

TEST_CASE("Suzuki comparison") {
  ExperimentConfig cfg = small("suzuki");
  cfg.n_values = {3};
  cfg.reps = 8;
  const ResultTable t = suzuki_comparison(cfg);
  const std::uint64_t s2 = 2 * 6 * 4, s4 = 5 * s2;
  CHECK(t.aggregate("S2.deterministic.std", 3, s2) == 0.0);
  CHECK(t.aggregate("S2.permuted.std", 3, s2) > 0.0);
  CHECK(t.aggregate("S4.permuted.std", 3, s4) > 0.0);
  CHECK(t.aggregate("S4.deterministic.mean", 3, s4) < t.aggregate("S2.deterministic.mean", 3, s2));
  CHECK(t.select("S2.qdrift", 3, s2).size() == 8);
}

TEST_CASE("run_experiment dispatches on the name") {
  ExperimentConfig cfg = small("ghz");
  cfg.reps = 2;
  CHECK(run_experiment(cfg).select("trace-distance").size() == 2);
  cfg.experiment = "unknown";
  CHECK_THROWS_AS(run_experiment(cfg), ValidationError);
  CHECK_THROWS_AS(make_model("ising", 3), ValidationError);
}
