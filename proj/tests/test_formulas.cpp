#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "qdrift/errors.hpp"
#include "qdrift/experiments.hpp"
#include "qdrift/formulas.hpp"
#include "qdrift/metrics.hpp"
#include "support.hpp"

using namespace qdrift;
using namespace qdrift::testing;

namespace {

// Dense product of step unitaries, built without realize_unitary's in-place path.
ComplexMatrix product_oracle(const ProductFormulaPlan& plan, const Hamiltonian& h) {
  ComplexMatrix m = ComplexMatrix::identity(h.dim());
  for (const auto& step : plan.steps) {
    const HamiltonianTerm& term = h.term(step.term);
    const double scale = step.rescaled ? h.lambda() / h.term_norms()[step.term] : 1.0;
    m = matmul(expm_hermitian(dense(term, h.num_qubits()), scale * step.duration), m);
  }
  return m;
}

std::map<std::pair<std::size_t, double>, int> multiset(std::span<const PlanStep> steps) {
  std::map<std::pair<std::size_t, double>, int> out;
  for (const auto& s : steps) ++out[{s.term, s.duration}];
  return out;
}

Hamiltonian single_term() { return Hamiltonian(2, {{-0.7, PauliString("XY")}}); }

}  // namespace

TEST_CASE("qdrift_sample structure") {
  const Hamiltonian h = heisenberg_1d(4);
  SeededRng rng(3);
  const ProductFormulaPlan plan = qdrift_sample(h, 2.0, 160, rng);
  CHECK(plan.steps.size() == 160);
  for (const auto& s : plan.steps) {
    CHECK(s.duration == 2.0 / 160);
    CHECK(s.rescaled);
    CHECK(s.term < h.num_terms());
  }
  CHECK(plan.meta.method == "qdrift");
  CHECK(plan.meta.gates == 160);
  CHECK(plan.meta.seed == 3);
  CHECK(plan.meta.hamiltonian_fingerprint == h.fingerprint());
  CHECK_THROWS_AS(qdrift_sample(h, 2.0, 0, rng), ValidationError);
  CHECK_THROWS_AS(qdrift_sample(h, -1.0, 10, rng), ValidationError);
}

TEST_CASE("qdrift term frequencies follow p_j") {
  const Hamiltonian h = heisenberg_1d(4);
  SeededRng rng(12);
  const std::uint64_t draws = 10000;
  const CountStats c = count_stats(qdrift_sample(h, 1.0, draws, rng), h);
  CHECK(c.total() == draws);
  const double p = 1.0 / 9.0, sigma = std::sqrt(draws * p * (1 - p));
  for (auto m : c.m) CHECK(std::abs(static_cast<double>(m) - draws * p) <= 3 * sigma);
}

TEST_CASE("qdrift is reproducible per seed") {
  const Hamiltonian h = heisenberg_1d(5);
  SeededRng a(99), b(99), c(100);
  const auto pa = qdrift_sample(h, 1.0, 500, a);
  CHECK(pa.steps == qdrift_sample(h, 1.0, 500, b).steps);
  CHECK(pa.steps != qdrift_sample(h, 1.0, 500, c).steps);
}

TEST_CASE("qdrift signs enter the rotation angle") {
  const Hamiltonian h(1, {{2.0, PauliString("X")}, {-1.0, PauliString("Z")}});
  CHECK(step_angle({0, 0.1, true}, h) == doctest::Approx(0.3));
  CHECK(step_angle({1, 0.1, true}, h) == doctest::Approx(-0.3));
  CHECK(step_angle({1, 0.1, false}, h) == doctest::Approx(-0.1));
}

TEST_CASE("first_order_plan") {
  const Hamiltonian h = heisenberg_1d(2);
  const ProductFormulaPlan plan = first_order_plan(h, 1.0, 6);
  REQUIRE(plan.steps.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(plan.steps[k].term == k % 3);
    CHECK(plan.steps[k].duration == doctest::Approx(0.5));
    CHECK_FALSE(plan.steps[k].rescaled);
  }
  CHECK_THROWS_AS(first_order_plan(h, 1.0, 4), ValidationError);
  CHECK_THROWS_AS(first_order_plan(h, 1.0, 0), ValidationError);
}

TEST_CASE("two-site Heisenberg terms commute, so product formulas are exact") {
  const Hamiltonian h = heisenberg_1d(2);
  const ComplexMatrix u = exact_unitary(h, 1.0);
  CHECK(max_abs_diff(realize_unitary(first_order_plan(h, 1.0, 3), h), u) <= 1e-12);
  CHECK(max_abs_diff(realize_unitary(suzuki2p_plan(h, 1.0, 1), h), u) <= 1e-12);
  CHECK(max_abs_diff(realize_unitary(suzuki2p_plan(h, 1.0, 2), h), u) <= 1e-12);
}

TEST_CASE("first-order error shrinks like 1/N") {
  const Hamiltonian h = heisenberg_1d(3);
  const ComplexMatrix u = exact_unitary(h, 1.0);
  const double coarse = worst_case_error(u, realize_unitary(first_order_plan(h, 1.0, 6), h));
  const double fine = worst_case_error(u, realize_unitary(first_order_plan(h, 1.0, 60), h));
  CHECK(coarse / fine >= 8.0);
  CHECK(coarse / fine <= 12.0);
}

TEST_CASE("commuting Hamiltonians are exact under first-order cycles") {
  for (int n = 1; n <= 4; ++n) {
    const Hamiltonian h = all_z_strings(n, 1.0);
    const ComplexMatrix u = exact_unitary(h, 0.8);
    for (std::uint64_t cycles : {1u, 2u, 5u}) {
      const auto plan = first_order_plan(h, 0.8, cycles * h.num_terms());
      CHECK(max_abs_diff(realize_unitary(plan, h), u) <= 1e-9);
    }
  }
}

TEST_CASE("suzuki_q") {
  CHECK(std::abs(suzuki_q(2) - 0.4144907717) <= 1e-9);
  CHECK(suzuki_q(2) == doctest::Approx(1.0 / (4.0 - std::cbrt(4.0))).epsilon(1e-15));
  CHECK_THROWS_AS(suzuki_q(0), ValidationError);
}

TEST_CASE("Suzuki plan structure") {
  const Hamiltonian h = heisenberg_1d(3);
  const auto s2 = suzuki2_plan(h, 0.3);
  REQUIRE(s2.steps.size() == 2 * h.num_terms());
  for (std::size_t k = 0; k < s2.steps.size(); ++k) {
    CHECK(s2.steps[k].term == s2.steps[s2.steps.size() - 1 - k].term);
    CHECK(s2.steps[k].duration == doctest::Approx(0.15));
  }
  CHECK(suzuki2p_plan(h, 0.3, 1).steps == s2.steps);

  for (int p = 1; p <= 3; ++p) {
    const auto plan = suzuki2p_plan(h, 0.3, p);
    CHECK(plan.steps.size() == 2 * static_cast<std::size_t>(std::pow(5, p - 1)) * h.num_terms());
    std::vector<double> per_term(h.num_terms(), 0.0);
    for (const auto& s : plan.steps) per_term[s.term] += s.duration;
    for (double d : per_term) CHECK(std::abs(d - 0.3) <= 1e-12);
  }
  const auto s4 = suzuki2p_plan(h, 0.3, 2);
  CHECK(std::any_of(s4.steps.begin(), s4.steps.end(), [](const PlanStep& s) { return s.duration < 0; }));
}

TEST_CASE("Suzuki local error orders") {
  const Hamiltonian h = heisenberg_1d(3);
  const std::vector<double> taus{0.1, 0.05, 0.025, 0.0125};
  for (int p : {1, 2}) {
    std::vector<double> errs;
    for (double tau : taus) {
      errs.push_back(worst_case_error(exact_unitary(h, tau), realize_unitary(suzuki2p_plan(h, tau, p), h)));
    }
    const double slope = loglog_slope(taus, errs);
    CHECK(slope >= (p == 1 ? 2.7 : 4.6));
  }
}

TEST_CASE("permuted Suzuki keeps block multisets") {
  const Hamiltonian h = heisenberg_1d(4);
  SeededRng a(1), b(2);
  const auto pa = permuted_suzuki_plan(h, 1.0, 2, 1, a);
  const auto pb = permuted_suzuki_plan(h, 1.0, 2, 1, b);
  const auto det = suzuki_blocks_plan(h, 1.0, 2, 1);
  REQUIRE(pa.steps.size() == det.steps.size());
  CHECK(pa.steps != pb.steps);
  const std::size_t block = det.steps.size() / 2;
  for (std::size_t r = 0; r < 2; ++r) {
    const std::span<const PlanStep> d(det.steps.data() + r * block, block);
    CHECK(multiset(std::span<const PlanStep>(pa.steps.data() + r * block, block)) == multiset(d));
    CHECK(multiset(std::span<const PlanStep>(pb.steps.data() + r * block, block)) == multiset(d));
  }
  // A relabeled block is still a palindrome.
  for (std::size_t k = 0; k < block; ++k) CHECK(pa.steps[k].term == pa.steps[block - 1 - k].term);
}

TEST_CASE("single-term Hamiltonians are exact under every method") {
  const Hamiltonian h = single_term();
  const double t = 1.3;
  const ComplexMatrix u = exact_unitary(h, t);
  SeededRng rng(5);
  CHECK(max_abs_diff(realize_unitary(qdrift_sample(h, t, 17, rng), h), u) <= 1e-10);
  CHECK(max_abs_diff(realize_unitary(first_order_plan(h, t, 4), h), u) <= 1e-10);
  CHECK(max_abs_diff(realize_unitary(suzuki2p_plan(h, t, 2), h), u) <= 1e-10);
  CHECK(max_abs_diff(realize_unitary(permuted_suzuki_plan(h, t, 3, 2, rng), h), u) <= 1e-10);
  CHECK(permuted_suzuki_plan(h, t, 3, 1, rng).steps == suzuki_blocks_plan(h, t, 3, 1).steps);
}

TEST_CASE("realize_unitary") {
  const Hamiltonian z(1, {{1.0, PauliString("Z")}});
  CHECK(max_abs_diff(realize_unitary(ProductFormulaPlan{}, z), ComplexMatrix::identity(2)) == 0.0);
  ProductFormulaPlan one;
  one.steps.push_back({0, std::numbers::pi / 2, false});
  const ComplexMatrix m = realize_unitary(one, z);
  CHECK(std::abs(m(0, 0) - Complex{0.0, -1.0}) < 1e-15);
  CHECK(std::abs(m(1, 1) - Complex{0.0, 1.0}) < 1e-15);

  const Hamiltonian h = heisenberg_1d(4);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeededRng rng(seed);
    const auto plan = qdrift_sample(h, 2.0, 160, rng);
    const ComplexMatrix v = realize_unitary(plan, h);
    CHECK(unitarity_defect(v) <= 1e-9);
    CHECK(max_abs_diff(v, product_oracle(plan, h)) <= 1e-9);
  }
}

TEST_CASE("dense terms realize through the eigensolver") {
  SeededRng rng(21);
  const ComplexMatrix block = random_hermitian(4, rng);
  const Hamiltonian h(2, {{0.4, PauliString("XZ")}, {1.1, block}, {-0.3, PauliString("YY")}});
  const auto plan = qdrift_sample(h, 0.9, 25, rng);
  CHECK(max_abs_diff(realize_unitary(plan, h), product_oracle(plan, h)) <= 1e-12);
  const StateVector psi = random_state(4, rng);
  CHECK(l2_distance(apply_plan(plan, h, psi), apply(realize_unitary(plan, h), psi)) <= 1e-12);
}

TEST_CASE("apply_plan agrees with the dense product") {
  const Hamiltonian h = heisenberg_1d(4);
  SeededRng srng(77);
  const StateVector psi = random_state(h.dim(), srng);
  CHECK(l2_distance(apply_plan(ProductFormulaPlan{}, h, psi), psi) == 0.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededRng rng(seed);
    const auto plan = qdrift_sample(h, 2.0, 160, rng);
    const StateVector out = apply_plan(plan, h, psi);
    CHECK(l2_distance(out, apply(realize_unitary(plan, h), psi)) <= 1e-9);
    CHECK(std::abs(out.norm() - 1.0) <= 1e-10);
  }
  CHECK_THROWS_AS(apply_plan(ProductFormulaPlan{}, h, StateVector::basis(4, 0)), ValidationError);
}

TEST_CASE("t = 0 realizes the identity") {
  const Hamiltonian h = heisenberg_1d(3);
  SeededRng rng(1);
  CHECK(max_abs_diff(realize_unitary(qdrift_sample(h, 0.0, 50, rng), h), ComplexMatrix::identity(8)) == 0.0);
}

TEST_CASE("expected_step") {
  const Hamiltonian one = single_term();
  const ComplexMatrix ev = expected_step(one, 2.0, 8);
  CHECK(unitarity_defect(ev) <= 1e-12);
  CHECK(max_abs_diff(ev, exact_unitary(one, 0.25)) <= 1e-12);

  const Hamiltonian h = heisenberg_1d(4);
  const double t = 2.0, lambda = 3.0;
  for (std::uint64_t n : {40u, 160u, 640u}) {
    const ComplexMatrix mean = expected_step(h, t, n);
    CHECK(operator_norm(mean - exact_unitary(h, t / n)) <= t * t * lambda * lambda / (n * n) + 1e-12);
    for (std::size_t j = 0; j < h.num_terms(); ++j) {
      CHECK(operator_norm(step_unitary({j, t / n, true}, h) - mean) <= 2 * t * lambda / n + 1e-12);
    }
  }
}

TEST_CASE("diagonal phases") {
  const Hamiltonian z(1, {{1.0, PauliString("Z")}});
  const auto ph = diagonal_phases(z, 0.6);
  CHECK(ph[0] == doctest::Approx(0.6));
  CHECK(ph[1] == doctest::Approx(-0.6));

  const Hamiltonian h = all_z_strings(3, 1.0);
  const auto s = diagonal_phases(h, 1.0);
  CHECK(s[0] == doctest::Approx(8.0));
  for (std::size_t b = 1; b < 8; ++b) CHECK(s[b] == 0.0);

  std::vector<int> signs{1, -1, -1, 1, 1, 1, -1, 1};
  const Hamiltonian hs = all_z_strings(3, signs, 0.125);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SeededRng rng(seed);
    const auto plan = qdrift_sample(hs, 1.0, 40, rng);
    const double fast = phase_error(diagonal_phases(plan, hs), diagonal_phases(hs, 1.0));
    const double slow = worst_case_error(realize_unitary(plan, hs), exact_unitary(hs, 1.0));
    CHECK(std::abs(fast - slow) <= 1e-10);
  }
  CHECK_THROWS_AS(diagonal_phases(heisenberg_1d(2), 1.0), ValidationError);
}

TEST_CASE("walsh_hadamard") {
  std::vector<double> delta(8, 0.0);
  delta[0] = 2.0;
  walsh_hadamard(delta);
  for (double v : delta) CHECK(v == 2.0);
  std::vector<double> bad(3, 1.0);
  CHECK_THROWS_AS(walsh_hadamard(bad), ValidationError);
}

TEST_CASE("random streams are stable") {
  SeededRng a(42, 7);
  SeededRng b(42, 7);
  for (int k = 0; k < 100; ++k) CHECK(a.next_u64() == b.next_u64());
  SeededRng c(42, 8);
  CHECK(SeededRng(42, 7).next_u64() != c.next_u64());
  SeededRng d(1);
  for (int k = 0; k < 1000; ++k) {
    const double u = d.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(d.uniform_index(7) < 7);
  }
  const std::vector<double> cdf{0.5, 0.5, 1.0};
  SeededRng e(3);
  for (int k = 0; k < 200; ++k) CHECK(e.categorical(cdf) != 1);
}
