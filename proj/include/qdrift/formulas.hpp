#pragma once

// Product-formula plans: qDRIFT sampling, first-order Trotter, Suzuki
// S_2 / S_2p, and randomly permuted Suzuki blocks.
//
// A plan is a list of steps in chronological order: steps[0] acts first, so
// the realized unitary is steps[N-1] * ... * steps[0].

#include <cstdint>
#include <string>
#include <vector>

#include "qdrift/hamiltonian.hpp"
#include "qdrift/linalg.hpp"
#include "qdrift/rng.hpp"

namespace qdrift {

// One factor exp(-i * duration * G). With `rescaled` set, G is the qDRIFT
// generator (lambda / ||h_j||) h_j; otherwise G = h_j.
struct PlanStep {
  std::size_t term = 0;
  double duration = 0.0;
  bool rescaled = false;

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

struct PlanMeta {
  std::string method;  // "qdrift", "first-order", "suzuki", "permuted-suzuki", "custom"
  double t = 0.0;
  std::uint64_t gates = 0;  // N for qdrift / first-order
  int order = 0;            // p for Suzuki plans
  int blocks = 0;           // r for Suzuki plans
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string hamiltonian_fingerprint;
};

struct ProductFormulaPlan {
  std::vector<PlanStep> steps;
  PlanMeta meta;
};

// Angle theta of the Pauli rotation exp(-i theta P) realized by `step`.
double step_angle(const PlanStep& step, const Hamiltonian& h);

ProductFormulaPlan qdrift_sample(const Hamiltonian& h, double t, std::uint64_t gates,
                                 SeededRng& rng);

// N/L cycles through all terms, each step exp(-i (tL/N) h_j).
ProductFormulaPlan first_order_plan(const Hamiltonian& h, double t, std::uint64_t gates);

// Suzuki-Trotter constant q_p = 1 / (4 - 4^{1/(2p-1)}).
double suzuki_q(int p);

ProductFormulaPlan suzuki2_plan(const Hamiltonian& h, double tau);
ProductFormulaPlan suzuki2p_plan(const Hamiltonian& h, double tau, int p);

// r blocks S_2p(t/r), each with an independent uniform relabeling of terms.
ProductFormulaPlan permuted_suzuki_plan(const Hamiltonian& h, double t, int blocks, int p,
                                        SeededRng& rng);

// r deterministic blocks S_2p(t/r).
ProductFormulaPlan suzuki_blocks_plan(const Hamiltonian& h, double t, int blocks, int p);

ComplexMatrix realize_unitary(const ProductFormulaPlan& plan, const Hamiltonian& h);

// Term-by-term application in O(N d) for Pauli steps.
StateVector apply_plan(const ProductFormulaPlan& plan, const Hamiltonian& h,
                       const StateVector& psi);

// Exact target exp(-i t H), via the Hermitian eigensolver.
ComplexMatrix exact_unitary(const Hamiltonian& h, double t);

// E V = sum_j p_j exp(-i (t/N) X_j)
ComplexMatrix expected_step(const Hamiltonian& h, double t, std::uint64_t gates);

// Step unitary of one plan step as a dense matrix.
ComplexMatrix step_unitary(const PlanStep& step, const Hamiltonian& h);

// Diagonal Hamiltonians only: exp(-i t H)|b> = exp(-i S(b))|b>.
std::vector<double> target_phases(const Hamiltonian& h, double t);
// Accumulated phases of a plan on a diagonal Hamiltonian.
std::vector<double> plan_phases(const ProductFormulaPlan& plan, const Hamiltonian& h);
inline std::vector<double> diagonal_phases(const Hamiltonian& h, double t) { return target_phases(h, t); }
inline std::vector<double> diagonal_phases(const ProductFormulaPlan& plan, const Hamiltonian& h) {
  return plan_phases(plan, h);
}
// max_b |exp(-i a_b) - exp(-i b_b)|: operator-norm distance of two diagonal unitaries.
double phase_error(const std::vector<double>& a, const std::vector<double>& b);

// In-place unnormalized Walsh-Hadamard transform:
// out[b] = sum_p in[p] (-1)^{popcount(b & p)}. Size must be a power of two.
void walsh_hadamard(std::vector<double>& values);

}  // namespace qdrift
