#include "qdrift/formulas.hpp"

#include <cmath>
#include <numeric>
#include <utility>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

using Segment = std::pair<std::size_t, double>;  // (term, duration)

void suzuki_segments(std::size_t num_terms, double tau, int p, std::vector<Segment>& out) {
  if (p == 1) {
    for (std::size_t j = 0; j < num_terms; ++j) out.emplace_back(j, tau / 2.0);
    for (std::size_t j = num_terms; j-- > 0;) out.emplace_back(j, tau / 2.0);
    return;
  }
  const double q = suzuki_q(p);
  suzuki_segments(num_terms, q * tau, p - 1, out);
  suzuki_segments(num_terms, q * tau, p - 1, out);
  suzuki_segments(num_terms, (1.0 - 4.0 * q) * tau, p - 1, out);
  suzuki_segments(num_terms, q * tau, p - 1, out);
  suzuki_segments(num_terms, q * tau, p - 1, out);
}

void require_dense(const Hamiltonian& h, const char* op) {
  if (h.num_qubits() > kMaxDenseQubits) {
    throw ValidationError(std::string(op) + ": dense realization limited to n <= 12");
  }
}

void require_diagonal(const Hamiltonian& h, const char* op) {
  if (!is_diagonal(h)) throw ValidationError(std::string(op) + ": Hamiltonian is not diagonal");
}

double sign_of(double x) { return x < 0.0 ? -1.0 : 1.0; }

PlanMeta base_meta(const Hamiltonian& h, const char* method, double t) {
  PlanMeta meta;
  meta.method = method;
  meta.t = t;
  meta.hamiltonian_fingerprint = h.fingerprint();
  return meta;
}

}  // namespace

double step_angle(const PlanStep& step, const Hamiltonian& h) {
  const HamiltonianTerm& term = h.term(step.term);
  if (!term.is_pauli()) throw ValidationError("step_angle: term is not a Pauli string");
  if (step.rescaled) return step.duration * h.lambda() * sign_of(term.coefficient);
  return step.duration * term.coefficient;
}

ComplexMatrix step_unitary(const PlanStep& step, const Hamiltonian& h) {
  require_dense(h, "step_unitary");
  const HamiltonianTerm& term = h.term(step.term);
  if (term.is_pauli()) {
    ComplexMatrix m = ComplexMatrix::identity(h.dim());
    apply_pauli_rotation(term.pauli(), step_angle(step, h), m);
    return m;
  }
  const double scale = step.rescaled ? h.lambda() / h.term_norms()[step.term] : 1.0;
  return expm_hermitian(scale * term.coefficient * term.matrix(), step.duration);
}

ProductFormulaPlan qdrift_sample(const Hamiltonian& h, double t, std::uint64_t gates,
                                 SeededRng& rng) {
  if (gates < 1) throw ValidationError("qdrift_sample: gate count must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("qdrift_sample: t must be >= 0");
  std::vector<double> cdf(h.num_terms());
  std::partial_sum(h.probabilities().begin(), h.probabilities().end(), cdf.begin());
  cdf.back() = 1.0;

  ProductFormulaPlan plan;
  plan.meta = base_meta(h, "qdrift", t);
  plan.meta.gates = gates;
  plan.meta.seed = rng.seed();
  plan.meta.stream = rng.stream();
  plan.steps.reserve(gates);
  const double duration = t / static_cast<double>(gates);
  for (std::uint64_t k = 0; k < gates; ++k) {
    plan.steps.push_back({rng.categorical(cdf), duration, true});
  }
  return plan;
}

ProductFormulaPlan first_order_plan(const Hamiltonian& h, double t, std::uint64_t gates) {
  const std::uint64_t terms = h.num_terms();
  if (gates < 1 || gates % terms != 0) {
    throw ValidationError("first_order_plan: gate count must be a positive multiple of L = " +
                          std::to_string(terms));
  }
  ProductFormulaPlan plan;
  plan.meta = base_meta(h, "first-order", t);
  plan.meta.gates = gates;
  const double duration = t * static_cast<double>(terms) / static_cast<double>(gates);
  plan.steps.reserve(gates);
  for (std::uint64_t cycle = 0; cycle < gates / terms; ++cycle) {
    for (std::size_t j = 0; j < terms; ++j) plan.steps.push_back({j, duration, false});
  }
  return plan;
}

double suzuki_q(int p) {
  if (p < 1) throw ValidationError("suzuki_q: order parameter must be >= 1");
  return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * p - 1.0)));
}

ProductFormulaPlan suzuki2_plan(const Hamiltonian& h, double tau) {
  return suzuki2p_plan(h, tau, 1);
}

ProductFormulaPlan suzuki2p_plan(const Hamiltonian& h, double tau, int p) {
  return suzuki_blocks_plan(h, tau, 1, p);
}

ProductFormulaPlan suzuki_blocks_plan(const Hamiltonian& h, double t, int blocks, int p) {
  if (blocks < 1) throw ValidationError("suzuki plan: blocks must be >= 1");
  if (p < 1) throw ValidationError("suzuki plan: order parameter must be >= 1");
  std::vector<Segment> block;
  suzuki_segments(h.num_terms(), t / blocks, p, block);

  ProductFormulaPlan plan;
  plan.meta = base_meta(h, "suzuki", t);
  plan.meta.order = p;
  plan.meta.blocks = blocks;
  plan.steps.reserve(block.size() * blocks);
  for (int r = 0; r < blocks; ++r) {
    for (const auto& [term, duration] : block) plan.steps.push_back({term, duration, false});
  }
  return plan;
}

ProductFormulaPlan permuted_suzuki_plan(const Hamiltonian& h, double t, int blocks, int p,
                                        SeededRng& rng) {
  if (blocks < 1) throw ValidationError("permuted_suzuki_plan: blocks must be >= 1");
  if (p < 1) throw ValidationError("permuted_suzuki_plan: order parameter must be >= 1");
  std::vector<Segment> block;
  suzuki_segments(h.num_terms(), t / blocks, p, block);

  ProductFormulaPlan plan;
  plan.meta = base_meta(h, "permuted-suzuki", t);
  plan.meta.order = p;
  plan.meta.blocks = blocks;
  plan.meta.seed = rng.seed();
  plan.meta.stream = rng.stream();
  plan.steps.reserve(block.size() * blocks);

  std::vector<std::size_t> perm(h.num_terms());
  for (int r = 0; r < blocks; ++r) {
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
    }
    for (const auto& [term, duration] : block) plan.steps.push_back({perm[term], duration, false});
  }
  return plan;
}

ComplexMatrix realize_unitary(const ProductFormulaPlan& plan, const Hamiltonian& h) {
  require_dense(h, "realize_unitary");
  ComplexMatrix m = ComplexMatrix::identity(h.dim());
  for (const PlanStep& step : plan.steps) {
    const HamiltonianTerm& term = h.term(step.term);
    if (term.is_pauli()) {
      apply_pauli_rotation(term.pauli(), step_angle(step, h), m);
    } else {
      m = matmul(step_unitary(step, h), m);
    }
  }
  return m;
}

StateVector apply_plan(const ProductFormulaPlan& plan, const Hamiltonian& h,
                       const StateVector& psi) {
  if (psi.dim() != h.dim()) throw ValidationError("apply_plan: state dimension mismatch");
  StateVector out = psi;
  for (const PlanStep& step : plan.steps) {
    const HamiltonianTerm& term = h.term(step.term);
    if (term.is_pauli()) {
      apply_pauli_rotation(term.pauli(), step_angle(step, h), out.amplitudes());
    } else {
      out = apply(step_unitary(step, h), out);
    }
  }
  return out;
}

ComplexMatrix exact_unitary(const Hamiltonian& h, double t) {
  require_dense(h, "exact_unitary");
  if (t == 0.0) return ComplexMatrix::identity(h.dim());
  if (is_diagonal(h)) {
    const std::vector<double> phases = target_phases(h, t);
    std::vector<Complex> diag(phases.size());
    for (std::size_t b = 0; b < phases.size(); ++b) diag[b] = std::polar(1.0, -phases[b]);
    return ComplexMatrix::diagonal(diag);
  }
  return expm_hermitian(dense(h), t);
}

ComplexMatrix expected_step(const Hamiltonian& h, double t, std::uint64_t gates) {
  require_dense(h, "expected_step");
  if (gates < 1) throw ValidationError("expected_step: gate count must be >= 1");
  const double duration = t / static_cast<double>(gates);
  ComplexMatrix acc(h.dim());
  for (std::size_t j = 0; j < h.num_terms(); ++j) {
    const double pj = h.probabilities()[j];
    const PlanStep step{j, duration, true};
    const HamiltonianTerm& term = h.term(j);
    if (term.is_pauli()) {
      const double theta = step_angle(step, h);
      const PauliString& p = term.pauli();
      const double c = std::cos(theta);
      const Complex mis{0.0, -std::sin(theta)};
      for (std::size_t b = 0; b < h.dim(); ++b) {
        acc(b, b) += pj * c;
        acc(b ^ p.x_mask(), b) += pj * mis * p.phase(b);
      }
    } else {
      acc += pj * step_unitary(step, h);
    }
  }
  return acc;
}

void walsh_hadamard(std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    throw ValidationError("walsh_hadamard: size must be a power of two");
  }
  for (std::size_t len = 1; len < n; len <<= 1) {
    for (std::size_t i = 0; i < n; i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double a = values[j];
        const double b = values[j + len];
        values[j] = a + b;
        values[j + len] = a - b;
      }
    }
  }
}

std::vector<double> target_phases(const Hamiltonian& h, double t) {
  require_diagonal(h, "target_phases");
  std::vector<double> acc(h.dim(), 0.0);
  for (const auto& term : h.terms()) acc[term.pauli().z_mask()] += t * term.coefficient;
  walsh_hadamard(acc);
  return acc;
}

std::vector<double> plan_phases(const ProductFormulaPlan& plan, const Hamiltonian& h) {
  require_diagonal(h, "plan_phases");
  std::vector<double> acc(h.dim(), 0.0);
  for (const PlanStep& step : plan.steps) {
    acc[h.term(step.term).pauli().z_mask()] += step_angle(step, h);
  }
  walsh_hadamard(acc);
  return acc;
}

double phase_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ValidationError("phase_error: length mismatch");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, 2.0 * std::abs(std::sin(0.5 * (a[i] - b[i]))));
  }
  return worst;
}

}  // namespace qdrift
