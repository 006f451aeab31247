#include "qdrift/metrics.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

double capped(double x) { return std::min(1.0, x); }

// Markov on the q-th moment with the optimal q gives exp(-q/2). The moment
// bound needs q >= 2, so below that the tail is reported as vacuous.
double moment_tail(double q) { return q >= 2.0 ? std::exp(-q / 2.0) : 1.0; }

void require_gates(std::uint64_t gates, const char* op) {
  if (gates < 1) throw ValidationError(std::string(op) + ": gate count must be >= 1");
}

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0.0)) throw ValidationError(std::string(what) + " must be >= 0");
}

}  // namespace

std::string to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::OperatorNorm:
      return "operator-norm";
    case MetricKind::FixedInputL2:
      return "fixed-input-l2";
    case MetricKind::TraceDistance:
      return "trace-distance";
    case MetricKind::Diamond:
      return "diamond";
  }
  return "unknown";
}

double worst_case_error(const ComplexMatrix& u, const ComplexMatrix& v) {
  if (u.dim() != v.dim()) throw ValidationError("worst_case_error: dimension mismatch");
  return operator_norm(u - v);
}

double fixed_input_error(const ComplexMatrix& u, const ComplexMatrix& v, const StateVector& psi) {
  if (!psi.is_normalized()) throw ValidationError("fixed_input_error: state must be normalized");
  return l2_distance(apply(u, psi), apply(v, psi));
}

double fixed_input_trace_distance(const ComplexMatrix& u, const ComplexMatrix& v,
                                  const StateVector& psi) {
  return pure_trace_distance(apply(u, psi), apply(v, psi));
}

ErrorReport error_decomposition(const Hamiltonian& h, double t, std::uint64_t gates,
                                const ProductFormulaPlan& plan) {
  require_gates(gates, "error_decomposition");
  const ComplexMatrix u = exact_unitary(h, t);
  const ComplexMatrix v = realize_unitary(plan, h);
  const ComplexMatrix mean = matrix_power(expected_step(h, t, gates), gates);

  ErrorReport report;
  report.kind = MetricKind::OperatorNorm;
  report.bias = operator_norm(mean - u);
  report.fluctuation = operator_norm(v - mean);
  report.total = operator_norm(v - u);
  if (report.total > report.bias + report.fluctuation + 1e-12) {
    throw NumericError("error_decomposition: triangle inequality violated");
  }
  return report;
}

double bias_bound(double t, double lambda, std::uint64_t gates) {
  require_gates(gates, "bias_bound");
  return t * t * lambda * lambda / static_cast<double>(gates);
}

double step_bias_bound(double t, double lambda, std::uint64_t gates) {
  require_gates(gates, "step_bias_bound");
  const double n = static_cast<double>(gates);
  return t * t * lambda * lambda / (n * n);
}

double step_radius_bound(double t, double lambda, std::uint64_t gates) {
  require_gates(gates, "step_radius_bound");
  return 2.0 * t * lambda / static_cast<double>(gates);
}

double freedman_tail(double tau, double t, double lambda, std::uint64_t gates, int num_qubits) {
  require_nonnegative(tau, "freedman_tail: tau");
  require_gates(gates, "freedman_tail");
  const double tl = t * lambda;
  const double d = std::ldexp(1.0, num_qubits);
  const double denom = 8.0 * tl * tl + 4.0 * tl * tau / 3.0;
  if (denom == 0.0) return tau > 0.0 ? 0.0 : 1.0;
  return capped(2.0 * d * std::exp(-static_cast<double>(gates) * tau * tau / denom));
}

double freedman_tail_simplified(double eps, double t, double lambda, std::uint64_t gates,
                                int num_qubits) {
  require_nonnegative(eps, "freedman_tail_simplified: eps");
  require_gates(gates, "freedman_tail_simplified");
  const double tl2 = t * t * lambda * lambda;
  const double d = std::ldexp(1.0, num_qubits);
  if (tl2 == 0.0) return eps > 0.0 ? 0.0 : 1.0;
  return capped(2.0 * d * std::exp(-static_cast<double>(gates) * eps * eps / (44.0 * tl2)));
}

double general_freedman_tail(double tau, double variance, double radius, double dim) {
  require_nonnegative(tau, "general_freedman_tail: tau");
  require_nonnegative(variance, "general_freedman_tail: variance");
  require_nonnegative(radius, "general_freedman_tail: radius");
  const double denom = variance + radius * tau / 3.0;
  if (denom == 0.0) return tau > 0.0 ? 0.0 : 1.0;
  return capped(2.0 * dim * std::exp(-(tau * tau / 2.0) / denom));
}

double vector_tail_l2(double eps, double t, double lambda, std::uint64_t gates) {
  require_nonnegative(eps, "vector_tail_l2: eps");
  require_gates(gates, "vector_tail_l2");
  const double tl2 = t * t * lambda * lambda;
  if (tl2 == 0.0) return eps > 0.0 ? 0.0 : 1.0;
  return moment_tail(eps * eps * static_cast<double>(gates) / (4.0 * std::numbers::e * tl2));
}

double vector_tail_trace(double eps, double t, double lambda, std::uint64_t gates) {
  require_nonnegative(eps, "vector_tail_trace: eps");
  require_gates(gates, "vector_tail_trace");
  const double tl2 = t * t * lambda * lambda;
  if (tl2 == 0.0) return eps > 0.0 ? 0.0 : 1.0;
  return moment_tail(eps * eps * static_cast<double>(gates) / (16.0 * std::numbers::e * tl2));
}

double mixing_diamond_bound(const Hamiltonian& h, double t, std::uint64_t gates) {
  require_gates(gates, "mixing_diamond_bound");
  const ComplexMatrix mean = matrix_power(expected_step(h, t, gates), gates);
  return operator_norm(exact_unitary(h, t) - mean);
}

GateCounts gate_counts(double eps, double delta, double t, double lambda, int num_qubits) {
  if (!(eps > 0.0 && eps < 1.0)) throw ValidationError("gate_counts: eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("gate_counts: delta must lie in (0, 1)");
  if (num_qubits < 1) throw ValidationError("gate_counts: qubit count must be >= 1");
  const double tl2 = t * t * lambda * lambda;
  const double d = std::ldexp(1.0, num_qubits);

  GateCounts out;
  out.worst_case_real = 44.0 * tl2 / (eps * eps) * std::log(2.0 * d / delta) + 2.0 * tl2 / eps;
  out.fixed_input_real =
      std::max(32.0 * std::numbers::e * tl2 / (eps * eps) * std::log(1.0 / delta), tl2);
  out.average_real = 2.0 * tl2 / eps;
  out.worst_case = static_cast<std::uint64_t>(std::ceil(out.worst_case_real));
  out.fixed_input = static_cast<std::uint64_t>(std::ceil(out.fixed_input_real));
  out.average = static_cast<std::uint64_t>(std::ceil(out.average_real));
  return out;
}

BoundParams BoundParams::uniform(std::uint64_t steps, double a, double b, int num_qubits) {
  BoundParams p;
  p.a.assign(steps, a);
  p.b.assign(steps, b);
  p.radius = 2.0 * a;
  p.variance = static_cast<double>(steps) * a * a;
  p.num_qubits = num_qubits;
  return p;
}

Theorem3Bounds theorem3_bounds(const BoundParams& params, double prefactor) {
  if (params.a.size() != params.b.size()) {
    throw ValidationError("theorem3_bounds: a and b must have the same length");
  }
  for (double x : params.a) require_nonnegative(x, "theorem3_bounds: a_k");
  for (double x : params.b) require_nonnegative(x, "theorem3_bounds: b_k");
  require_nonnegative(params.radius, "theorem3_bounds: R");
  require_nonnegative(params.variance, "theorem3_bounds: v");
  if (params.num_qubits < 1) throw ValidationError("theorem3_bounds: qubit count must be >= 1");

  const double sum_a = std::accumulate(params.a.begin(), params.a.end(), 0.0);
  const double sum_a2 = std::inner_product(params.a.begin(), params.a.end(), params.a.begin(), 0.0);
  const double sum_b = std::accumulate(params.b.begin(), params.b.end(), 0.0);

  Theorem3Bounds out;
  out.worst = 2.0 * sum_a;
  out.typical = prefactor * std::sqrt(params.num_qubits * sum_a2) + 2.0 * sum_b;
  out.fixed = prefactor * std::sqrt(sum_a2) + 2.0 * sum_b;
  out.average = 2.0 * sum_b;
  return out;
}

double expected_diamond_error_estimate(double t, double lambda, std::uint64_t gates,
                                       int num_qubits, double constant) {
  require_gates(gates, "expected_diamond_error_estimate");
  const double n = static_cast<double>(gates);
  const double tl = t * lambda;
  return tl * tl / n + constant * num_qubits * tl / n +
         constant * std::sqrt(num_qubits * tl * tl / n);
}

}  // namespace qdrift
