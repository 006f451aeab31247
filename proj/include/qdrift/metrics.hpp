#pragma once

// Error metrics for realized product formulas and the closed-form qDRIFT
// bounds they are checked against.

#include <cstdint>
#include <string>
#include <vector>

#include "qdrift/formulas.hpp"
#include "qdrift/hamiltonian.hpp"
#include "qdrift/linalg.hpp"

namespace qdrift {

enum class MetricKind { OperatorNorm, FixedInputL2, TraceDistance, Diamond };

std::string to_string(MetricKind kind);

struct ErrorReport {
  double bias = 0.0;         // ||(E V)^N - U||
  double fluctuation = 0.0;  // ||V - (E V)^N||
  double total = 0.0;        // ||V - U||
  MetricKind kind = MetricKind::OperatorNorm;
};

// ||U - V||
double worst_case_error(const ComplexMatrix& u, const ComplexMatrix& v);

// ||(U - V) psi||_2
double fixed_input_error(const ComplexMatrix& u, const ComplexMatrix& v, const StateVector& psi);
// Trace distance between U psi and V psi.
double fixed_input_trace_distance(const ComplexMatrix& u, const ComplexMatrix& v,
                                  const StateVector& psi);

// Splits ||V_plan - U|| into bias and fluctuation. Throws NumericError if the
// triangle inequality fails by more than 1e-12.
ErrorReport error_decomposition(const Hamiltonian& h, double t, std::uint64_t gates,
                                const ProductFormulaPlan& plan);

// Closed-form qDRIFT quantities.
double bias_bound(double t, double lambda, std::uint64_t gates);         // t^2 lambda^2 / N
double step_bias_bound(double t, double lambda, std::uint64_t gates);    // t^2 lambda^2 / N^2
double step_radius_bound(double t, double lambda, std::uint64_t gates);  // 2 t lambda / N

// Pr[||V_N...V_1 - (E V)^N|| >= tau] <= 2d exp(-N tau^2 / (8 (t lambda)^2 + 4 t lambda tau / 3)),
// capped at 1. Valid in both the subgaussian and the subexponential regime.
double freedman_tail(double tau, double t, double lambda, std::uint64_t gates, int num_qubits);
// Simplified form bounding Pr[... >= eps/2] by 2d exp(-N eps^2 / (44 t^2 lambda^2)),
// stated for eps in [0, 4 t lambda].
double freedman_tail_simplified(double eps, double t, double lambda, std::uint64_t gates,
                                int num_qubits);
// Matrix Freedman: 2d exp(-(tau^2/2) / (v + R tau / 3)), capped at 1.
double general_freedman_tail(double tau, double variance, double radius, double dim);

// Fixed input, no dimension factor. The l2 variant bounds
// Pr[||(V - (E V)^N) psi||_2 > eps] by exp(-eps^2 N / (8e t^2 lambda^2)).
// Both variants return 1 where that exponent is below 1: the moment argument
// behind them only covers q = 2 * exponent >= 2.
double vector_tail_l2(double eps, double t, double lambda, std::uint64_t gates);
// Bounds Pr[trace distance(U psi, V psi) > eps] by exp(-eps^2 N / (32e t^2 lambda^2)),
// i.e. vector_tail_l2 with the exponent divided by 4.
double vector_tail_trace(double eps, double t, double lambda, std::uint64_t gates);

// ||U - (E V)^N||, which upper-bounds half the diamond distance between the
// target channel and the averaged qDRIFT channel.
double mixing_diamond_bound(const Hamiltonian& h, double t, std::uint64_t gates);

struct GateCounts {
  std::uint64_t worst_case = 0;
  std::uint64_t fixed_input = 0;
  std::uint64_t average = 0;
  // Pre-rounding values.
  double worst_case_real = 0.0;
  double fixed_input_real = 0.0;
  double average_real = 0.0;
};

// Sufficient gate counts:
//   worst case: 44 (t lambda / eps)^2 log(2d/delta) + 2 t^2 lambda^2 / eps
//   fixed input: max(32e (t lambda / eps)^2 log(1/delta), t^2 lambda^2)
//   average channel: 2 t^2 lambda^2 / eps
GateCounts gate_counts(double eps, double delta, double t, double lambda, int num_qubits);

struct BoundParams {
  std::vector<double> a;  // per-step deviation bounds a_k
  std::vector<double> b;  // per-step conditional bias bounds b_k
  double radius = 0.0;    // R
  double variance = 0.0;  // v
  int num_qubits = 1;

  static BoundParams uniform(std::uint64_t steps, double a, double b, int num_qubits);
  std::size_t steps() const { return a.size(); }
};

struct Theorem3Bounds {
  double worst = 0.0;
  double typical = 0.0;
  double fixed = 0.0;
  double average = 0.0;
};

// The typical and fixed-input values carry an unspecified absolute constant;
// `prefactor` multiplies their square-root terms.
Theorem3Bounds theorem3_bounds(const BoundParams& params, double prefactor = 1.0);

// t^2 lambda^2/N + C n t lambda / N + C sqrt(n t^2 lambda^2 / N)
double expected_diamond_error_estimate(double t, double lambda, std::uint64_t gates,
                                       int num_qubits, double constant);

}  // namespace qdrift
