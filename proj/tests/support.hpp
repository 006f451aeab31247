#pragma once

#include <cmath>

#include "qdrift/hamiltonian.hpp"
#include "qdrift/linalg.hpp"
#include "qdrift/rng.hpp"

namespace qdrift::testing {

inline ComplexMatrix random_hermitian(std::size_t d, SeededRng& rng) {
  ComplexMatrix h(d);
  for (std::size_t i = 0; i < d; ++i) {
    h(i, i) = rng.normal();
    for (std::size_t j = i + 1; j < d; ++j) {
      h(i, j) = Complex{rng.normal(), rng.normal()} / std::sqrt(2.0);
      h(j, i) = std::conj(h(i, j));
    }
  }
  return h;
}

inline ComplexMatrix random_unitary(std::size_t d, SeededRng& rng, double scale = 3.0) {
  return expm_hermitian(random_hermitian(d, rng), scale);
}

inline StateVector random_state(std::size_t d, SeededRng& rng) {
  std::vector<Complex> a(d);
  double norm = 0.0;
  for (auto& z : a) {
    z = {rng.normal(), rng.normal()};
    norm += std::norm(z);
  }
  for (auto& z : a) z /= std::sqrt(norm);
  return StateVector(std::move(a));
}

// exp(-i theta H) by a plain Taylor series.
inline ComplexMatrix taylor_expm(const ComplexMatrix& h, double theta, int terms = 60) {
  const std::size_t d = h.dim();
  ComplexMatrix sum = ComplexMatrix::identity(d);
  ComplexMatrix term = ComplexMatrix::identity(d);
  const ComplexMatrix a = Complex{0.0, -theta} * h;
  for (int k = 1; k < terms; ++k) {
    term = matmul(term, a) * Complex{1.0 / k, 0.0};
    sum += term;
  }
  return sum;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).max_abs(); }

}  // namespace qdrift::testing
