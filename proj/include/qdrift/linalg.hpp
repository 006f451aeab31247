#pragma once

// Dense complex linear algebra at desk scale (d <= 4096).
//
// Everything here is a pure function over immutable values. Matrices are
// square and stored row-major.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qdrift {

using Complex = std::complex<double>;

inline constexpr std::size_t kMaxDenseDim = 4096;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  // Zero matrix of size dim x dim.
  explicit ComplexMatrix(std::size_t dim);
  ComplexMatrix(std::size_t dim, std::vector<Complex> row_major);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix diagonal(std::span<const Complex> entries);

  std::size_t dim() const { return dim_; }

  Complex& operator()(std::size_t row, std::size_t col) { return data_[row * dim_ + col]; }
  const Complex& operator()(std::size_t row, std::size_t col) const {
    return data_[row * dim_ + col];
  }

  std::span<Complex> row(std::size_t r) { return {data_.data() + r * dim_, dim_}; }
  std::span<const Complex> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }

  std::span<const Complex> data() const { return data_; }
  std::span<Complex> data() { return data_; }

  ComplexMatrix adjoint() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scalar);

  friend ComplexMatrix operator+(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs += rhs; }
  friend ComplexMatrix operator-(ComplexMatrix lhs, const ComplexMatrix& rhs) { return lhs -= rhs; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix m) { return m *= s; }
  friend ComplexMatrix operator*(ComplexMatrix m, Complex s) { return m *= s; }

  // max_ij |a_ij|
  double max_abs() const;
  double frobenius_norm() const;
  bool all_finite() const;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t dim);
  explicit StateVector(std::vector<Complex> amplitudes);

  // Computational basis state |index>.
  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return amps_.size(); }
  Complex& operator[](std::size_t i) { return amps_[i]; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  std::span<const Complex> amplitudes() const { return amps_; }
  std::span<Complex> amplitudes() { return amps_; }

  double norm() const;
  bool is_normalized(double tol = 1e-10) const;

 private:
  std::vector<Complex> amps_;
};

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column k belongs to eigenvalues[k]
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

// Binary exponentiation, power >= 0.
ComplexMatrix matrix_power(const ComplexMatrix& a, unsigned long long power);

// Cyclic complex Jacobi. Throws ValidationError for non-Hermitian input and
// NumericError if 100 sweeps do not reach off-diagonal mass <= 1e-13 ||H||_F.
HermitianEigen hermitian_eig(const ComplexMatrix& h);

// exp(-i * theta * H) for Hermitian H.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double theta);

// Largest singular value, via the full spectrum of A^dagger A.
double operator_norm(const ComplexMatrix& a);

Complex inner(const StateVector& u, const StateVector& v);  // <u, v>, conjugate-linear in u
double l2_distance(const StateVector& u, const StateVector& v);

// sqrt(1 - |<u,v>|^2): the trace distance of the two pure states.
double pure_trace_distance(const StateVector& u, const StateVector& v);

StateVector apply(const ComplexMatrix& u, const StateVector& psi);

// Eigenvalues of a unitary matrix, each normalized onto the unit circle.
// Uses a joint diagonalization of the commuting Hermitian parts
// (W + W^dagger)/2 and (W - W^dagger)/(2i).
std::vector<Complex> unitary_eigenvalues(const ComplexMatrix& w);

// Euclidean distance from the origin to the convex hull of points.
// Zero when the hull contains the origin.
double distance_to_hull(std::span<const Complex> points);

// Half the diamond norm distance between the unitary channels of U and V.
double unitary_diamond_distance(const ComplexMatrix& u, const ComplexMatrix& v);

// max_ij |(M^dagger M - I)_ij|
double unitarity_defect(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);

}  // namespace qdrift
