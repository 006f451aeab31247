#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qdrift/linalg.hpp"

namespace qdrift {

// Qubit k is the k-th tensor factor from the left, i.e. bit (n-1-k) of a
// computational basis index. Letter k of a Pauli string acts on qubit k.
inline constexpr int kMaxDenseQubits = 12;
inline constexpr int kMaxStateQubits = 24;

class PauliString {
 public:
  PauliString() = default;
  // Letters from {I, X, Y, Z}; throws ValidationError otherwise.
  explicit PauliString(std::string_view letters);

  static PauliString identity(int n);
  // Z on every qubit whose bit is set in `mask` (bit n-1-k <-> qubit k).
  static PauliString z_mask(int n, std::uint64_t mask);
  static PauliString single(int n, int qubit, char letter);

  int num_qubits() const { return static_cast<int>(letters_.size()); }
  const std::string& letters() const { return letters_; }

  // P|b> = phase(b) |b ^ x_mask>
  std::uint64_t x_mask() const { return x_mask_; }
  std::uint64_t z_mask() const { return z_mask_; }
  Complex phase(std::uint64_t basis_index) const;

  bool is_diagonal() const { return x_mask_ == 0; }

  ComplexMatrix dense() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.letters_ == b.letters_;
  }

 private:
  std::string letters_;
  std::uint64_t x_mask_ = 0;
  std::uint64_t z_mask_ = 0;
  int num_y_ = 0;
};

// psi <- P psi
void apply_pauli(const PauliString& p, std::span<Complex> psi);
// psi <- exp(-i theta P) psi = cos(theta) psi - i sin(theta) P psi
void apply_pauli_rotation(const PauliString& p, double theta, std::span<Complex> psi);
// m <- exp(-i theta P) m, column by column.
void apply_pauli_rotation(const PauliString& p, double theta, ComplexMatrix& m);

struct HamiltonianTerm {
  double coefficient = 1.0;
  std::variant<PauliString, ComplexMatrix> op;

  bool is_pauli() const { return std::holds_alternative<PauliString>(op); }
  const PauliString& pauli() const { return std::get<PauliString>(op); }
  const ComplexMatrix& matrix() const { return std::get<ComplexMatrix>(op); }
};

double term_norm(const HamiltonianTerm& term);

struct StrengthStats {
  double lambda = 0.0;       // sum_j ||h_j||
  double max_norm = 0.0;     // max_j ||h_j||
  std::vector<double> probabilities;
};

class Hamiltonian {
 public:
  Hamiltonian(int num_qubits, std::vector<HamiltonianTerm> terms);

  int num_qubits() const { return n_; }
  std::size_t dim() const { return std::size_t{1} << n_; }
  std::size_t num_terms() const { return terms_.size(); }
  const std::vector<HamiltonianTerm>& terms() const { return terms_; }
  const HamiltonianTerm& term(std::size_t j) const { return terms_.at(j); }

  double lambda() const { return stats_.lambda; }
  double max_term_norm() const { return stats_.max_norm; }
  const std::vector<double>& probabilities() const { return stats_.probabilities; }
  const std::vector<double>& term_norms() const { return norms_; }
  const StrengthStats& stats() const { return stats_; }

  // Stable textual hash of the term list, for provenance metadata.
  std::string fingerprint() const;

 private:
  int n_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<double> norms_;
  StrengthStats stats_;
};

StrengthStats strength_stats(const Hamiltonian& h);

// Sum_j c_j P_j as a dense Hermitian matrix; n <= 12.
ComplexMatrix dense(const Hamiltonian& h);
ComplexMatrix dense(const HamiltonianTerm& term, int num_qubits);

bool is_diagonal(const Hamiltonian& h);

// 1/(n-1) sum_i X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}; lambda = 3.
Hamiltonian heisenberg_1d(int n);

// sum_k scale * Z_k
Hamiltonian single_site_z(int n, double scale);

// sum_p signs[p] * weight * Z_p over all p in {0,1}^n; term index == p.
Hamiltonian all_z_strings(int n, std::span<const int> signs, double weight);
Hamiltonian all_z_strings(int n, double weight);

}  // namespace qdrift
