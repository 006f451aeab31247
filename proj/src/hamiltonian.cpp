#include "qdrift/hamiltonian.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

void check_qubits(int n, int cap, const char* what) {
  if (n < 1 || n > cap) {
    throw ValidationError(std::string(what) + ": qubit count " + std::to_string(n) +
                          " outside [1, " + std::to_string(cap) + "]");
  }
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

// ---- PauliString -----------------------------------------------------------

PauliString::PauliString(std::string_view letters) : letters_(letters) {
  const int n = static_cast<int>(letters_.size());
  check_qubits(n, 63, "PauliString");
  for (int k = 0; k < n; ++k) {
    const std::uint64_t bit = std::uint64_t{1} << (n - 1 - k);
    switch (letters_[k]) {
      case 'I':
        break;
      case 'X':
        x_mask_ |= bit;
        break;
      case 'Y':
        x_mask_ |= bit;
        z_mask_ |= bit;
        ++num_y_;
        break;
      case 'Z':
        z_mask_ |= bit;
        break;
      default:
        throw ValidationError("PauliString: invalid letter '" + std::string(1, letters_[k]) + "'");
    }
  }
}

PauliString PauliString::identity(int n) { return PauliString(std::string(n, 'I')); }

PauliString PauliString::z_mask(int n, std::uint64_t mask) {
  std::string s(n, 'I');
  for (int k = 0; k < n; ++k) {
    if ((mask >> (n - 1 - k)) & 1ULL) s[k] = 'Z';
  }
  return PauliString(s);
}

PauliString PauliString::single(int n, int qubit, char letter) {
  if (qubit < 0 || qubit >= n) throw ValidationError("PauliString::single: qubit out of range");
  std::string s(n, 'I');
  s[qubit] = letter;
  return PauliString(s);
}

Complex PauliString::phase(std::uint64_t b) const {
  // P = i^{#Y} X^{x} Z^{z}, with Z applied first.
  static constexpr Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const int sign_flips = std::popcount(b & z_mask_) & 1;
  const Complex base = kIPow[num_y_ & 3];
  return sign_flips ? -base : base;
}

ComplexMatrix PauliString::dense() const {
  const std::size_t d = std::size_t{1} << num_qubits();
  ComplexMatrix m(d);
  for (std::size_t b = 0; b < d; ++b) m(b ^ x_mask_, b) = phase(b);
  return m;
}

void apply_pauli(const PauliString& p, std::span<Complex> psi) {
  const std::uint64_t x = p.x_mask();
  if (x == 0) {
    for (std::size_t b = 0; b < psi.size(); ++b) psi[b] *= p.phase(b);
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t b = 0; b < psi.size(); ++b) {
    if (b & top) continue;
    const std::size_t c = b ^ x;
    const Complex pb = psi[b];
    const Complex pc = psi[c];
    psi[c] = p.phase(b) * pb;
    psi[b] = p.phase(c) * pc;
  }
}

void apply_pauli_rotation(const PauliString& p, double theta, std::span<Complex> psi) {
  const double c = std::cos(theta);
  const Complex mis{0.0, -std::sin(theta)};
  const std::uint64_t x = p.x_mask();
  if (x == 0) {
    for (std::size_t b = 0; b < psi.size(); ++b) psi[b] *= c + mis * p.phase(b);
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t b = 0; b < psi.size(); ++b) {
    if (b & top) continue;
    const std::size_t o = b ^ x;
    const Complex pb = psi[b];
    const Complex po = psi[o];
    // (P psi)[o] = phase(b) psi[b], (P psi)[b] = phase(o) psi[o]
    psi[b] = c * pb + mis * p.phase(o) * po;
    psi[o] = c * po + mis * p.phase(b) * pb;
  }
}

void apply_pauli_rotation(const PauliString& p, double theta, ComplexMatrix& m) {
  const std::size_t d = m.dim();
  if (d != (std::size_t{1} << p.num_qubits())) {
    throw ValidationError("apply_pauli_rotation: dimension mismatch");
  }
  const double c = std::cos(theta);
  const Complex mis{0.0, -std::sin(theta)};
  const std::uint64_t x = p.x_mask();
  if (x == 0) {
    for (std::size_t b = 0; b < d; ++b) {
      const Complex f = c + mis * p.phase(b);
      for (auto& v : m.row(b)) v *= f;
    }
    return;
  }
  const std::uint64_t top = std::uint64_t{1} << (63 - std::countl_zero(x));
  for (std::size_t b = 0; b < d; ++b) {
    if (b & top) continue;
    const std::size_t o = b ^ x;
    const Complex fb = mis * p.phase(o);
    const Complex fo = mis * p.phase(b);
    auto rb = m.row(b);
    auto ro = m.row(o);
    for (std::size_t j = 0; j < d; ++j) {
      const Complex vb = rb[j];
      const Complex vo = ro[j];
      rb[j] = c * vb + fb * vo;
      ro[j] = c * vo + fo * vb;
    }
  }
}

// ---- terms and Hamiltonians ------------------------------------------------

double term_norm(const HamiltonianTerm& term) {
  if (term.is_pauli()) return std::abs(term.coefficient);
  return std::abs(term.coefficient) * operator_norm(term.matrix());
}

Hamiltonian::Hamiltonian(int num_qubits, std::vector<HamiltonianTerm> terms)
    : n_(num_qubits), terms_(std::move(terms)) {
  check_qubits(n_, kMaxStateQubits, "Hamiltonian");
  if (terms_.empty()) throw ValidationError("Hamiltonian: at least one term required");
  norms_.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!std::isfinite(t.coefficient) || t.coefficient == 0.0) {
      throw ValidationError("Hamiltonian: coefficients must be finite and nonzero");
    }
    if (t.is_pauli()) {
      if (t.pauli().num_qubits() != n_) {
        throw ValidationError("Hamiltonian: Pauli string length " +
                              std::to_string(t.pauli().num_qubits()) + " != " +
                              std::to_string(n_));
      }
    } else {
      if (n_ > kMaxDenseQubits || t.matrix().dim() != dim()) {
        throw ValidationError("Hamiltonian: dense term has wrong dimension");
      }
      if (hermiticity_defect(t.matrix()) > 1e-10 * std::max(1.0, t.matrix().max_abs())) {
        throw ValidationError("Hamiltonian: dense term is not Hermitian");
      }
    }
    const double nrm = term_norm(t);
    if (!(nrm > 0.0)) throw ValidationError("Hamiltonian: term with zero norm");
    norms_.push_back(nrm);
  }
  stats_.lambda = std::accumulate(norms_.begin(), norms_.end(), 0.0);
  stats_.max_norm = *std::max_element(norms_.begin(), norms_.end());
  stats_.probabilities.reserve(norms_.size());
  for (double v : norms_) stats_.probabilities.push_back(v / stats_.lambda);
}

std::string Hamiltonian::fingerprint() const {
  std::uint64_t h = 14695981039346656037ULL;
  h = fnv1a(h, &n_, sizeof n_);
  for (const auto& t : terms_) {
    h = fnv1a(h, &t.coefficient, sizeof t.coefficient);
    if (t.is_pauli()) {
      h = fnv1a(h, t.pauli().letters().data(), t.pauli().letters().size());
    } else {
      const auto data = t.matrix().data();
      h = fnv1a(h, data.data(), data.size() * sizeof(Complex));
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

StrengthStats strength_stats(const Hamiltonian& h) { return h.stats(); }

ComplexMatrix dense(const HamiltonianTerm& term, int num_qubits) {
  check_qubits(num_qubits, kMaxDenseQubits, "dense");
  if (!term.is_pauli()) return term.coefficient * term.matrix();
  const PauliString& p = term.pauli();
  const std::size_t d = std::size_t{1} << num_qubits;
  ComplexMatrix m(d);
  for (std::size_t b = 0; b < d; ++b) m(b ^ p.x_mask(), b) = term.coefficient * p.phase(b);
  return m;
}

ComplexMatrix dense(const Hamiltonian& h) {
  check_qubits(h.num_qubits(), kMaxDenseQubits, "dense");
  const std::size_t d = h.dim();
  ComplexMatrix m(d);
  for (const auto& t : h.terms()) {
    if (t.is_pauli()) {
      const PauliString& p = t.pauli();
      for (std::size_t b = 0; b < d; ++b) m(b ^ p.x_mask(), b) += t.coefficient * p.phase(b);
    } else {
      m += t.coefficient * t.matrix();
    }
  }
  return m;
}

bool is_diagonal(const Hamiltonian& h) {
  return std::all_of(h.terms().begin(), h.terms().end(),
                     [](const HamiltonianTerm& t) { return t.is_pauli() && t.pauli().is_diagonal(); });
}

// ---- builders --------------------------------------------------------------

Hamiltonian heisenberg_1d(int n) {
  if (n < 2) throw ValidationError("heisenberg_1d: need n >= 2");
  check_qubits(n, kMaxStateQubits, "heisenberg_1d");
  const double c = 1.0 / (n - 1);
  std::vector<HamiltonianTerm> terms;
  terms.reserve(3 * (n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    for (char letter : {'X', 'Y', 'Z'}) {
      std::string s(n, 'I');
      s[i] = letter;
      s[i + 1] = letter;
      terms.push_back({c, PauliString(s)});
    }
  }
  return Hamiltonian(n, std::move(terms));
}

Hamiltonian single_site_z(int n, double scale) {
  check_qubits(n, kMaxStateQubits, "single_site_z");
  std::vector<HamiltonianTerm> terms;
  terms.reserve(n);
  for (int k = 0; k < n; ++k) terms.push_back({scale, PauliString::single(n, k, 'Z')});
  return Hamiltonian(n, std::move(terms));
}

Hamiltonian all_z_strings(int n, std::span<const int> signs, double weight) {
  check_qubits(n, kMaxDenseQubits, "all_z_strings");
  const std::size_t count = std::size_t{1} << n;
  if (signs.size() != count) {
    throw ValidationError("all_z_strings: expected " + std::to_string(count) + " signs");
  }
  std::vector<HamiltonianTerm> terms;
  terms.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    if (signs[p] != 1 && signs[p] != -1) throw ValidationError("all_z_strings: signs must be +-1");
    terms.push_back({signs[p] * weight, PauliString::z_mask(n, p)});
  }
  return Hamiltonian(n, std::move(terms));
}

Hamiltonian all_z_strings(int n, double weight) {
  check_qubits(n, kMaxDenseQubits, "all_z_strings");
  const std::vector<int> signs(std::size_t{1} << n, 1);
  return all_z_strings(n, signs, weight);
}

}  // namespace qdrift
