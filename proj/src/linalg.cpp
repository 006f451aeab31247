#include "qdrift/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qdrift/errors.hpp"

namespace qdrift {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    throw ValidationError(std::string(op) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

double cross(Complex o, Complex a, Complex b) {
  return (a.real() - o.real()) * (b.imag() - o.imag()) -
         (a.imag() - o.imag()) * (b.real() - o.real());
}

// Distance from the origin to segment [a, b], and the clamped parameter.
double origin_to_segment(Complex a, Complex b, double* param) {
  const Complex ab = b - a;
  const double len2 = std::norm(ab);
  double s = 0.0;
  if (len2 > 0.0) {
    s = std::clamp(-(a.real() * ab.real() + a.imag() * ab.imag()) / len2, 0.0, 1.0);
  }
  if (param != nullptr) *param = s;
  return std::abs(a + s * ab);
}

// Andrew's monotone chain; returns the hull counter-clockwise without
// repeating the first vertex.
std::vector<Complex> convex_hull(std::span<const Complex> points) {
  std::vector<Complex> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
    return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  std::vector<Complex> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Complex& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

struct HullProximity {
  double distance = 0.0;
  bool contains_origin = false;
  // Endpoints of the closest edge when the closest point is interior to it.
  bool on_edge = false;
  Complex edge_a, edge_b;
};

HullProximity hull_proximity(std::span<const Complex> points) {
  HullProximity out;
  const std::vector<Complex> hull = convex_hull(points);
  if (hull.empty()) throw ValidationError("distance_to_hull: no points");
  if (hull.size() == 1) {
    out.distance = std::abs(hull[0]);
    out.contains_origin = out.distance == 0.0;
    return out;
  }
  if (hull.size() >= 3) {
    bool inside = true;
    for (std::size_t i = 0; i < hull.size(); ++i) {
      if (cross(hull[i], hull[(i + 1) % hull.size()], Complex{0.0, 0.0}) < -1e-14) {
        inside = false;
        break;
      }
    }
    if (inside) {
      out.contains_origin = true;
      return out;
    }
  }
  out.distance = std::numeric_limits<double>::infinity();
  const std::size_t edges = hull.size() == 2 ? 1 : hull.size();
  for (std::size_t i = 0; i < edges; ++i) {
    const Complex a = hull[i];
    const Complex b = hull[(i + 1) % hull.size()];
    double s = 0.0;
    const double dist = origin_to_segment(a, b, &s);
    if (dist < out.distance) {
      out.distance = dist;
      out.on_edge = s > 0.0 && s < 1.0;
      out.edge_a = a;
      out.edge_b = b;
    }
  }
  out.contains_origin = out.distance == 0.0;
  return out;
}

// Jacobi core. `a` is overwritten; when `vecs_rows` is non-null it receives
// eigenvectors as rows (row k = eigenvector k) in unsorted order.
std::vector<double> jacobi(ComplexMatrix a, ComplexMatrix* vecs_rows) {
  const std::size_t d = a.dim();
  if (vecs_rows != nullptr) *vecs_rows = ComplexMatrix::identity(d);
  const double fro = a.frobenius_norm();
  const double tol =
      std::max(1e-13 * fro, static_cast<double>(d) * std::numeric_limits<double>::epsilon() * fro);
  constexpr int kMaxSweeps = 100;

  for (std::size_t i = 0; i < d; ++i) a(i, i) = Complex{a(i, i).real(), 0.0};

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i + 1; j < d; ++j) s += std::norm(a(i, j));
    }
    return std::sqrt(2.0 * s);
  };

  int sweep = 0;
  for (; sweep <= kMaxSweeps; ++sweep) {
    if (off_mass() <= tol) break;
    if (sweep == kMaxSweeps) {
      throw NumericError("hermitian_eig: no convergence after " + std::to_string(kMaxSweeps) +
                         " sweeps");
    }
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const Complex b = a(p, q);
        const double mag = std::abs(b);
        if (mag == 0.0) continue;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        if (sweep > 3 && std::abs(app) + 100.0 * mag == std::abs(app) &&
            std::abs(aqq) + 100.0 * mag == std::abs(aqq)) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        const double tau = (aqq - app) / (2.0 * mag);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const Complex phase = std::conj(b) / mag;  // e^{-i arg b}
        // R = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] on (p, q).
        const Complex rpp{c, 0.0};
        const Complex rpq{s, 0.0};
        const Complex rqp = -s * phase;
        const Complex rqq = c * phase;
        const Complex crpp = std::conj(rpp), crpq = std::conj(rpq);
        const Complex crqp = std::conj(rqp), crqq = std::conj(rqq);

        auto rp = a.row(p);
        auto rq = a.row(q);
        for (std::size_t k = 0; k < d; ++k) {
          if (k == p || k == q) continue;
          const Complex apk = rp[k];
          const Complex aqk = rq[k];
          const Complex np = crpp * apk + crqp * aqk;
          const Complex nq = crpq * apk + crqq * aqk;
          rp[k] = np;
          rq[k] = nq;
          a(k, p) = std::conj(np);
          a(k, q) = std::conj(nq);
        }
        a(p, p) = app - t * mag;
        a(q, q) = aqq + t * mag;
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        if (vecs_rows != nullptr) {
          // V <- V R, with V stored transposed.
          auto vp = vecs_rows->row(p);
          auto vq = vecs_rows->row(q);
          for (std::size_t k = 0; k < d; ++k) {
            const Complex x = vp[k];
            const Complex y = vq[k];
            vp[k] = rpp * x + rqp * y;
            vq[k] = rpq * x + rqq * y;
          }
        }
      }
    }
  }
  std::vector<double> evals(d);
  for (std::size_t i = 0; i < d; ++i) evals[i] = a(i, i).real();
  return evals;
}

void require_hermitian(const ComplexMatrix& h, const char* op) {
  if (h.dim() == 0) throw ValidationError(std::string(op) + ": empty matrix");
  if (!h.all_finite()) throw ValidationError(std::string(op) + ": non-finite entries");
  const double tol = 1e-10 * std::max(1.0, h.max_abs());
  if (hermiticity_defect(h) > tol) {
    throw ValidationError(std::string(op) + ": matrix is not Hermitian");
  }
}

}  // namespace

// ---- ComplexMatrix ---------------------------------------------------------

ComplexMatrix::ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (data_.size() != dim_ * dim_) {
    throw ValidationError("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                          " entries, got " + std::to_string(data_.size()));
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> entries) {
  ComplexMatrix m(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) m(i, i) = entries[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) out(j, i) = std::conj((*this)(i, j));
  }
  return out;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix +");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(dim_, other.dim_, "matrix -");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scalar) {
  for (auto& x : data_) x *= scalar;
  return *this;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& x : data_) s += std::norm(x);
  return std::sqrt(s);
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& x) {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  });
}

// ---- StateVector -----------------------------------------------------------

StateVector::StateVector(std::size_t dim) : amps_(dim) {}

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw ValidationError("StateVector::basis: index out of range");
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return std::sqrt(s);
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

// ---- operations ------------------------------------------------------------

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "matmul");
  const std::size_t d = a.dim();
  ComplexMatrix c(d);
  for (std::size_t i = 0; i < d; ++i) {
    auto ci = c.row(i);
    const auto ai = a.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      const Complex aik = ai[k];
      if (aik == Complex{}) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < d; ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

ComplexMatrix matrix_power(const ComplexMatrix& a, unsigned long long power) {
  ComplexMatrix result = ComplexMatrix::identity(a.dim());
  ComplexMatrix base = a;
  while (power > 0) {
    if (power & 1ULL) result = matmul(result, base);
    power >>= 1;
    if (power > 0) base = matmul(base, base);
  }
  return result;
}

HermitianEigen hermitian_eig(const ComplexMatrix& h) {
  require_hermitian(h, "hermitian_eig");
  if (h.dim() > kMaxDenseDim) throw ValidationError("hermitian_eig: dimension above 4096");
  ComplexMatrix rows;
  const std::vector<double> evals = jacobi(h, &rows);
  const std::size_t d = h.dim();

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return evals[x] < evals[y]; });

  HermitianEigen out;
  out.eigenvalues.resize(d);
  out.eigenvectors = ComplexMatrix(d);
  for (std::size_t k = 0; k < d; ++k) {
    out.eigenvalues[k] = evals[order[k]];
    const auto v = rows.row(order[k]);
    for (std::size_t i = 0; i < d; ++i) out.eigenvectors(i, k) = v[i];
  }
  return out;
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double theta) {
  const HermitianEigen eig = hermitian_eig(h);
  const std::size_t d = h.dim();
  ComplexMatrix scaled = eig.eigenvectors;
  for (std::size_t k = 0; k < d; ++k) {
    const Complex ph = std::polar(1.0, -theta * eig.eigenvalues[k]);
    for (std::size_t i = 0; i < d; ++i) scaled(i, k) *= ph;
  }
  return matmul(scaled, eig.eigenvectors.adjoint());
}

double operator_norm(const ComplexMatrix& a) {
  if (a.dim() == 0) throw ValidationError("operator_norm: empty matrix");
  if (!a.all_finite()) throw ValidationError("operator_norm: non-finite entries");
  if (a.dim() > kMaxDenseDim) throw ValidationError("operator_norm: dimension above 4096");
  const ComplexMatrix gram = matmul(a.adjoint(), a);
  const std::vector<double> evals = jacobi(gram, nullptr);
  const double top = *std::max_element(evals.begin(), evals.end());
  return std::sqrt(std::max(0.0, top));
}

Complex inner(const StateVector& u, const StateVector& v) {
  require_same_dim(u.dim(), v.dim(), "inner");
  Complex s{};
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

double l2_distance(const StateVector& u, const StateVector& v) {
  require_same_dim(u.dim(), v.dim(), "l2_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < u.dim(); ++i) s += std::norm(u[i] - v[i]);
  return std::sqrt(s);
}

double pure_trace_distance(const StateVector& u, const StateVector& v) {
  if (!u.is_normalized() || !v.is_normalized()) {
    throw ValidationError("pure_trace_distance: states must be normalized");
  }
  const double overlap = std::min(1.0, std::norm(inner(u, v)));
  return std::sqrt(1.0 - overlap);
}

StateVector apply(const ComplexMatrix& u, const StateVector& psi) {
  require_same_dim(u.dim(), psi.dim(), "apply");
  StateVector out(psi.dim());
  for (std::size_t i = 0; i < u.dim(); ++i) {
    const auto r = u.row(i);
    Complex s{};
    for (std::size_t j = 0; j < u.dim(); ++j) s += r[j] * psi[j];
    out[i] = s;
  }
  return out;
}

std::vector<Complex> unitary_eigenvalues(const ComplexMatrix& w) {
  const std::size_t d = w.dim();
  const ComplexMatrix wa = w.adjoint();
  ComplexMatrix cos_part = 0.5 * (w + wa);
  ComplexMatrix sin_part = Complex{0.0, -0.5} * (w - wa);
  for (std::size_t i = 0; i < d; ++i) {
    cos_part(i, i) = cos_part(i, i).real();
    sin_part(i, i) = sin_part(i, i).real();
  }
  HermitianEigen ce = hermitian_eig(cos_part);
  ComplexMatrix& q = ce.eigenvectors;

  // The two parts commute, so sin_part is block diagonal on eigenspaces of
  // cos_part. Resolve each (near-)degenerate cluster with a small eig.
  constexpr double kClusterTol = 1e-7;
  const ComplexMatrix sin_rotated = matmul(q.adjoint(), matmul(sin_part, q));
  std::size_t start = 0;
  while (start < d) {
    std::size_t stop = start + 1;
    while (stop < d && ce.eigenvalues[stop] - ce.eigenvalues[stop - 1] <= kClusterTol) ++stop;
    const std::size_t k = stop - start;
    if (k > 1) {
      ComplexMatrix block(k);
      for (std::size_t a = 0; a < k; ++a) {
        block(a, a) = sin_rotated(start + a, start + a).real();
        for (std::size_t b = a + 1; b < k; ++b) {
          const Complex avg = 0.5 * (sin_rotated(start + a, start + b) +
                                     std::conj(sin_rotated(start + b, start + a)));
          block(a, b) = avg;
          block(b, a) = std::conj(avg);
        }
      }
      const HermitianEigen be = hermitian_eig(block);
      std::vector<Complex> col(k);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t b = 0; b < k; ++b) {
          Complex s{};
          for (std::size_t a = 0; a < k; ++a) s += q(i, start + a) * be.eigenvectors(a, b);
          col[b] = s;
        }
        for (std::size_t b = 0; b < k; ++b) q(i, start + b) = col[b];
      }
    }
    start = stop;
  }

  const ComplexMatrix w_rotated = matmul(q.adjoint(), matmul(w, q));
  std::vector<Complex> out(d);
  for (std::size_t k = 0; k < d; ++k) {
    const Complex rq = w_rotated(k, k);
    const double mag = std::abs(rq);
    out[k] = mag > 0.0 ? rq / mag : Complex{1.0, 0.0};
  }
  return out;
}

double distance_to_hull(std::span<const Complex> points) {
  return hull_proximity(points).distance;
}

double unitary_diamond_distance(const ComplexMatrix& u, const ComplexMatrix& v) {
  require_same_dim(u.dim(), v.dim(), "unitary_diamond_distance");
  constexpr double kUnitaryTol = 1e-8;
  if (unitarity_defect(u) > kUnitaryTol || unitarity_defect(v) > kUnitaryTol) {
    throw ValidationError("unitary_diamond_distance: inputs must be unitary");
  }
  const std::vector<Complex> evals = unitary_eigenvalues(matmul(u.adjoint(), v));
  const HullProximity hp = hull_proximity(evals);
  if (hp.contains_origin) return 1.0;
  // For a chord between unit-modulus points a, b the distance to the origin
  // is cos(angle/2), so sqrt(1 - delta^2) = |a - b| / 2 exactly.
  if (hp.on_edge) return std::min(1.0, 0.5 * std::abs(hp.edge_a - hp.edge_b));
  if (hp.distance >= 1.0) return 0.0;
  return std::sqrt((1.0 - hp.distance) * (1.0 + hp.distance));
}

double unitarity_defect(const ComplexMatrix& m) {
  ComplexMatrix g = matmul(m.adjoint(), m);
  g -= ComplexMatrix::identity(m.dim());
  return g.max_abs();
}

double hermiticity_defect(const ComplexMatrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    for (std::size_t j = i; j < m.dim(); ++j) {
      worst = std::max(worst, std::abs(m(i, j) - std::conj(m(j, i))));
    }
  }
  return worst;
}

}  // namespace qdrift
