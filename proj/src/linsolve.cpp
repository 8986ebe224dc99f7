#include "heatduct/linsolve.hpp"

#include <umfpack.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace heatduct {

CgResult solve_spd(const SparseMatrix& a, std::span<const double> rhs, double tol,
                   int max_iter, std::span<const double> x0) {
  const std::size_t n = a.rows();
  if (a.cols() != n || rhs.size() != n) throw std::invalid_argument("solve_spd: size mismatch");
  if (max_iter <= 0) max_iter = static_cast<int>(std::max<std::size_t>(10 * n, 10));

  CgResult res;
  res.x.assign(n, 0.0);
  if (!x0.empty()) std::copy(x0.begin(), x0.end(), res.x.begin());

  std::vector<double> inv_diag(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a.at(i, i);
    if (d > 0.0) inv_diag[i] = 1.0 / d;
  }

  const double rhs_norm = norm2(rhs);
  std::vector<double> r(n), z(n), p(n), ap(n);
  a.multiply(res.x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  double rnorm = norm2(r);
  res.residual_history.push_back(rnorm);
  const double target = tol * rhs_norm;
  if (rnorm <= target) return res;

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    a.multiply(p, ap);
    const double curvature = dot(p, ap);
    if (!(curvature > 0.0)) {
      std::ostringstream os;
      os << "conjugate gradients hit non-positive curvature " << curvature
         << " at iteration " << it << "; matrix is not positive definite";
      throw SolveFailure(os.str(), res.residual_history);
    }
    const double alpha = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      res.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    rnorm = norm2(r);
    res.residual_history.push_back(rnorm);
    res.iterations = it;
    if (rnorm <= target) return res;
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  std::ostringstream os;
  os << "conjugate gradients did not converge in " << max_iter
     << " iterations (residual " << rnorm << ", target " << target << ")";
  throw SolveFailure(os.str(), res.residual_history);
}

struct SparseLU::Impl {
  int n = 0;
  // UMFPACK works on compressed columns; we factor A^T (whose CSC arrays are
  // the CSR arrays of A) and solve with the transposed system flag.
  std::vector<int> ap, ai;
  std::vector<double> ax;
  void* numeric = nullptr;
  ~Impl() {
    if (numeric != nullptr) umfpack_di_free_numeric(&numeric);
  }
};

SparseLU::SparseLU(const SparseMatrix& a, double pivot_tol) : impl_(std::make_unique<Impl>()) {
  if (a.rows() != a.cols()) throw std::invalid_argument("SparseLU: matrix is not square");
  auto& m = *impl_;
  m.n = static_cast<int>(a.rows());
  m.ap.assign(a.row_ptr().begin(), a.row_ptr().end());
  m.ai.assign(a.col_idx().begin(), a.col_idx().end());
  m.ax = a.values();

  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  void* symbolic = nullptr;
  int status = umfpack_di_symbolic(m.n, m.n, m.ap.data(), m.ai.data(), m.ax.data(),
                                   &symbolic, control, info);
  if (status != UMFPACK_OK) {
    if (symbolic != nullptr) umfpack_di_free_symbolic(&symbolic);
    throw std::runtime_error("UMFPACK symbolic analysis failed with status " +
                             std::to_string(status));
  }
  status = umfpack_di_numeric(m.ap.data(), m.ai.data(), m.ax.data(), symbolic,
                              &m.numeric, control, info);
  umfpack_di_free_symbolic(&symbolic);
  if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix)
    throw std::runtime_error("UMFPACK numeric factorization failed with status " +
                             std::to_string(status));

  // Inspect the pivots. The factorization is P R^{-1} A^T Q = L U.
  std::vector<double> udiag(static_cast<std::size_t>(m.n));
  std::vector<int> q(static_cast<std::size_t>(m.n));
  umfpack_di_get_numeric(nullptr, nullptr, nullptr, nullptr, nullptr, nullptr, nullptr,
                         q.data(), udiag.data(), nullptr, nullptr, m.numeric);
  double umax = 0.0;
  for (double d : udiag) umax = std::max(umax, std::abs(d));
  for (int k = 0; k < m.n; ++k) {
    if (!(std::abs(udiag[static_cast<std::size_t>(k)]) > pivot_tol * umax)) {
      // Column q[k] of A^T is row q[k] of A.
      const auto row = static_cast<std::size_t>(q[static_cast<std::size_t>(k)]);
      std::ostringstream os;
      os << "sparse LU: zero pivot at step " << k << " (row " << row << " of "
         << m.n << ", |pivot| = " << std::abs(udiag[static_cast<std::size_t>(k)])
         << ", max pivot " << umax << ")";
      throw SingularMatrixError(os.str(), row);
    }
  }
}

SparseLU::~SparseLU() = default;
SparseLU::SparseLU(SparseLU&&) noexcept = default;
SparseLU& SparseLU::operator=(SparseLU&&) noexcept = default;

std::size_t SparseLU::size() const { return static_cast<std::size_t>(impl_->n); }

std::vector<double> SparseLU::solve(std::span<const double> rhs) const {
  const auto& m = *impl_;
  if (rhs.size() != static_cast<std::size_t>(m.n))
    throw std::invalid_argument("SparseLU::solve: size mismatch");
  std::vector<double> x(rhs.size(), 0.0);
  double control[UMFPACK_CONTROL];
  double info[UMFPACK_INFO];
  umfpack_di_defaults(control);
  control[UMFPACK_IRSTEP] = 2;
  // Stored matrix is A^T, so solving A^T' x = b solves A x = b.
  const int status = umfpack_di_solve(UMFPACK_At, m.ap.data(), m.ai.data(), m.ax.data(),
                                      x.data(), rhs.data(), m.numeric, control, info);
  if (status != UMFPACK_OK)
    throw std::runtime_error("UMFPACK solve failed with status " + std::to_string(status));
  return x;
}

std::vector<double> solve_saddle(const SparseMatrix& k, std::span<const double> rhs) {
  return SparseLU(k).solve(rhs);
}

}  // namespace heatduct
