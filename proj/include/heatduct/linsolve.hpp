#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heatduct/sparse.hpp"

namespace heatduct {

/// Iterative solve that did not reach its tolerance, or hit a non-positive
/// curvature direction.
class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// Factorization found a (numerically) zero pivot.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, std::size_t row)
      : std::runtime_error(what), pivot_row(row) {}
  std::size_t pivot_row;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  std::vector<double> residual_history;  // ||r_k||_2 per iteration
};

/// Jacobi-preconditioned conjugate gradients. Stops when
/// ||A x - rhs||_2 <= tol ||rhs||_2. `max_iter` <= 0 selects 10 n.
/// `x0`, when non-empty, is the initial guess.
CgResult solve_spd(const SparseMatrix& a, std::span<const double> rhs, double tol,
                   int max_iter = 0, std::span<const double> x0 = {});

/// Sparse LU with partial (threshold) pivoting, backed by UMFPACK.
///
/// A pivot smaller than `pivot_tol` times the largest pivot in magnitude is
/// treated as zero; the constructor then throws SingularMatrixError naming
/// the original row of that pivot.
class SparseLU {
 public:
  explicit SparseLU(const SparseMatrix& a, double pivot_tol = 1e-13);
  ~SparseLU();
  SparseLU(SparseLU&&) noexcept;
  SparseLU& operator=(SparseLU&&) noexcept;
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;

  std::vector<double> solve(std::span<const double> rhs) const;
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot factor-and-solve for the constrained saddle systems.
std::vector<double> solve_saddle(const SparseMatrix& k, std::span<const double> rhs);

}  // namespace heatduct
