#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace heatduct {

/// Compressed row storage with sorted, unique column indices per row.
class SparseMatrix {
 public:
  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
               std::vector<std::size_t> col_idx, std::vector<double> values);

  static SparseMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  /// Entry (i, j), zero if not stored.
  double at(std::size_t i, std::size_t j) const;

  /// y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> operator*(std::span<const double> x) const;

  SparseMatrix transpose() const;
  SparseMatrix scaled(double s) const;

  /// Largest |A_ij - A_ji| over stored entries.
  double asymmetry() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// Coordinate-format accumulator. Duplicates are summed in insertion order
/// when compressed, so assembly results are bit-reproducible.
class TripletBuilder {
 public:
  TripletBuilder(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}
  void add(std::size_t i, std::size_t j, double v);
  void reserve(std::size_t n);
  SparseMatrix build() const;

 private:
  struct Entry {
    std::size_t row, col;
    double value;
  };
  std::size_t rows_, cols_;
  std::vector<Entry> entries_;
};

/// Block matrix assembled from dense-shaped blocks of sparse matrices; null
/// blocks are skipped.
SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks,
                          const std::vector<std::size_t>& row_sizes,
                          const std::vector<std::size_t>& col_sizes);

/// Block-diagonal matrix with `copies` copies of `block`.
SparseMatrix repeat_diagonal(const SparseMatrix& block, int copies);

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double beta = 1.0);

void write_matrix_market(std::ostream& os, const SparseMatrix& a);
void write_matrix_market(const std::string& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& is);
SparseMatrix read_matrix_market(const std::string& path);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace heatduct
