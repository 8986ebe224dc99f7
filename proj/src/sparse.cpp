#include "heatduct/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace heatduct {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_ptr,
                           std::vector<std::size_t> col_idx,
                           std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_ptr_(std::move(row_ptr)),
      col_idx_(std::move(col_idx)),
      values_(std::move(values)) {
  if (row_ptr_.size() != rows_ + 1 || col_idx_.size() != values_.size() ||
      row_ptr_.back() != values_.size())
    throw std::invalid_argument("inconsistent CSR arrays");
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (col_idx_[k] >= cols_) throw std::invalid_argument("column index out of range");
      if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
        throw std::invalid_argument("column indices must be sorted and unique");
    }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> rp(n + 1), ci(n);
  std::iota(rp.begin(), rp.end(), 0);
  std::iota(ci.begin(), ci.end(), 0);
  return SparseMatrix(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto b = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  const auto e = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::size_t i = 0; i < rows_; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      s += values_[k] * x[col_idx_[k]];
    y[i] = s;
  }
}

std::vector<double> SparseMatrix::operator*(std::span<const double> x) const {
  std::vector<double> y(rows_);
  multiply(x, y);
  return y;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> rp(cols_ + 1, 0);
  for (auto c : col_idx_) ++rp[c + 1];
  std::partial_sum(rp.begin(), rp.end(), rp.begin());
  std::vector<std::size_t> ci(nnz());
  std::vector<double> v(nnz());
  std::vector<std::size_t> fill(rp.begin(), rp.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const auto pos = fill[col_idx_[k]]++;
      ci[pos] = i;
      v[pos] = values_[k];
    }
  return SparseMatrix(cols_, rows_, std::move(rp), std::move(ci), std::move(v));
}

SparseMatrix SparseMatrix::scaled(double s) const {
  SparseMatrix out = *this;
  for (auto& v : out.values_) v *= s;
  return out;
}

double SparseMatrix::asymmetry() const {
  double m = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
      m = std::max(m, std::abs(values_[k] - at(col_idx_[k], i)));
  return m;
}

void TripletBuilder::add(std::size_t i, std::size_t j, double v) {
  entries_.push_back({i, j, v});
}

void TripletBuilder::reserve(std::size_t n) { entries_.reserve(n); }

SparseMatrix TripletBuilder::build() const {
  // Counting sort by row keeps insertion order within a row; a stable sort by
  // column then fixes the summation order.
  std::vector<std::size_t> count(rows_ + 1, 0);
  for (const auto& e : entries_) {
    if (e.row >= rows_ || e.col >= cols_) throw std::out_of_range("triplet index out of range");
    ++count[e.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());
  std::vector<std::size_t> order(entries_.size());
  {
    std::vector<std::size_t> fill(count.begin(), count.end() - 1);
    for (std::size_t k = 0; k < entries_.size(); ++k) order[fill[entries_[k].row]++] = k;
  }
  std::vector<std::size_t> rp(rows_ + 1, 0), ci;
  std::vector<double> vals;
  ci.reserve(entries_.size());
  vals.reserve(entries_.size());
  for (std::size_t i = 0; i < rows_; ++i) {
    auto b = order.begin() + static_cast<std::ptrdiff_t>(count[i]);
    auto e = order.begin() + static_cast<std::ptrdiff_t>(count[i + 1]);
    std::stable_sort(b, e, [&](std::size_t x, std::size_t y) {
      return entries_[x].col < entries_[y].col;
    });
    for (auto it = b; it != e; ++it) {
      const auto& en = entries_[*it];
      if (ci.size() > rp[i] && ci.back() == en.col)
        vals.back() += en.value;
      else {
        ci.push_back(en.col);
        vals.push_back(en.value);
      }
    }
    rp[i + 1] = ci.size();
  }
  return SparseMatrix(rows_, cols_, std::move(rp), std::move(ci), std::move(vals));
}

SparseMatrix block_matrix(const std::vector<std::vector<const SparseMatrix*>>& blocks,
                          const std::vector<std::size_t>& row_sizes,
                          const std::vector<std::size_t>& col_sizes) {
  std::vector<std::size_t> roff(row_sizes.size() + 1, 0), coff(col_sizes.size() + 1, 0);
  std::partial_sum(row_sizes.begin(), row_sizes.end(), roff.begin() + 1);
  std::partial_sum(col_sizes.begin(), col_sizes.end(), coff.begin() + 1);
  std::vector<std::size_t> rp(roff.back() + 1, 0), ci;
  std::vector<double> vals;
  for (std::size_t bi = 0; bi < row_sizes.size(); ++bi) {
    for (std::size_t r = 0; r < row_sizes[bi]; ++r) {
      for (std::size_t bj = 0; bj < col_sizes.size(); ++bj) {
        const SparseMatrix* m = blocks[bi][bj];
        if (m == nullptr) continue;
        if (m->rows() != row_sizes[bi] || m->cols() != col_sizes[bj])
          throw std::invalid_argument("block size mismatch");
        for (std::size_t k = m->row_ptr()[r]; k < m->row_ptr()[r + 1]; ++k) {
          ci.push_back(coff[bj] + m->col_idx()[k]);
          vals.push_back(m->values()[k]);
        }
      }
      rp[roff[bi] + r + 1] = ci.size();
    }
  }
  return SparseMatrix(roff.back(), coff.back(), std::move(rp), std::move(ci),
                      std::move(vals));
}

SparseMatrix repeat_diagonal(const SparseMatrix& block, int copies) {
  std::vector<std::vector<const SparseMatrix*>> blocks(
      copies, std::vector<const SparseMatrix*>(copies, nullptr));
  for (int c = 0; c < copies; ++c) blocks[c][c] = &block;
  return block_matrix(blocks, std::vector<std::size_t>(copies, block.rows()),
                      std::vector<std::size_t>(copies, block.cols()));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix sizes differ");
  std::vector<std::size_t> rp(a.rows() + 1, 0), ci;
  std::vector<double> v;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    std::size_t ka = a.row_ptr()[i], kb = b.row_ptr()[i];
    const std::size_t ea = a.row_ptr()[i + 1], eb = b.row_ptr()[i + 1];
    while (ka < ea || kb < eb) {
      const std::size_t ca = ka < ea ? a.col_idx()[ka] : SIZE_MAX;
      const std::size_t cb = kb < eb ? b.col_idx()[kb] : SIZE_MAX;
      if (ca == cb) {
        ci.push_back(ca);
        v.push_back(a.values()[ka++] + beta * b.values()[kb++]);
      } else if (ca < cb) {
        ci.push_back(ca);
        v.push_back(a.values()[ka++]);
      } else {
        ci.push_back(cb);
        v.push_back(beta * b.values()[kb++]);
      }
    }
    rp[i + 1] = ci.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(rp), std::move(ci), std::move(v));
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nnz() << '\n';
  os << std::setprecision(17);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = a.row_ptr()[i]; k < a.row_ptr()[i + 1]; ++k)
      os << i + 1 << ' ' << a.col_idx()[k] + 1 << ' ' << a.values()[k] << '\n';
}

void write_matrix_market(const std::string& path, const SparseMatrix& a) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_matrix_market(os, a);
}

SparseMatrix read_matrix_market(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%MatrixMarket", 0) != 0)
    throw std::runtime_error("missing MatrixMarket banner");
  const bool symmetric = line.find("symmetric") != std::string::npos;
  if (line.find("coordinate") == std::string::npos || line.find("real") == std::string::npos)
    throw std::runtime_error("only real coordinate MatrixMarket files are supported");
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream hdr(line);
  std::size_t m = 0, n = 0, nz = 0;
  if (!(hdr >> m >> n >> nz)) throw std::runtime_error("bad MatrixMarket size line");
  TripletBuilder tb(m, n);
  for (std::size_t k = 0; k < nz; ++k) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(is >> i >> j >> v)) throw std::runtime_error("truncated MatrixMarket data");
    tb.add(i - 1, j - 1, v);
    if (symmetric && i != j) tb.add(j - 1, i - 1, v);
  }
  return tb.build();
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_matrix_market(is);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace heatduct
