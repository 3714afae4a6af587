// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AGFEM_SPARSE_HPP_
#define AGFEM_SPARSE_HPP_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace agfem {

struct Triplet {
  std::int64_t row;
  std::int64_t col;
  double value;
};

// Compressed sparse rows with sorted, unique columns per row.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::int64_t rows, std::int64_t cols) : rows_(rows), cols_(cols), ptr_(rows + 1, 0) {}

  // Sums duplicates. Entries of equal (row, col) are added in input order.
  static CsrMatrix from_triplets(std::int64_t rows, std::int64_t cols,
                                 std::span<const Triplet> triplets);
  static CsrMatrix identity(std::int64_t n);
  static CsrMatrix diagonal(std::span<const double> d);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t nnz() const { return static_cast<std::int64_t>(val_.size()); }
  const std::vector<std::int64_t>& row_ptr() const { return ptr_; }
  const std::vector<std::int64_t>& col_idx() const { return col_; }
  const std::vector<double>& values() const { return val_; }

  double at(std::int64_t r, std::int64_t c) const;
  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> diagonal() const;
  std::vector<double> to_dense() const;  // row-major
  double max_abs() const;
  double max_asymmetry() const;

  // Coordinate text format: header line then 1-based "row col value".
  void write_coordinate(std::ostream& os) const;

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<std::int64_t> ptr_{0};
  std::vector<std::int64_t> col_;
  std::vector<double> val_;
};

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace agfem

#endif  // AGFEM_SPARSE_HPP_
