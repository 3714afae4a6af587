// Copyright 2026 The agfem Authors
// SPDX-License-Identifier: Apache-2.0

#include "agfem/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "agfem/errors.hpp"

namespace agfem {

CsrMatrix CsrMatrix::from_triplets(std::int64_t rows, std::int64_t cols,
                                   std::span<const Triplet> triplets) {
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Triplet& x = triplets[a];
    const Triplet& y = triplets[b];
    return x.row != y.row ? x.row < y.row : x.col < y.col;
  });
  CsrMatrix m(rows, cols);
  std::int64_t last_row = -1;
  std::int64_t last_col = -1;
  for (std::size_t i : order) {
    const Triplet& t = triplets[i];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
      throw AssemblyError("matrix entry outside the matrix bounds");
    }
    if (t.row == last_row && t.col == last_col) {
      m.val_.back() += t.value;
      continue;
    }
    m.col_.push_back(t.col);
    m.val_.push_back(t.value);
    ++m.ptr_[t.row + 1];
    last_row = t.row;
    last_col = t.col;
  }
  for (std::int64_t r = 0; r < rows; ++r) m.ptr_[r + 1] += m.ptr_[r];
  return m;
}

CsrMatrix CsrMatrix::identity(std::int64_t n) {
  std::vector<double> d(n, 1.0);
  return diagonal(d);
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) {
    t.push_back({static_cast<std::int64_t>(i), static_cast<std::int64_t>(i), d[i]});
  }
  const auto n = static_cast<std::int64_t>(d.size());
  return from_triplets(n, n, t);
}

double CsrMatrix::at(std::int64_t r, std::int64_t c) const {
  const auto begin = col_.begin() + ptr_[r];
  const auto end = col_.begin() + ptr_[r + 1];
  const auto it = std::lower_bound(begin, end, c);
  if (it == end || *it != c) return 0.0;
  return val_[it - col_.begin()];
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  for (std::int64_t r = 0; r < rows_; ++r) {
    double s = 0.0;
    for (std::int64_t i = ptr_[r]; i < ptr_[r + 1]; ++i) s += val_[i] * x[col_[i]];
    y[r] = s;
  }
}

std::vector<double> CsrMatrix::diagonal() const {
  std::vector<double> d(rows_, 0.0);
  for (std::int64_t r = 0; r < rows_; ++r) d[r] = at(r, r);
  return d;
}

std::vector<double> CsrMatrix::to_dense() const {
  std::vector<double> a(static_cast<std::size_t>(rows_ * cols_), 0.0);
  for (std::int64_t r = 0; r < rows_; ++r) {
    for (std::int64_t i = ptr_[r]; i < ptr_[r + 1]; ++i) a[r * cols_ + col_[i]] = val_[i];
  }
  return a;
}

double CsrMatrix::max_abs() const {
  double m = 0.0;
  for (double v : val_) m = std::max(m, std::abs(v));
  return m;
}

double CsrMatrix::max_asymmetry() const {
  double m = 0.0;
  for (std::int64_t r = 0; r < rows_; ++r) {
    for (std::int64_t i = ptr_[r]; i < ptr_[r + 1]; ++i) {
      m = std::max(m, std::abs(val_[i] - at(col_[i], r)));
    }
  }
  return m;
}

void CsrMatrix::write_coordinate(std::ostream& os) const {
  os << rows_ << " " << cols_ << " " << nnz() << "\n";
  const auto prec = os.precision(17);
  for (std::int64_t r = 0; r < rows_; ++r) {
    for (std::int64_t i = ptr_[r]; i < ptr_[r + 1]; ++i) {
      os << r + 1 << " " << col_[i] + 1 << " " << val_[i] << "\n";
    }
  }
  os.precision(prec);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace agfem
