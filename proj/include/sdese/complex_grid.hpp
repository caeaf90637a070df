// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace sdese {

using cplx = std::complex<double>;

/// Dense complex array of shape (rows, cols), stored row-major.
///
/// For STFT data rows are frequency bins and cols are frames. A 1x1 grid is
/// used for scalar toy problems.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t rows, std::size_t cols, cplx fill = {});
  ComplexGrid(std::size_t rows, std::size_t cols, std::vector<cplx> values);

  static ComplexGrid scalar(cplx v) { return ComplexGrid(1, 1, v); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  cplx& operator[](std::size_t i) { return data_[i]; }
  const cplx& operator[](std::size_t i) const { return data_[i]; }

  std::span<cplx> values() noexcept { return data_; }
  std::span<const cplx> values() const noexcept { return data_; }

  bool same_shape(const ComplexGrid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  double squared_norm() const noexcept;
  double norm() const noexcept;

  ComplexGrid& operator+=(const ComplexGrid& other);
  ComplexGrid& operator-=(const ComplexGrid& other);
  ComplexGrid& operator*=(double s) noexcept;
  ComplexGrid& operator*=(cplx s) noexcept;

  // this += s * other
  ComplexGrid& add_scaled(const ComplexGrid& other, double s);

  friend bool operator==(const ComplexGrid&, const ComplexGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexGrid operator+(ComplexGrid a, const ComplexGrid& b);
ComplexGrid operator-(ComplexGrid a, const ComplexGrid& b);
ComplexGrid operator*(ComplexGrid a, double s);
ComplexGrid operator*(double s, ComplexGrid a);

// Throws ErrorCode::shape_mismatch naming `what` when shapes differ.
void require_same_shape(const ComplexGrid& a, const ComplexGrid& b, const char* what);

}  // namespace sdese
