// Copyright 2026 The sdese Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "sdese/complex_grid.hpp"

#include <cmath>
#include <string>

#include "sdese/error.hpp"

namespace sdese {

ComplexGrid::ComplexGrid(std::size_t rows, std::size_t cols, cplx fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ComplexGrid::ComplexGrid(std::size_t rows, std::size_t cols, std::vector<cplx> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  require(data_.size() == rows * cols, ErrorCode::shape_mismatch,
          "ComplexGrid: value count does not match rows * cols");
}

bool ComplexGrid::all_finite() const noexcept {
  for (const cplx& v : data_) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double ComplexGrid::squared_norm() const noexcept {
  double acc = 0.0;
  for (const cplx& v : data_) acc += std::norm(v);
  return acc;
}

double ComplexGrid::norm() const noexcept { return std::sqrt(squared_norm()); }

ComplexGrid& ComplexGrid::operator+=(const ComplexGrid& other) {
  require_same_shape(*this, other, "ComplexGrid +=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexGrid& ComplexGrid::operator-=(const ComplexGrid& other) {
  require_same_shape(*this, other, "ComplexGrid -=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexGrid& ComplexGrid::operator*=(double s) noexcept {
  for (cplx& v : data_) v *= s;
  return *this;
}

ComplexGrid& ComplexGrid::operator*=(cplx s) noexcept {
  for (cplx& v : data_) v *= s;
  return *this;
}

ComplexGrid& ComplexGrid::add_scaled(const ComplexGrid& other, double s) {
  require_same_shape(*this, other, "ComplexGrid add_scaled");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  return *this;
}

ComplexGrid operator+(ComplexGrid a, const ComplexGrid& b) { return a += b; }
ComplexGrid operator-(ComplexGrid a, const ComplexGrid& b) { return a -= b; }
ComplexGrid operator*(ComplexGrid a, double s) { return a *= s; }
ComplexGrid operator*(double s, ComplexGrid a) { return a *= s; }

void require_same_shape(const ComplexGrid& a, const ComplexGrid& b, const char* what) {
  if (!a.same_shape(b)) {
    fail(ErrorCode::shape_mismatch,
         std::string(what) + ": shapes (" + std::to_string(a.rows()) + "x" +
             std::to_string(a.cols()) + ") and (" + std::to_string(b.rows()) + "x" +
             std::to_string(b.cols()) + ") differ");
  }
}

}  // namespace sdese
