#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "cxshrink/errors.hpp"

namespace cxshrink {

using cxd = std::complex<double>;

// Dense complex matrix, row-major storage.
class CMatrix {
public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cxd{0.0, 0.0}) {}

  static CMatrix identity(std::size_t n);
  static CMatrix diag(const std::vector<double>& d);
  static CMatrix diag_cx(const std::vector<cxd>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  cxd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cxd& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  const std::vector<cxd>& data() const { return data_; }
  std::vector<cxd>& data() { return data_; }

  CMatrix adjoint() const;
  CMatrix conjugate() const;
  CMatrix transpose() const;

  // (M + M*)/2; squares only.
  CMatrix hermitized() const;

  double max_abs() const;
  double frobenius_norm() const;

  bool is_hermitian(double tol) const;
  bool is_unitary(double tol) const;
  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& rhs);
  CMatrix& operator-=(const CMatrix& rhs);
  CMatrix& operator*=(cxd s);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cxd> data_;
};

CMatrix operator+(CMatrix lhs, const CMatrix& rhs);
CMatrix operator-(CMatrix lhs, const CMatrix& rhs);
CMatrix operator*(const CMatrix& lhs, const CMatrix& rhs);
CMatrix operator*(cxd s, CMatrix m);
CMatrix operator*(CMatrix m, cxd s);

// Sum of diagonal entries; square matrices only.
cxd trace(const CMatrix& m);

// Max-norm of the elementwise difference.
double max_abs_diff(const CMatrix& a, const CMatrix& b);

}  // namespace cxshrink
