#include "msm2/matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace msm2 {

Matrix Matrix::multiply(const Matrix& rhs) const {
  if (cols_ != rhs.rows_)
    throw std::invalid_argument("matrix dimensions do not match");
  Matrix out(rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i) {
    for (int k = 0; k < cols_; ++k) {
      const double v = (*this)(i, k);
      if (v == 0.0) continue;
      for (int j = 0; j < rhs.cols_; ++j) out(i, j) += v * rhs(k, j);
    }
  }
  return out;
}

double Matrix::trace() const {
  if (rows_ != cols_) throw std::invalid_argument("trace of non-square matrix");
  double t = 0.0;
  for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

std::vector<double> multiply_row_vector(std::span<const double> v,
                                        const Matrix& m) {
  if (static_cast<int>(v.size()) != m.rows())
    throw std::invalid_argument("vector length does not match matrix rows");
  std::vector<double> out(m.cols(), 0.0);
  for (int r = 0; r < m.rows(); ++r) {
    const double w = v[r];
    if (w == 0.0) continue;
    for (int c = 0; c < m.cols(); ++c) out[c] += w * m(r, c);
  }
  return out;
}

bool rows_stochastic_or_zero(const Matrix& m, double tol) {
  for (int r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) {
      if (v < -tol || v > 1.0 + tol) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > tol && std::abs(sum) > tol) return false;
  }
  return true;
}

}  // namespace msm2
