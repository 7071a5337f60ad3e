#pragma once

#include <span>
#include <vector>

namespace msm2 {

/// Dense row-major matrix of doubles.  State spaces here are small (a handful
/// of states), so a plain vector with bounds handled by the callers is all we
/// need — no BLAS, no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int r, int c) {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }
  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<double> row(int r) {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }
  std::span<const double> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_,
            static_cast<std::size_t>(cols_)};
  }

  double row_sum(int r) const {
    double s = 0.0;
    for (double v : row(r)) s += v;
    return s;
  }

  Matrix multiply(const Matrix& rhs) const;
  double trace() const;

  /// Bit-exact comparison; used by determinism tests.
  bool operator==(const Matrix&) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

/// Row vector times matrix: result[c] = sum_r v[r] * m(r, c).
std::vector<double> multiply_row_vector(std::span<const double> v,
                                        const Matrix& m);

/// True when every row of a square matrix sums to 1 or to 0 within tol and
/// all entries lie in [0, 1 + tol].  This is the shape shared by one-step
/// transition matrices where some rows may be structurally empty.
bool rows_stochastic_or_zero(const Matrix& m, double tol = 1e-12);

}  // namespace msm2
