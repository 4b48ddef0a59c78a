#include "bandit/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Core>

namespace bandit {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const EMat>;
using Map = Eigen::Map<EMat>;

ConstMap map(const Matrix& m) {
  return ConstMap(m.data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(rows.size(), rows.size() ? rows.begin()->size() : 0);
  std::size_t r = 0;
  for (const auto& row : rows) {
    if (row.size() != m.cols()) throw std::invalid_argument("ragged initializer rows");
    std::size_t c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

bool Matrix::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dims differ");
  Matrix c(a.rows(), b.cols());
  Map(c.data(), c.rows(), c.cols()).noalias() = map(a) * map(b);
  return c;
}

Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_at_b: row dims differ");
  Matrix c(a.cols(), b.cols());
  Map(c.data(), c.rows(), c.cols()).noalias() = map(a).transpose() * map(b);
  return c;
}

Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("matmul_a_bt: col dims differ");
  Matrix c(a.rows(), b.rows());
  Map(c.data(), c.rows(), c.cols()).noalias() = map(a) * map(b).transpose();
  return c;
}

}  // namespace bandit
