#include "twomicro/rational.hpp"

namespace twomicro {

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rational(Int(s), Int(1));
  Int num(s.substr(0, slash));
  Int den(s.substr(slash + 1));
  if (den <= 0) throw std::invalid_argument("rational denominator must be positive: " + s);
  return Rational(num, den);
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return r.numerator().str();
  return r.numerator().str() + "/" + r.denominator().str();
}

bool solve_rational(const RationalMatrix& A, const RationalVector& b, RationalVector& x) {
  const Eigen::Index m = A.rows(), n = A.cols();
  RationalMatrix M(m, n + 1);
  M.leftCols(n) = A;
  M.col(n) = b;

  std::vector<Eigen::Index> pivot_col;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < n && row < m; ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = row; i < m; ++i)
      if (M(i, col) != Rational(0)) { p = i; break; }
    if (p < 0) continue;
    M.row(p).swap(M.row(row));
    Rational inv_piv = Rational(1) / M(row, col);
    for (Eigen::Index j = col; j <= n; ++j) M(row, j) *= inv_piv;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == row || M(i, col) == Rational(0)) continue;
      Rational f = M(i, col);
      for (Eigen::Index j = col; j <= n; ++j) M(i, j) -= f * M(row, j);
    }
    pivot_col.push_back(col);
    ++row;
  }
  // Inconsistency: a zero row with nonzero rhs.
  for (Eigen::Index i = row; i < m; ++i)
    if (M(i, n) != Rational(0)) return false;

  x = RationalVector::Constant(n, Rational(0));
  for (size_t r = 0; r < pivot_col.size(); ++r) x[pivot_col[r]] = M(Eigen::Index(r), n);
  return true;
}

RationalMatrix invert_rational(const RationalMatrix& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("invert_rational: matrix not square");
  RationalMatrix M(n, 2 * n);
  M.leftCols(n) = A;
  M.rightCols(n) = RationalMatrix::Identity(n, n);
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index p = -1;
    for (Eigen::Index i = col; i < n; ++i)
      if (M(i, col) != Rational(0)) { p = i; break; }
    if (p < 0) throw std::invalid_argument("invert_rational: singular matrix");
    M.row(p).swap(M.row(col));
    Rational inv_piv = Rational(1) / M(col, col);
    M.row(col) *= inv_piv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == col || M(i, col) == Rational(0)) continue;
      M.row(i) -= M(i, col) * M.row(col);
    }
  }
  return M.rightCols(n);
}

Int integer_determinant(const IntMatrix& A) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("integer_determinant: matrix not square");
  if (n == 0) return Int(1);
  // Bareiss fraction-free elimination.
  IntMatrix M = A;
  Int sign = 1;
  Int prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (M(k, k) == 0) {
      Eigen::Index p = -1;
      for (Eigen::Index i = k + 1; i < n; ++i)
        if (M(i, k) != 0) { p = i; break; }
      if (p < 0) return Int(0);
      M.row(p).swap(M.row(k));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i)
      for (Eigen::Index j = k + 1; j < n; ++j)
        M(i, j) = (M(i, j) * M(k, k) - M(i, k) * M(k, j)) / prev;
    prev = M(k, k);
  }
  return sign * M(n - 1, n - 1);
}

}  // namespace twomicro
