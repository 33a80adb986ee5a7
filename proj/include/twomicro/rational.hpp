#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace twomicro {

using Int = boost::multiprecision::cpp_int;

/// Exact rational with positive denominator, always reduced.
/// Constructors are deliberately restricted to integer-like types so that
/// Eigen expression objects can never be mistaken for scalars.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(const Int& n) : num_(n), den_(1) {}  // NOLINT: implicit by design
  Rational(int n) : num_(n), den_(1) {}         // NOLINT
  Rational(long n) : num_(n), den_(1) {}        // NOLINT
  Rational(const Int& n, const Int& d) : num_(n), den_(d) { reduce(); }

  const Int& numerator() const { return num_; }
  const Int& denominator() const { return den_; }

  Rational operator-() const { Rational r; r.num_ = -num_; r.den_ = den_; return r; }

  Rational& operator+=(const Rational& o) {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ *= o.den_;
    reduce();
    return *this;
  }
  Rational& operator-=(const Rational& o) { return *this += -o; }
  Rational& operator*=(const Rational& o) {
    num_ *= o.num_;
    den_ *= o.den_;
    reduce();
    return *this;
  }
  Rational& operator/=(const Rational& o) {
    if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
    num_ *= o.den_;
    den_ *= o.num_;
    reduce();
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num_ * b.den_ < b.num_ * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  friend Rational abs(const Rational& a) { return a.num_ < 0 ? -a : a; }

 private:
  void reduce() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    Int g = boost::multiprecision::gcd(num_ < 0 ? Int(-num_) : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
    if (num_ == 0) den_ = 1;
  }

  Int num_;
  Int den_;
};

}  // namespace twomicro

namespace Eigen {

template <>
struct NumTraits<twomicro::Rational> : GenericNumTraits<twomicro::Rational> {
  typedef twomicro::Rational Real;
  typedef twomicro::Rational NonInteger;
  typedef twomicro::Rational Nested;
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
  enum {
    IsInteger = 0,
    IsSigned = 1,
    IsComplex = 0,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 60,
    MulCost = 60,
  };
};

}  // namespace Eigen

namespace twomicro {

using IntMatrix = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// Entry-wise exact equality; avoids Eigen's coefficient-wise operator==,
/// which probes scalar conversions that cpp_int does not tolerate.
template <typename DerivedA, typename DerivedB>
bool exact_equal(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (!(a(i, j) == b(i, j))) return false;
  return true;
}

inline double to_double(const Rational& r) {
  return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

inline Eigen::VectorXd to_double(const RationalVector& v) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
  return out;
}

inline Eigen::MatrixXd to_double(const RationalMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

/// Parses "p/q" or "p" (denominator defaults to 1; result is reduced).
Rational parse_rational(const std::string& s);

/// Serializes as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rational& r);

/// Exact solve A x = b by Gaussian elimination over the rationals.
/// Returns false when the system is inconsistent; x holds a particular
/// solution on success (free variables set to zero).
bool solve_rational(const RationalMatrix& A, const RationalVector& b, RationalVector& x);

/// Exact inverse of a square nonsingular rational matrix.
RationalMatrix invert_rational(const RationalMatrix& A);

/// Exact determinant of a square integer matrix (fraction-free elimination).
Int integer_determinant(const IntMatrix& A);

}  // namespace twomicro
