#include "twomicro/lattice.hpp"

namespace twomicro {

namespace {

Int floor_div(const Int& a, const Int& b) {
  // b > 0 assumed
  Int q = a / b;
  if (a % b != 0 && a < 0) --q;
  return q;
}

Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

IntMatrix transpose_int(const IntMatrix& A) {
  IntMatrix T(A.cols(), A.rows());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) T(j, i) = A(i, j);
  return T;
}

struct EchelonResult {
  IntMatrix H;       // m x rank, canonical column HNF
  IntMatrix kernel;  // n x (n - rank), columns span the integer kernel
};

// Column echelon reduction with a unimodular column transform; yields the
// canonical HNF of the span and a basis of the integer kernel.
EchelonResult column_echelon(const IntMatrix& A) {
  const Eigen::Index m = A.rows(), n = A.cols();
  IntMatrix B = A;
  IntMatrix U = IntMatrix::Identity(n, n);
  Eigen::Index c = 0;
  for (Eigen::Index row = 0; row < m && c < n; ++row) {
    // Euclid over the columns >= c until a single nonzero entry remains.
    while (true) {
      Eigen::Index best = -1;
      int nonzero = 0;
      for (Eigen::Index j = c; j < n; ++j) {
        if (B(row, j) == 0) continue;
        ++nonzero;
        if (best < 0 || abs_int(B(row, j)) < abs_int(B(row, best))) best = j;
      }
      if (nonzero == 0) { best = -1; }
      if (nonzero <= 1) {
        if (nonzero == 1) {
          B.col(best).swap(B.col(c));
          U.col(best).swap(U.col(c));
        }
        break;
      }
      B.col(best).swap(B.col(c));
      U.col(best).swap(U.col(c));
      for (Eigen::Index j = c + 1; j < n; ++j) {
        if (B(row, j) == 0) continue;
        Int q = B(row, j) / B(row, c);
        B.col(j) -= q * B.col(c);
        U.col(j) -= q * U.col(c);
      }
    }
    if (B(row, c) == 0) continue;
    if (B(row, c) < 0) {
      B.col(c) = -B.col(c);
      U.col(c) = -U.col(c);
    }
    // Reduce entries to the left of the pivot into [0, pivot).
    for (Eigen::Index j = 0; j < c; ++j) {
      Int q = floor_div(B(row, j), B(row, c));
      if (q != 0) {
        B.col(j) -= q * B.col(c);
        U.col(j) -= q * U.col(c);
      }
    }
    ++c;
  }
  EchelonResult res;
  res.H = B.leftCols(c);
  res.kernel = U.rightCols(n - c);
  return res;
}

}  // namespace

IntMatrix column_hnf(const IntMatrix& A) { return column_echelon(A).H; }

IntMatrix integer_kernel(const IntMatrix& A) {
  EchelonResult res = column_echelon(A);
  return column_hnf(res.kernel);
}

PrimitiveModule saturate(const IntMatrix& generators) {
  const int d = static_cast<int>(generators.rows());
  if (generators.cols() == 0) return zero_module(d);
  // Saturation = ker_Z(ker_Z(Gᵀ)ᵀ): the integer kernel is saturated, and
  // double annihilation recovers Q-span(G) ∩ Z^d.
  IntMatrix K = integer_kernel(transpose_int(generators));
  IntMatrix S = integer_kernel(transpose_int(K));
  return PrimitiveModule{d, S};
}

PrimitiveModule saturate(const std::vector<IntVector>& generators, int dim) {
  IntMatrix G(dim, static_cast<Eigen::Index>(generators.size()));
  for (size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].size() != dim)
      throw std::invalid_argument("saturate: generator dimension mismatch");
    G.col(static_cast<Eigen::Index>(i)) = generators[i];
  }
  return saturate(G);
}

PrimitiveModule stabilizer(const RationalVector& xi) {
  const int d = static_cast<int>(xi.size());
  if (d < 1) throw std::invalid_argument("stabilizer: dimension must be >= 1");
  // Clear denominators: k·ξ = 0  <=>  k·v = 0 with v integer.
  Int lcm = 1;
  for (int i = 0; i < d; ++i) lcm = boost::multiprecision::lcm(lcm, xi[i].denominator());
  IntMatrix row(1, d);
  for (int i = 0; i < d; ++i) row(0, i) = xi[i].numerator() * (lcm / xi[i].denominator());
  return PrimitiveModule{d, integer_kernel(row)};
}

int resonance_order(const RationalVector& xi) {
  return static_cast<int>(xi.size()) - stabilizer(xi).rank();
}

PrimitiveModule classify(const RationalVector& xi) { return stabilizer(xi); }

ModuleGeometry geometry(const PrimitiveModule& mod) {
  const int d = mod.dim;
  const int r = mod.rank();
  ModuleGeometry geo;
  geo.module = mod;
  if (r == 0) {
    geo.projector = RationalMatrix::Constant(d, d, Rational(0));
    geo.complement_basis = full_module(d).basis;
    geo.covering_degree = 1;
    return geo;
  }
  RationalMatrix B(d, r);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < r; ++j) B(i, j) = Rational(mod.basis(i, j));
  RationalMatrix Gram = B.transpose() * B;
  geo.projector = B * invert_rational(Gram) * B.transpose();
  geo.complement_basis = integer_kernel(transpose_int(mod.basis));
  IntMatrix full(d, d);
  full.leftCols(r) = mod.basis;
  full.rightCols(d - r) = geo.complement_basis;
  geo.covering_degree = abs_int(integer_determinant(full));
  return geo;
}

bool mode_in(const IntVector& k, const PrimitiveModule& mod) {
  if (k.size() != mod.dim) throw std::invalid_argument("mode_in: dimension mismatch");
  if (mod.rank() == 0) return k.isZero();
  RationalMatrix B(mod.dim, mod.rank());
  RationalVector rhs(mod.dim);
  for (int i = 0; i < mod.dim; ++i) {
    for (int j = 0; j < mod.rank(); ++j) B(i, j) = Rational(mod.basis(i, j));
    rhs[i] = Rational(k[i]);
  }
  RationalVector x;
  return solve_rational(B, rhs, x);
}

bool submodule_of(const PrimitiveModule& sub, const PrimitiveModule& sup) {
  if (sub.dim != sup.dim) return false;
  for (int j = 0; j < sub.rank(); ++j) {
    if (!mode_in(sub.basis.col(j), sup)) return false;
  }
  return true;
}

}  // namespace twomicro
