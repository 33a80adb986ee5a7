#pragma once

#include "twomicro/rational.hpp"

#include <vector>

namespace twomicro {

/// A primitive (saturated) submodule of Z^d in canonical column Hermite
/// normal form: pivot rows strictly increasing, pivots positive, entries
/// to the left of each pivot reduced into [0, pivot).
struct PrimitiveModule {
  int dim = 0;
  IntMatrix basis;  // d x rank, canonical HNF

  int rank() const { return static_cast<int>(basis.cols()); }

  bool operator==(const PrimitiveModule& o) const {
    return dim == o.dim && exact_equal(basis, o.basis);
  }
  bool operator!=(const PrimitiveModule& o) const { return !(*this == o); }
};

/// Projector, complement lattice and covering degree attached to a module.
struct ModuleGeometry {
  PrimitiveModule module;
  RationalMatrix projector;          // d x d, orthogonal projection onto <module>
  IntMatrix complement_basis;        // d x (d - rank), basis of Z^d ∩ module^⊥ (HNF)
  Int covering_degree;               // index [Z^d : module ⊕ complement]

  RationalMatrix complement_projector() const {
    return RationalMatrix::Identity(module.dim, module.dim) - projector;
  }
};

/// Canonical column Hermite normal form of the column span (zero columns dropped).
IntMatrix column_hnf(const IntMatrix& A);

/// Basis of the integer kernel {x in Z^n : A x = 0}, in canonical HNF.
/// The integer kernel of an integer matrix is always saturated.
IntMatrix integer_kernel(const IntMatrix& A);

/// Unique primitive module with the same rational span as the generators.
PrimitiveModule saturate(const std::vector<IntVector>& generators, int dim);
PrimitiveModule saturate(const IntMatrix& generators);

/// Λ_ξ = {k in Z^d : k·ξ = 0}; primitive for every rational ξ.
PrimitiveModule stabilizer(const RationalVector& xi);

/// j = d − rank Λ_ξ; the resonance order of ξ (ξ belongs to Ω_j).
int resonance_order(const RationalVector& xi);

/// The unique Λ with ξ ∈ R_Λ = Λ^⊥ ∩ Ω_{d−rk Λ}; coincides with the stabilizer.
PrimitiveModule classify(const RationalVector& xi);

/// Exact projector, complement lattice and covering degree of a module.
ModuleGeometry geometry(const PrimitiveModule& mod);

/// Integer membership k ∈ Λ. For a saturated module this is equivalent to
/// k lying in the rational span.
bool mode_in(const IntVector& k, const PrimitiveModule& mod);

inline PrimitiveModule zero_module(int dim) {
  return PrimitiveModule{dim, IntMatrix(dim, 0)};
}

inline PrimitiveModule full_module(int dim) {
  IntMatrix id = IntMatrix::Identity(dim, dim);
  return PrimitiveModule{dim, id};
}

/// True when every basis column of `sub` belongs to `sup`.
bool submodule_of(const PrimitiveModule& sub, const PrimitiveModule& sup);

}  // namespace twomicro
