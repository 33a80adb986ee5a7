#pragma once

#include "twomicro/symbol.hpp"

#include <optional>

namespace twomicro {

/// ⟨e_j, Op_h(a) e_k⟩ = (2π)^{−d/2} â_{j−k}(h(j+k)/2).
/// The η slot is filled with P_Λ(j+k)/2 when the symbol carries a module tag,
/// and with 0 otherwise.
Complex matrix_element(const Symbol& a, double h, const Mode& j, const Mode& k);

/// Op_h(a) u. Output support grows by the symbol's mode set; refuses to
/// exceed hard_box (silent truncation would break exactness).
FourierState apply(const Symbol& a, double h, const FourierState& u, int hard_box);

/// ⟨u, Op_h(a) u⟩ — the Wigner pairing at scale h.
Complex wigner_pair(const FourierState& u, const Symbol& a, double h);

/// Dense matrix of Op_h(a) on an explicit mode list: A(j_idx, k_idx).
Eigen::MatrixXcd operator_matrix(const Symbol& a, double h, const std::vector<Mode>& modes);

/// max_{‖j‖,‖k‖ ≤ N} |⟨e_j,[−½Δ,Op_h(a)]e_k⟩ − (1/ih)⟨e_j,Op_h(ξ·∂_x a)e_k⟩|.
/// The identity is exact for Weyl quantization; the defect is roundoff only.
double commutator_defect(const Symbol& a, double h, int box_radius);

enum class FilterSide { Inner, Outer };

/// Two-microlocal pairing: the uncut symbol a(x,ξ,P_Λξ/h) weighted at the
/// Weyl midpoint by χ(P_Λ(j+k)/(2R)) (inner) or its complement (outer).
Complex twomicro_pair(const FourierState& u, const Symbol& a, const ModuleGeometry& geom,
                      double h, const Cutoff& cutoff, FilterSide side);

/// Pairing filtered through a strictly decreasing chain Λ₁ ⊋ … ⊋ Λ_l with a
/// product of per-level midpoint weights. l = 1 reduces to twomicro_pair.
Complex nested_twomicro_pair(const FourierState& u, const Symbol& a,
                             const std::vector<ModuleGeometry>& chain, double h,
                             const std::vector<Cutoff>& cutoffs,
                             const std::vector<FilterSide>& sides);

/// x-Fourier coefficients of √a by periodic quadrature (a must be ≥ 0 on the
/// sample grid; entries below −1e−12 raise). Modes kept up to mode_radius.
Symbol symbol_sqrt(const Symbol& a, int mode_radius, int grid_points_per_dim = 64);

/// Truncated-box operator norm of Op_h(a^R) − Op_h(√(a^R))², a^R being a
/// weighted by the cutoff in its frequency slot. Reported for trend checks.
double sqrt_symbol_defect(const Symbol& a, double h, std::optional<Cutoff> cutoff,
                          int box_radius, int sqrt_mode_radius);

/// Triangle-inequality bound Σ_m sup_mid |(2π)^{−d/2} â_m| over the box;
/// dominates the truncated operator norm of Op_h(a).
double mode_sum_bound(const Symbol& a, double h, const std::vector<Mode>& modes);

/// Largest singular value on the mode box.
double truncated_operator_norm(const Symbol& a, double h, int box_radius);

}  // namespace twomicro
