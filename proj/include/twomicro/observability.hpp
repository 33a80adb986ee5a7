#pragma once

#include "twomicro/dynamics.hpp"

#include <utility>
#include <vector>

namespace twomicro {

/// Product of half-open arcs [lo_i, hi_i) ⊂ [0, 2π).
struct ArcBox {
  Eigen::VectorXd lo, hi;
};

/// Observation region ω (a disjoint union of arc boxes) and horizon T.
/// Indicator Fourier coefficients are exact closed forms per box.
struct ObservationSpec {
  int dim = 0;
  std::vector<ArcBox> boxes;
  double T = 1.0;

  double measure() const;
  /// (1_ω)^k = (2π)^{−d/2} ∫_ω e^{−ik·x} dx; at k = 0 this is measure/(2π)^{d/2}.
  Complex indicator_coeff(const Mode& k) const;
  /// Throws when boxes overlap, escape [0, 2π)^d, or the measure degenerates.
  void validate() const;
};

ObservationSpec full_torus_spec(int dim, double T);

/// Gram operator of the observation map on the mode box ‖k‖_∞ ≤ N:
/// G[j,k] = ∫₀^T ⟨U_V(t)e_j, 1_ω U_V(t)e_k⟩ dt. Hermitian PSD, spectrum in [0, T].
struct GramOperator {
  ObservationSpec spec;
  Potential potential;
  int box_radius = 0;
  std::vector<Mode> modes;
  Eigen::MatrixXcd matrix;

  int size() const { return static_cast<int>(modes.size()); }
};

/// Φ(T,δ) = ∫₀^T e^{iδt} dt: T at δ = 0, else (e^{iδT}−1)/(iδ).
Complex phi_factor(double T, double delta);

/// Exact assembly: closed form for V = 0, eigenbasis synthesis with the same
/// Φ factors for static V ≠ 0.
GramOperator gram(const ObservationSpec& spec, const Potential& V, int box_radius);

/// Direct composite-Simpson time quadrature of the same integral (oracle).
GramOperator gram_quadrature(const ObservationSpec& spec, const Potential& V, int box_radius,
                             int panels = 10000);

/// (λ_min, C = 1/λ_min); C = ∞ when λ_min ≤ 10⁻¹² (observability failed at
/// this truncation).
std::pair<double, double> observability_constant(const GramOperator& G);

/// ⟨u0, G u0⟩ / ‖u0‖² = (∫₀^T ‖U_V(t)u0‖²_{L²(ω)} dt) / ‖u0‖².
double quotient(const FourierState& u0, const GramOperator& G);

/// Consistency link: every member's observed mass fraction dominates λ_min.
struct BoundReport {
  double lambda_min = 0.0;
  std::vector<double> quotients;
  double min_gap = 0.0;  // min over members of quotient − λ_min
  bool passed = false;
};

BoundReport corollary_lower_bound_check(const std::vector<FourierState>& family,
                                        const GramOperator& G, double slack = 1e-8);

}  // namespace twomicro
