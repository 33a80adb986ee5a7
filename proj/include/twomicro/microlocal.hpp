#pragma once

#include "twomicro/dynamics.hpp"
#include "twomicro/quantize.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace twomicro {

/// Exact mode relabeling k ↦ (σ, m) = (P_{Λ^⊥}k, P_Λk) realizing the degree-p_Λ
/// covering T_{Λ^⊥} × T_Λ → T^d on the Fourier side.
struct CoveringSplit {
  ModuleGeometry geometry;
  int box = 0;
  ModeMap<std::pair<RationalVector, RationalVector>> mode_split;  // k -> (sigma, m)
};

CoveringSplit covering_split(const ModuleGeometry& geom, int box);

/// |Σ_pairs |û|² − ‖u‖²|; the splitting is a relabeling, so this is the mass
/// of any modes that escaped the split's box (0 when the box covers u).
double lift_isometry_check(const FourierState& u, const CoveringSplit& split);

/// Finite-h stand-in for the operator σ_Λ: the Gram matrix
///   matrix[m,m'] = Σ_σ û(σ+m) conj(û(σ+m')) √χ(m/R) √χ(m'/R),
/// indexed by the Λ-side modes m with nonzero weight; PSD by construction.
struct SigmaProxy {
  PrimitiveModule module;
  double h = 0.0;
  Cutoff cutoff;
  std::vector<RationalVector> modes;
  Eigen::MatrixXcd matrix;

  int size() const { return static_cast<int>(modes.size()); }
  double trace() const { return matrix.trace().real(); }
  double min_eigenvalue() const;
};

SigmaProxy sigma_proxy(const FourierState& u, const ModuleGeometry& geom, double h,
                       const Cutoff& cutoff);

/// Tr(M_b · U(t) σ U(t)*) on the averaged plan, with M_b the multiplication
/// matrix (M_b)[m,m'] = (2π)^{−d/2} b̂_{m−m'} for an x-only symbol b with
/// modes in Λ. Real up to roundoff for Hermitian b.
double nu_lambda(const Symbol& b, const SigmaProxy& proxy, const PropagatorPlan& avgplan,
                 double t);

/// Deviation (or value) grid over decreasing h, increasing R and time samples,
/// in the order the two limits are taken: h → 0 first, then R → ∞.
struct LimitTable {
  std::vector<double> h_grid;     // strictly decreasing
  std::vector<double> R_grid;     // strictly increasing
  std::vector<double> t_samples;
  std::vector<std::vector<std::vector<double>>> values;  // [R][h][t]
};

struct LimitSummary {
  std::vector<double> per_R_estimate;  // Richardson in h at each R
  std::vector<double> per_R_last;      // smallest-h value at each R
  std::vector<double> h_slopes;        // apparent order in h at each R
  double estimate = 0.0;               // largest-R Richardson value
  double last_value = 0.0;
  std::string verdict;                 // "decreasing" | "increasing" | "mixed"
};

/// Per-R Richardson extrapolation in h (Aitken on the last three points; falls
/// back to the last value for flat series), then the trend in R.
LimitSummary limit_extrapolate(const LimitTable& table);

/// u(t) for the family member at h; lets callers pick the propagation route
/// (dense plan, separable tensor product, closed form).
using FamilyEvolver = std::function<FourierState(double h, double t)>;

/// lhs(t,h) = twomicro_pair(u(t), b, Λ, h, R, inner) against
/// rhs(t,h) = ν_Λ from the t=0 proxy evolved by the ⟨V⟩_Λ plan; the table
/// holds |lhs − rhs| per (R, h, t).
LimitTable propagation_law_test(const std::vector<double>& h_grid, const FamilyEvolver& evolve,
                                const Potential& V, const ModuleGeometry& geom, const Symbol& b,
                                const std::vector<double>& R_grid,
                                const std::vector<double>& t_samples, int avg_box);

/// Half-open axis-aligned box [lo, hi) in ξ-space.
struct XiBox {
  Eigen::VectorXd lo, hi;
  bool contains(const Eigen::VectorXd& xi) const;
  bool overlaps(const XiBox& o) const;
};

/// Mass per box of the rescaled frequencies hk: histogram[i] = Σ_{hk∈box_i} |û(k)|².
std::vector<double> marginal_xi(const FourierState& u, double h, const std::vector<XiBox>& boxes);

/// Per-box disintegration of the time-averaged measure: the state is filtered
/// to modes with hk in the box at every time node, and the resulting density
/// is normalized by the box's time-averaged mass.
struct ConditionalDensity {
  bool present = false;   // false when the box mass is below threshold
  double mass = 0.0;
  Eigen::VectorXd density;
};

std::vector<ConditionalDensity> conditional_density(const PropagatorPlan& plan,
                                                    const FourierState& u0, double T, double h,
                                                    const std::vector<XiBox>& boxes,
                                                    const std::vector<Eigen::VectorXd>& xgrid,
                                                    int panels_per_unit_time = 1000,
                                                    double mass_threshold = 1e-8);

/// Canonical h-grid for limit experiments.
std::vector<double> default_h_grid();

/// Pure oscillation e^{i⌊ξ₀/h⌋·x} (componentwise floor).
FourierState plane_wave_ladder(const Eigen::VectorXd& xi0, double h);

/// Tensor product (u ⊗ v)(x, y) = u(x)v(y); dimensions add.
FourierState tensor_state(const FourierState& u, const FourierState& v);

/// f(x)e^{i⌊ξ₀/h⌋·x} for a band-limited profile f given by exponential-sum
/// coefficients; normalized.
FourierState transverse_profile_state(const ModeMap<Complex>& profile,
                                      const Eigen::VectorXd& xi0, double h);

/// Gaussian wave packet at (x₀, ξ₀) with width h^{1/2}:
/// û(k) ∝ exp(−|hk − ξ₀|²/(4h)) e^{−ik·x₀}, truncated to the natural box and
/// normalized.
FourierState gaussian_packet(const Eigen::VectorXd& x0, const Eigen::VectorXd& xi0, double h);

}  // namespace twomicro
