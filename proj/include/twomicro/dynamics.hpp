#pragma once

#include "twomicro/quantize.hpp"

#include <functional>
#include <string>

namespace twomicro {

/// Real trigonometric-polynomial potential V(x) = Σ_k V̂_k e^{ik·x}, with an
/// optional smooth per-mode time modulation (shared by a mode and its mirror
/// so the potential stays real).
struct Potential {
  int dim = 0;
  ModeMap<Complex> modes;
  ModeMap<std::function<double(double)>> time_mod;

  bool time_dependent() const { return !time_mod.empty(); }
  bool hermitian(double tol = 1e-12) const;

  Complex coeff_at(const Mode& k, double t) const;
  double value_at(const Eigen::VectorXd& x, double t) const;
};

Potential zero_potential(int dim);

/// Adds amp·cos(k·x) (modes ±k get amp/2 each).
void add_cos_mode(Potential& V, const Mode& k, double amp);

/// Attaches the real modulation f(t) to the mode pair ±k (keeps V real).
void set_time_modulation(Potential& V, const Mode& k, std::function<double(double)> f);

enum class Scheme { Eigenbasis, SplitStep };

/// Immutable propagation plan for H = −½Δ + V on an explicit mode set.
/// Frequencies are ambient vectors; for plans on a sub-torus T_Λ they are
/// rational points of P_Λ Z^d rather than integer modes.
struct PropagatorPlan {
  int dim = 0;
  Potential potential;
  Scheme scheme = Scheme::Eigenbasis;
  double dt = 1e-3;

  std::vector<RationalVector> freqs_exact;
  Eigen::MatrixXd freqs;  // dim x n, double copies of freqs_exact
  std::map<std::string, int> index;  // exact-frequency key -> column
  int box = 0;  // inf-norm bound on the (integer) frequencies

  Eigen::MatrixXcd hamiltonian;  // time-independent part (kinetic + V(·,0))
  Eigen::VectorXd evals;
  Eigen::MatrixXcd evecs;
  bool has_eigenbasis = false;

  int grid_per_dim = 0;       // split-step collocation grid (full-torus plans)
  Eigen::MatrixXcd synth;     // grid x n synthesis matrix for split-step
  std::vector<Eigen::VectorXd> grid_points;

  int size() const { return static_cast<int>(freqs_exact.size()); }
  int find(const RationalVector& freq) const;  // -1 when absent
};

std::string frequency_key(const RationalVector& freq);

/// Free evolution û(k) ↦ e^{−it|k|²/2} û(k); exactly unitary.
FourierState free_propagate(const FourierState& u, double t);

/// Plan over the full mode box ‖k‖_∞ ≤ N.
PropagatorPlan make_plan(const Potential& V, int box_radius, Scheme scheme = Scheme::Eigenbasis,
                         double dt = 1e-3);

/// Plan over an explicit set of integer modes (support-adapted boxes).
PropagatorPlan make_plan_for_modes(const Potential& V, const std::vector<Mode>& modes,
                                   Scheme scheme = Scheme::Eigenbasis, double dt = 1e-3);

/// Plan on the sub-torus T_Λ: states indexed by the projected frequencies
/// P_Λ k (k over the ambient box), kinetic term ½|P_Λ k|², potential averaged
/// onto Λ. Rank 0 yields the trivial single-state plan.
PropagatorPlan averaged_propagator(const ModuleGeometry& geom, const Potential& V,
                                   int box_radius);

/// u(t) = U(t) u0. Refuses states whose support escapes the plan's mode set.
FourierState propagate(const PropagatorPlan& plan, const FourierState& u0, double t);

/// Coefficient vector of U(t) u0 in the plan's ordering (shared workhorse).
Eigen::VectorXcd propagate_vector(const PropagatorPlan& plan, const Eigen::VectorXcd& v0,
                                  double t);

Eigen::VectorXcd state_to_vector(const PropagatorPlan& plan, const FourierState& u);
FourierState vector_to_state(const PropagatorPlan& plan, const Eigen::VectorXcd& v, int box);

/// The unitary U(t) as a dense matrix in the plan ordering (eigenbasis plans).
Eigen::MatrixXcd propagator_matrix(const PropagatorPlan& plan, double t);

/// Π_h-style smooth spectral cutoff: weights profile(h²λ_n) in the eigenbasis.
FourierState spectral_cutoff(const FourierState& u, const PropagatorPlan& plan, double h,
                             const std::function<double(double)>& profile);

std::vector<Eigen::VectorXd> uniform_grid(int dim, int points_per_dim);

/// x ↦ (1/T)∫₀^T |u(t,x)|² dt by composite Simpson. Integrates to ‖u0‖²
/// over the torus within quadrature tolerance.
Eigen::VectorXd time_averaged_density(const PropagatorPlan& plan, const FourierState& u0,
                                      double T, const std::vector<Eigen::VectorXd>& xgrid,
                                      int panels_per_unit_time = 1000);

/// Exponential-sum coefficients c_k of the time-averaged density, so that
/// the density is Σ_k c_k e^{ik·x}; c_0 is the mass divided by (2π)^d.
ModeMap<Complex> time_averaged_density_modes(const PropagatorPlan& plan, const FourierState& u0,
                                             double T, const std::vector<Mode>& ks,
                                             int panels_per_unit_time = 1000);

}  // namespace twomicro
