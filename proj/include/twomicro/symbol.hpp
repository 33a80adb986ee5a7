#pragma once

#include "twomicro/fourier.hpp"
#include "twomicro/lattice.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

namespace twomicro {

/// â_m(ξ, η): the m-th x-Fourier coefficient of a symbol, as a callable.
/// η is the two-microlocal slot; profiles that do not use it ignore it.
using Profile = std::function<Complex(const Eigen::VectorXd& xi, const Eigen::VectorXd& eta)>;

/// Band-limited-in-x observable a(x,ξ,η) = Σ_m â_m(ξ,η) e^{im·x}/(2π)^{d/2}.
struct Symbol {
  int dim = 0;
  ModeMap<Profile> modes;
  double homogeneity_radius = 0.0;  // η-profile is 0-homogeneous beyond this
  std::optional<PrimitiveModule> module_tag;

  Complex value_at(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                   const Eigen::VectorXd& eta) const;
};

inline double fourier_normalization(int dim) {
  return std::pow(2.0 * std::numbers::pi, dim / 2.0);
}

/// a ≡ c (a single zero mode; â_0 = (2π)^{d/2} c).
Symbol constant_symbol(int dim, Complex c);

/// a = c·e^{im·x}.
Symbol x_mode_symbol(int dim, const Mode& m, Complex c = 1.0);

/// a = f(ξ), no x or η dependence.
Symbol xi_symbol(int dim, std::function<Complex(const Eigen::VectorXd&)> f);

/// a(x) = Σ_m c_m e^{im·x} from explicit exponential-sum coefficients.
Symbol x_symbol(int dim, const ModeMap<Complex>& coeffs);

/// a = cos(m·x)·f(ξ) (f defaults to 1). Hermitian by construction.
Symbol cos_symbol(int dim, const Mode& m,
                  std::function<Complex(const Eigen::VectorXd&)> f = nullptr);

/// General constructor: supply â_m profiles directly (already including the
/// (2π)^{d/2} factor relative to exponential-sum coefficients).
Symbol make_symbol(int dim, ModeMap<Profile> profiles, double homogeneity_radius = 0.0,
                   std::optional<PrimitiveModule> tag = std::nullopt);

/// The symbol ξ·∂_x a: mode-m profile i (m·ξ) â_m(ξ,η).
Symbol xi_dot_grad_x(const Symbol& a);

/// Geodesic-flow pullback a∘φ_τ with φ_τ(x,ξ) = (x+τξ, ξ):
/// mode-m profile e^{iτ m·ξ} â_m(ξ,η).
Symbol flow_symbol(const Symbol& a, double tau);

/// Drops every x-mode outside Λ and tags the result; idempotent.
Symbol average_symbol(const Symbol& a, const PrimitiveModule& lambda);

/// True when every mode's profile has Hermitian symmetry against its mirror,
/// sampled at the given points (diagnostic, used by tests).
bool hermitian_sampled(const Symbol& a, const std::vector<Eigen::VectorXd>& xi_samples);

/// Smooth cutoff χ(v) = bump(|v|/R)², with bump ≡ 1 on [0,1] and ≡ 0 on
/// [2,∞). The square-of-a-bump form keeps √χ smooth.
struct Cutoff {
  double R = 1.0;

  static double bump(double r);
  double sqrt_chi(double r) const { return bump(r / R); }
  double chi(double r) const {
    double b = bump(r / R);
    return b * b;
  }
  double chi(const Eigen::VectorXd& v) const { return chi(v.norm()); }
  double sqrt_chi(const Eigen::VectorXd& v) const { return sqrt_chi(v.norm()); }
};

}  // namespace twomicro
