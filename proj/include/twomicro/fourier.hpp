#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <vector>

namespace twomicro {

using Complex = std::complex<double>;
using Mode = Eigen::VectorXi;

struct ModeLess {
  bool operator()(const Mode& a, const Mode& b) const {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

template <typename T>
using ModeMap = std::map<Mode, T, ModeLess>;

inline Mode make_mode(std::initializer_list<int> xs) {
  Mode m(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (int x : xs) m[i++] = x;
  return m;
}

/// All modes with ‖k‖_∞ ≤ radius, in lexicographic order.
std::vector<Mode> box_modes(int dim, int radius);

/// Truncated wavefunction on T^d: û(k) over a finite set of integer modes.
/// The L² pairing is the plain ℓ² sum; e_k(x) = e^{ik·x}/(2π)^{d/2}.
struct FourierState {
  int dim = 0;
  int box = 0;  // coefficients satisfy ‖k‖_∞ ≤ box
  ModeMap<Complex> coeff;

  double squared_norm() const {
    double s = 0;
    for (const auto& [k, c] : coeff) s += std::norm(c);
    return s;
  }
  double norm() const { return std::sqrt(squared_norm()); }

  FourierState& normalize();

  /// Pointwise value u(x) = Σ û(k) e^{ik·x}/(2π)^{d/2}.
  Complex value_at(const Eigen::VectorXd& x) const;

  void set(const Mode& k, Complex c);
  Complex get(const Mode& k) const;
};

FourierState plane_wave(int dim, const Mode& k);

inline Complex inner(const FourierState& u, const FourierState& v) {
  // ⟨u, v⟩, antilinear in the first slot.
  Complex s = 0;
  for (const auto& [k, c] : u.coeff) {
    auto it = v.coeff.find(k);
    if (it != v.coeff.end()) s += std::conj(c) * it->second;
  }
  return s;
}

inline double l2_distance(const FourierState& u, const FourierState& v) {
  double s = 0;
  ModeMap<Complex> all = u.coeff;
  for (const auto& [k, c] : v.coeff) all[k] -= c;
  for (const auto& [k, c] : all) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace twomicro
