#include "twomicro/quantize.hpp"

#include <Eigen/SVD>

#include <numbers>
#include <stdexcept>

namespace twomicro {

namespace {

Eigen::VectorXd midpoint(const Mode& j, const Mode& k) {
  return 0.5 * (j + k).cast<double>();
}

Eigen::MatrixXd projector_matrix(const ModuleGeometry& geom) {
  return to_double(geom.projector);
}

Complex element_with_projector(const Symbol& a, double h, const Mode& j, const Mode& k,
                               const Eigen::MatrixXd* P) {
  Mode m = j - k;
  auto it = a.modes.find(m);
  if (it == a.modes.end()) return 0.0;
  Eigen::VectorXd mid = midpoint(j, k);
  Eigen::VectorXd eta = P ? Eigen::VectorXd(*P * mid) : Eigen::VectorXd::Zero(a.dim);
  return it->second(h * mid, eta) / fourier_normalization(a.dim);
}

}  // namespace

Complex matrix_element(const Symbol& a, double h, const Mode& j, const Mode& k) {
  if (a.module_tag) {
    Eigen::MatrixXd P = projector_matrix(geometry(*a.module_tag));
    return element_with_projector(a, h, j, k, &P);
  }
  return element_with_projector(a, h, j, k, nullptr);
}

FourierState apply(const Symbol& a, double h, const FourierState& u, int hard_box) {
  FourierState out;
  out.dim = u.dim;
  out.box = hard_box;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(a.dim);
  for (const auto& [k, c] : u.coeff) {
    for (const auto& [m, prof] : a.modes) {
      Mode j = k + m;
      if (j.lpNorm<Eigen::Infinity>() > hard_box)
        throw std::out_of_range("apply: output support escapes the configured box");
      Eigen::VectorXd mid = midpoint(j, k);
      out.coeff[j] += c * prof(h * mid, eta) / fourier_normalization(a.dim);
    }
  }
  std::erase_if(out.coeff, [](const auto& kv) { return kv.second == Complex(0); });
  return out;
}

Complex wigner_pair(const FourierState& u, const Symbol& a, double h) {
  Complex s = 0;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(a.dim);
  const double norm = fourier_normalization(a.dim);
  for (const auto& [k, c] : u.coeff) {
    for (const auto& [m, prof] : a.modes) {
      Mode j = k + m;
      auto it = u.coeff.find(j);
      if (it == u.coeff.end()) continue;
      s += c * std::conj(it->second) * prof(h * midpoint(k, j), eta) / norm;
    }
  }
  return s;
}

Eigen::MatrixXcd operator_matrix(const Symbol& a, double h, const std::vector<Mode>& modes) {
  const Eigen::Index n = static_cast<Eigen::Index>(modes.size());
  std::optional<Eigen::MatrixXd> P;
  if (a.module_tag) P = projector_matrix(geometry(*a.module_tag));
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index col = 0; col < n; ++col)
    for (Eigen::Index row = 0; row < n; ++row)
      A(row, col) = element_with_projector(a, h, modes[row], modes[col], P ? &*P : nullptr);
  return A;
}

double commutator_defect(const Symbol& a, double h, int box_radius) {
  Symbol transported = xi_dot_grad_x(a);
  auto modes = box_modes(a.dim, box_radius);
  double defect = 0;
  const Complex ih(0.0, h);
  for (const auto& j : modes) {
    for (const auto& k : modes) {
      Mode m = j - k;
      if (a.modes.find(m) == a.modes.end()) continue;
      Complex A = matrix_element(a, h, j, k);
      double ej = 0.5 * j.cast<double>().squaredNorm();
      double ek = 0.5 * k.cast<double>().squaredNorm();
      Complex lhs = (ej - ek) * A;
      Complex rhs = matrix_element(transported, h, j, k) / ih;
      defect = std::max(defect, std::abs(lhs - rhs));
    }
  }
  return defect;
}

namespace {

Complex filtered_pair(const FourierState& u, const Symbol& a,
                      const std::vector<Eigen::MatrixXd>& projectors,
                      const std::vector<Cutoff>& cutoffs,
                      const std::vector<FilterSide>& sides, double h) {
  Complex s = 0;
  const double norm = fourier_normalization(a.dim);
  for (const auto& [k, c] : u.coeff) {
    for (const auto& [m, prof] : a.modes) {
      Mode j = k + m;
      auto it = u.coeff.find(j);
      if (it == u.coeff.end()) continue;
      Eigen::VectorXd mid = midpoint(k, j);
      double weight = 1.0;
      Eigen::VectorXd eta;
      for (size_t l = 0; l < projectors.size(); ++l) {
        Eigen::VectorXd eta_l = projectors[l] * mid;
        double w = cutoffs[l].chi(eta_l);
        weight *= (sides[l] == FilterSide::Inner) ? w : (1.0 - w);
        eta = eta_l;  // η slot of the innermost module in the chain
      }
      if (weight == 0.0) continue;
      s += c * std::conj(it->second) * weight * prof(h * mid, eta) / norm;
    }
  }
  return s;
}

}  // namespace

Complex twomicro_pair(const FourierState& u, const Symbol& a, const ModuleGeometry& geom,
                      double h, const Cutoff& cutoff, FilterSide side) {
  if (!a.module_tag)
    throw std::invalid_argument("twomicro_pair: symbol lacks a module tag");
  if (!(*a.module_tag == geom.module))
    throw std::invalid_argument("twomicro_pair: symbol tag does not match geometry");
  return filtered_pair(u, a, {projector_matrix(geom)}, {cutoff}, {side}, h);
}

Complex nested_twomicro_pair(const FourierState& u, const Symbol& a,
                             const std::vector<ModuleGeometry>& chain, double h,
                             const std::vector<Cutoff>& cutoffs,
                             const std::vector<FilterSide>& sides) {
  if (chain.empty() || chain.size() != cutoffs.size() || chain.size() != sides.size())
    throw std::invalid_argument("nested_twomicro_pair: inconsistent chain lengths");
  for (size_t l = 1; l < chain.size(); ++l) {
    const auto& prev = chain[l - 1].module;
    const auto& cur = chain[l].module;
    if (!(cur.rank() < prev.rank()) || !submodule_of(cur, prev))
      throw std::invalid_argument("nested_twomicro_pair: chain not strictly decreasing");
  }
  std::vector<Eigen::MatrixXd> projectors;
  for (const auto& g : chain) projectors.push_back(projector_matrix(g));
  return filtered_pair(u, a, projectors, cutoffs, sides, h);
}

Symbol symbol_sqrt(const Symbol& a, int mode_radius, int grid_points_per_dim) {
  const int d = a.dim;
  const int n = grid_points_per_dim;
  // Sample x |-> a(x,ξ,η) on a periodic grid and take DFT coefficients of
  // the pointwise square root. Spectrally accurate for smooth positive a.
  Symbol out;
  out.dim = d;
  out.homogeneity_radius = a.homogeneity_radius;
  out.module_tag = a.module_tag;
  auto a_copy = a;  // captured by value in profiles
  for (const auto& m : box_modes(d, mode_radius)) {
    out.modes[m] = [a_copy, m, d, n](const Eigen::VectorXd& xi,
                                     const Eigen::VectorXd& eta) -> Complex {
      const double step = 2.0 * std::numbers::pi / n;
      Complex acc = 0;
      std::vector<int> idx(d, 0);
      while (true) {
        Eigen::VectorXd x(d);
        for (int i = 0; i < d; ++i) x[i] = idx[i] * step;
        Complex val = a_copy.value_at(x, xi, eta);
        if (val.real() < -1e-12)
          throw std::domain_error("symbol_sqrt: symbol is negative on the sample grid");
        double v = std::max(0.0, val.real());
        double phase = 0;
        for (int i = 0; i < d; ++i) phase += m[i] * x[i];
        acc += std::sqrt(v) * std::polar(1.0, -phase);
        int i = d - 1;
        for (; i >= 0; --i) {
          if (++idx[i] < n) break;
          idx[i] = 0;
        }
        if (i < 0) break;
      }
      double cell = std::pow(step, d);
      return acc * cell / fourier_normalization(d);
    };
  }
  return out;
}

namespace {

// Operator matrix with a cutoff weight at the Weyl midpoint: for tagged
// symbols the weight argument is P_Λ(j+k)/2; otherwise it is h(j+k)/2.
Eigen::MatrixXcd weighted_matrix(const Symbol& a, double h, const std::vector<Mode>& modes,
                                 const std::optional<Cutoff>& cutoff, bool sqrt_weight) {
  const Eigen::Index nn = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(nn, nn);
  std::optional<Eigen::MatrixXd> P;
  if (a.module_tag) P = to_double(geometry(*a.module_tag).projector);
  for (Eigen::Index col = 0; col < nn; ++col) {
    for (Eigen::Index row = 0; row < nn; ++row) {
      Complex e = element_with_projector(a, h, modes[row], modes[col], P ? &*P : nullptr);
      if (e == Complex(0)) continue;
      if (cutoff) {
        Eigen::VectorXd mid = 0.5 * (modes[row] + modes[col]).cast<double>();
        Eigen::VectorXd arg = P ? Eigen::VectorXd(*P * mid) : Eigen::VectorXd(h * mid);
        double w = sqrt_weight ? cutoff->sqrt_chi(arg) : cutoff->chi(arg);
        e *= w;
      }
      A(row, col) = e;
    }
  }
  return A;
}

}  // namespace

double sqrt_symbol_defect(const Symbol& a, double h, std::optional<Cutoff> cutoff,
                          int box_radius, int sqrt_mode_radius) {
  // Assemble on an inflated box and take the norm on the interior block, so
  // the operator product is complete there and the defect measures the
  // calculus, not the box edge.
  auto big = box_modes(a.dim, box_radius + sqrt_mode_radius);
  Eigen::MatrixXcd A = weighted_matrix(a, h, big, cutoff, /*sqrt_weight=*/false);
  Symbol b = symbol_sqrt(a, sqrt_mode_radius);
  Eigen::MatrixXcd B = weighted_matrix(b, h, big, cutoff, /*sqrt_weight=*/true);
  Eigen::MatrixXcd D = A - B * B;
  std::vector<Eigen::Index> keep;
  for (size_t i = 0; i < big.size(); ++i)
    if (big[i].lpNorm<Eigen::Infinity>() <= box_radius)
      keep.push_back(static_cast<Eigen::Index>(i));
  Eigen::MatrixXcd Dk(keep.size(), keep.size());
  for (size_t r = 0; r < keep.size(); ++r)
    for (size_t c = 0; c < keep.size(); ++c) Dk(r, c) = D(keep[r], keep[c]);
  return Dk.jacobiSvd().singularValues()(0);
}

double mode_sum_bound(const Symbol& a, double h, const std::vector<Mode>& modes) {
  double total = 0;
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(a.dim);
  const double norm = fourier_normalization(a.dim);
  for (const auto& [m, prof] : a.modes) {
    double sup = 0;
    for (const auto& j : modes)
      for (const auto& k : modes) {
        if (!exact_equal(j - k, m)) continue;
        Eigen::VectorXd mid = 0.5 * (j + k).cast<double>();
        sup = std::max(sup, std::abs(prof(h * mid, eta)) / norm);
      }
    total += sup;
  }
  return total;
}

double truncated_operator_norm(const Symbol& a, double h, int box_radius) {
  auto modes = box_modes(a.dim, box_radius);
  Eigen::MatrixXcd A = operator_matrix(a, h, modes);
  return A.jacobiSvd().singularValues()(0);
}

}  // namespace twomicro
