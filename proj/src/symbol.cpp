#include "twomicro/symbol.hpp"

#include <cmath>

namespace twomicro {

Complex Symbol::value_at(const Eigen::VectorXd& x, const Eigen::VectorXd& xi,
                         const Eigen::VectorXd& eta) const {
  Complex s = 0;
  for (const auto& [m, prof] : modes) {
    double phase = 0;
    for (int i = 0; i < dim; ++i) phase += m[i] * x[i];
    s += prof(xi, eta) * std::polar(1.0, phase);
  }
  return s / fourier_normalization(dim);
}

Symbol constant_symbol(int dim, Complex c) {
  Symbol a;
  a.dim = dim;
  const double amp = fourier_normalization(dim);
  a.modes[Mode::Zero(dim)] = [c, amp](const Eigen::VectorXd&, const Eigen::VectorXd&) {
    return amp * c;
  };
  return a;
}

Symbol x_mode_symbol(int dim, const Mode& m, Complex c) {
  Symbol a;
  a.dim = dim;
  const double amp = fourier_normalization(dim);
  a.modes[m] = [c, amp](const Eigen::VectorXd&, const Eigen::VectorXd&) { return amp * c; };
  return a;
}

Symbol xi_symbol(int dim, std::function<Complex(const Eigen::VectorXd&)> f) {
  Symbol a;
  a.dim = dim;
  const double amp = fourier_normalization(dim);
  a.modes[Mode::Zero(dim)] = [f = std::move(f), amp](const Eigen::VectorXd& xi,
                                                     const Eigen::VectorXd&) {
    return amp * f(xi);
  };
  return a;
}

Symbol x_symbol(int dim, const ModeMap<Complex>& coeffs) {
  Symbol a;
  a.dim = dim;
  const double amp = fourier_normalization(dim);
  for (const auto& [m, c] : coeffs) {
    if (c == Complex(0)) continue;
    a.modes[m] = [c, amp](const Eigen::VectorXd&, const Eigen::VectorXd&) { return amp * c; };
  }
  return a;
}

Symbol cos_symbol(int dim, const Mode& m, std::function<Complex(const Eigen::VectorXd&)> f) {
  Symbol a;
  a.dim = dim;
  const double amp = fourier_normalization(dim) * 0.5;
  auto prof = [f, amp](const Eigen::VectorXd& xi, const Eigen::VectorXd&) -> Complex {
    return f ? amp * f(xi) : Complex(amp);
  };
  a.modes[m] = prof;
  a.modes[Mode(-m)] = prof;
  return a;
}

Symbol make_symbol(int dim, ModeMap<Profile> profiles, double homogeneity_radius,
                   std::optional<PrimitiveModule> tag) {
  Symbol a;
  a.dim = dim;
  a.modes = std::move(profiles);
  a.homogeneity_radius = homogeneity_radius;
  a.module_tag = std::move(tag);
  return a;
}

Symbol xi_dot_grad_x(const Symbol& a) {
  Symbol out;
  out.dim = a.dim;
  out.homogeneity_radius = a.homogeneity_radius;
  out.module_tag = a.module_tag;
  for (const auto& [m, prof] : a.modes) {
    Eigen::VectorXd mv = m.cast<double>();
    out.modes[m] = [mv, prof](const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) {
      return Complex(0.0, mv.dot(xi)) * prof(xi, eta);
    };
  }
  return out;
}

Symbol flow_symbol(const Symbol& a, double tau) {
  Symbol out;
  out.dim = a.dim;
  out.homogeneity_radius = a.homogeneity_radius;
  out.module_tag = a.module_tag;
  for (const auto& [m, prof] : a.modes) {
    Eigen::VectorXd mv = m.cast<double>();
    out.modes[m] = [mv, tau, prof](const Eigen::VectorXd& xi, const Eigen::VectorXd& eta) {
      return std::polar(1.0, tau * mv.dot(xi)) * prof(xi, eta);
    };
  }
  return out;
}

Symbol average_symbol(const Symbol& a, const PrimitiveModule& lambda) {
  Symbol out;
  out.dim = a.dim;
  out.homogeneity_radius = a.homogeneity_radius;
  out.module_tag = lambda;
  for (const auto& [m, prof] : a.modes) {
    IntVector k(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) k[i] = m[i];
    if (mode_in(k, lambda)) out.modes[m] = prof;
  }
  return out;
}

bool hermitian_sampled(const Symbol& a, const std::vector<Eigen::VectorXd>& xi_samples) {
  Eigen::VectorXd eta = Eigen::VectorXd::Zero(a.dim);
  for (const auto& [m, prof] : a.modes) {
    auto it = a.modes.find(Mode(-m));
    if (it == a.modes.end()) return false;
    for (const auto& xi : xi_samples) {
      Complex lhs = it->second(xi, eta);
      Complex rhs = std::conj(prof(xi, eta));
      if (std::abs(lhs - rhs) > 1e-12 * (1.0 + std::abs(rhs))) return false;
    }
  }
  return true;
}

double Cutoff::bump(double r) {
  r = std::abs(r);
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  auto f = [](double t) { return std::exp(-1.0 / t); };
  double t = 2.0 - r;  // in (0,1)
  return f(t) / (f(t) + f(1.0 - t));
}

}  // namespace twomicro
