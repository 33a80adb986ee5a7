#include "twomicro/fourier.hpp"

#include <numbers>
#include <stdexcept>

namespace twomicro {

std::vector<Mode> box_modes(int dim, int radius) {
  std::vector<Mode> out;
  Mode k = Mode::Constant(dim, -radius);
  while (true) {
    out.push_back(k);
    int i = dim - 1;
    for (; i >= 0; --i) {
      if (++k[i] <= radius) break;
      k[i] = -radius;
    }
    if (i < 0) break;
  }
  return out;
}

FourierState& FourierState::normalize() {
  double n = norm();
  if (n == 0) throw std::domain_error("FourierState::normalize: zero state");
  for (auto& [k, c] : coeff) c /= n;
  return *this;
}

Complex FourierState::value_at(const Eigen::VectorXd& x) const {
  Complex s = 0;
  for (const auto& [k, c] : coeff) {
    double phase = 0;
    for (int i = 0; i < dim; ++i) phase += k[i] * x[i];
    s += c * std::polar(1.0, phase);
  }
  return s / std::pow(2.0 * std::numbers::pi, dim / 2.0);
}

void FourierState::set(const Mode& k, Complex c) {
  if (k.size() != dim) throw std::invalid_argument("FourierState::set: dimension mismatch");
  if (k.lpNorm<Eigen::Infinity>() > box)
    throw std::out_of_range("FourierState::set: mode outside box");
  if (c == Complex(0)) coeff.erase(k);
  else coeff[k] = c;
}

Complex FourierState::get(const Mode& k) const {
  auto it = coeff.find(k);
  return it == coeff.end() ? Complex(0) : it->second;
}

FourierState plane_wave(int dim, const Mode& k) {
  FourierState u;
  u.dim = dim;
  u.box = static_cast<int>(k.lpNorm<Eigen::Infinity>());
  u.coeff[k] = 1.0;
  return u;
}

}  // namespace twomicro
