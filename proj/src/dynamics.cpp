#include "twomicro/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>

namespace twomicro {

bool Potential::hermitian(double tol) const {
  for (const auto& [k, c] : modes) {
    auto it = modes.find(Mode(-k));
    if (it == modes.end()) return false;
    if (std::abs(it->second - std::conj(c)) > tol * (1.0 + std::abs(c))) return false;
  }
  return true;
}

Complex Potential::coeff_at(const Mode& k, double t) const {
  auto it = modes.find(k);
  if (it == modes.end()) return 0.0;
  Complex c = it->second;
  auto mod = time_mod.find(k);
  if (mod != time_mod.end()) c *= mod->second(t);
  return c;
}

double Potential::value_at(const Eigen::VectorXd& x, double t) const {
  Complex s = 0;
  for (const auto& [k, c] : modes) {
    double phase = 0;
    for (int i = 0; i < dim; ++i) phase += k[i] * x[i];
    Complex cc = c;
    auto mod = time_mod.find(k);
    if (mod != time_mod.end()) cc *= mod->second(t);
    s += cc * std::polar(1.0, phase);
  }
  return s.real();
}

Potential zero_potential(int dim) {
  Potential V;
  V.dim = dim;
  return V;
}

void add_cos_mode(Potential& V, const Mode& k, double amp) {
  V.modes[k] += 0.5 * amp;
  V.modes[Mode(-k)] += 0.5 * amp;
}

void set_time_modulation(Potential& V, const Mode& k, std::function<double(double)> f) {
  V.time_mod[k] = f;
  V.time_mod[Mode(-k)] = std::move(f);
}

std::string frequency_key(const RationalVector& freq) {
  std::string s;
  for (Eigen::Index i = 0; i < freq.size(); ++i) {
    if (i) s += ',';
    s += format_rational(freq[i]);
  }
  return s;
}

int PropagatorPlan::find(const RationalVector& freq) const {
  auto it = index.find(frequency_key(freq));
  return it == index.end() ? -1 : it->second;
}

FourierState free_propagate(const FourierState& u, double t) {
  FourierState out = u;
  for (auto& [k, c] : out.coeff) c *= std::polar(1.0, -0.5 * t * k.cast<double>().squaredNorm());
  return out;
}

namespace {

RationalVector rational_of_mode(const Mode& k) {
  RationalVector f(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) f[i] = Rational(k[i]);
  return f;
}

// Integer difference of two exact frequencies, or nullopt when fractional.
std::optional<Mode> integer_difference(const RationalVector& a, const RationalVector& b) {
  Mode m(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Rational d = a[i] - b[i];
    if (d.denominator() != 1) return std::nullopt;
    m[i] = d.numerator().convert_to<int>();
  }
  return m;
}

// Shared construction once the exact frequency list is fixed.
PropagatorPlan build_plan(const Potential& V, std::vector<RationalVector> freqs, Scheme scheme,
                          double dt) {
  PropagatorPlan plan;
  plan.dim = V.dim;
  plan.potential = V;
  plan.scheme = scheme;
  plan.dt = dt;
  plan.freqs_exact = std::move(freqs);

  const int n = plan.size();
  plan.freqs.resize(plan.dim, n);
  double box = 0;
  for (int c = 0; c < n; ++c) {
    plan.freqs.col(c) = to_double(plan.freqs_exact[c]);
    plan.index[frequency_key(plan.freqs_exact[c])] = c;
    box = std::max(box, plan.freqs.col(c).lpNorm<Eigen::Infinity>());
  }
  plan.box = static_cast<int>(std::ceil(box));
  if (static_cast<int>(plan.index.size()) != n)
    throw std::invalid_argument("build_plan: duplicate frequencies");

  plan.hamiltonian = Eigen::MatrixXcd::Zero(n, n);
  for (int c = 0; c < n; ++c) {
    plan.hamiltonian(c, c) = 0.5 * plan.freqs.col(c).squaredNorm();
    for (int r = 0; r < n; ++r) {
      auto m = integer_difference(plan.freqs_exact[r], plan.freqs_exact[c]);
      if (m) plan.hamiltonian(r, c) += V.coeff_at(*m, 0.0);
    }
  }

  if (scheme == Scheme::Eigenbasis) {
    if (V.time_dependent())
      throw std::invalid_argument("build_plan: eigenbasis scheme needs a static potential");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(plan.hamiltonian);
    if (es.info() != Eigen::Success) throw std::runtime_error("build_plan: eigensolve failed");
    plan.evals = es.eigenvalues();
    plan.evecs = es.eigenvectors();
    plan.has_eigenbasis = true;
  } else {
    // Collocation grid fine enough that the retained modes stay orthogonal
    // under grid quadrature (no aliasing among them).
    int max_mode = plan.box;
    for (const auto& [k, c] : V.modes)
      max_mode = std::max(max_mode, static_cast<int>(k.lpNorm<Eigen::Infinity>()));
    plan.grid_per_dim = 2 * max_mode + 2;
    plan.grid_points = uniform_grid(plan.dim, plan.grid_per_dim);
    const auto g = static_cast<Eigen::Index>(plan.grid_points.size());
    plan.synth.resize(g, n);
    for (Eigen::Index row = 0; row < g; ++row)
      for (int col = 0; col < n; ++col)
        plan.synth(row, col) = std::polar(1.0, plan.freqs.col(col).dot(plan.grid_points[row]));
  }
  return plan;
}

}  // namespace

PropagatorPlan make_plan(const Potential& V, int box_radius, Scheme scheme, double dt) {
  return make_plan_for_modes(V, box_modes(V.dim, box_radius), scheme, dt);
}

PropagatorPlan make_plan_for_modes(const Potential& V, const std::vector<Mode>& modes,
                                   Scheme scheme, double dt) {
  std::vector<RationalVector> freqs;
  freqs.reserve(modes.size());
  for (const auto& k : modes) freqs.push_back(rational_of_mode(k));
  return build_plan(V, std::move(freqs), scheme, dt);
}

PropagatorPlan averaged_propagator(const ModuleGeometry& geom, const Potential& V,
                                   int box_radius) {
  const int d = geom.module.dim;
  // Restrict the potential to the module's modes.
  Potential Vavg = zero_potential(d);
  for (const auto& [k, c] : V.modes) {
    IntVector ki(d);
    for (int i = 0; i < d; ++i) ki[i] = k[i];
    if (mode_in(ki, geom.module)) {
      Vavg.modes[k] = c;
      auto mod = V.time_mod.find(k);
      if (mod != V.time_mod.end()) Vavg.time_mod[k] = mod->second;
    }
  }
  // Frequencies: the distinct projections P_Λ k over the ambient box, in
  // first-appearance order so Λ = Z^d reproduces make_plan's ordering.
  std::vector<RationalVector> freqs;
  std::set<std::string> seen;
  for (const auto& k : box_modes(d, box_radius)) {
    RationalVector km = rational_of_mode(k);
    RationalVector f(d);
    for (int i = 0; i < d; ++i) {
      Rational s = 0;
      for (int j = 0; j < d; ++j) s += geom.projector(i, j) * km[j];
      f[i] = s;
    }
    if (seen.insert(frequency_key(f)).second) freqs.push_back(std::move(f));
  }
  return build_plan(Vavg, std::move(freqs), Scheme::Eigenbasis, 1e-3);
}

Eigen::VectorXcd state_to_vector(const PropagatorPlan& plan, const FourierState& u) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(plan.size());
  for (const auto& [k, c] : u.coeff) {
    int idx = plan.find(rational_of_mode(k));
    if (idx < 0)
      throw std::out_of_range("state_to_vector: state support escapes the plan's mode set");
    v[idx] = c;
  }
  return v;
}

FourierState vector_to_state(const PropagatorPlan& plan, const Eigen::VectorXcd& v, int box) {
  FourierState u;
  u.dim = plan.dim;
  u.box = box;
  for (int i = 0; i < plan.size(); ++i) {
    if (v[i] == Complex(0)) continue;
    Mode k(plan.dim);
    bool integral = true;
    for (int j = 0; j < plan.dim; ++j) {
      const Rational& r = plan.freqs_exact[i][j];
      if (r.denominator() != 1) {
        integral = false;
        break;
      }
      k[j] = r.numerator().convert_to<int>();
    }
    if (!integral) {
      if (std::abs(v[i]) > 1e-12)
        throw std::logic_error("vector_to_state: mass on a non-integer frequency");
      continue;
    }
    u.coeff[k] = v[i];
  }
  return u;
}

Eigen::VectorXcd propagate_vector(const PropagatorPlan& plan, const Eigen::VectorXcd& v0,
                                  double t) {
  if (plan.scheme == Scheme::Eigenbasis) {
    if (!plan.has_eigenbasis) throw std::logic_error("propagate_vector: plan lacks eigenbasis");
    Eigen::VectorXcd w = plan.evecs.adjoint() * v0;
    for (int i = 0; i < plan.size(); ++i) w[i] *= std::polar(1.0, -t * plan.evals[i]);
    return plan.evecs * w;
  }
  // Strang splitting e^{-iτK/2} e^{-iτV} e^{-iτK/2}, with the potential
  // evaluated at the midpoint of each step when time-dependent.
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / plan.dt)));
  const double tau = t / steps;
  const auto g = static_cast<Eigen::Index>(plan.grid_points.size());
  const double cells = static_cast<double>(g);
  Eigen::VectorXd kinetic(plan.size());
  for (int i = 0; i < plan.size(); ++i) kinetic[i] = 0.5 * plan.freqs.col(i).squaredNorm();
  Eigen::VectorXcd v = v0;
  for (int s = 0; s < steps; ++s) {
    const double t_mid = (s + 0.5) * tau;
    for (int i = 0; i < plan.size(); ++i) v[i] *= std::polar(1.0, -0.5 * tau * kinetic[i]);
    Eigen::VectorXcd vals = plan.synth * v;
    for (Eigen::Index j = 0; j < g; ++j)
      vals[j] *= std::polar(1.0, -tau * plan.potential.value_at(plan.grid_points[j], t_mid));
    v = plan.synth.adjoint() * vals / cells;
    for (int i = 0; i < plan.size(); ++i) v[i] *= std::polar(1.0, -0.5 * tau * kinetic[i]);
  }
  return v;
}

FourierState propagate(const PropagatorPlan& plan, const FourierState& u0, double t) {
  return vector_to_state(plan, propagate_vector(plan, state_to_vector(plan, u0), t), plan.box);
}

Eigen::MatrixXcd propagator_matrix(const PropagatorPlan& plan, double t) {
  if (!plan.has_eigenbasis) throw std::logic_error("propagator_matrix: plan lacks eigenbasis");
  Eigen::VectorXcd phases(plan.size());
  for (int i = 0; i < plan.size(); ++i) phases[i] = std::polar(1.0, -t * plan.evals[i]);
  return plan.evecs * phases.asDiagonal() * plan.evecs.adjoint();
}

FourierState spectral_cutoff(const FourierState& u, const PropagatorPlan& plan, double h,
                             const std::function<double(double)>& profile) {
  if (!plan.has_eigenbasis)
    throw std::invalid_argument("spectral_cutoff: plan lacks an eigendecomposition");
  Eigen::VectorXcd w = plan.evecs.adjoint() * state_to_vector(plan, u);
  for (int i = 0; i < plan.size(); ++i) w[i] *= profile(h * h * plan.evals[i]);
  return vector_to_state(plan, Eigen::VectorXcd(plan.evecs * w), plan.box);
}

std::vector<Eigen::VectorXd> uniform_grid(int dim, int points_per_dim) {
  const double step = 2.0 * std::numbers::pi / points_per_dim;
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(dim, 0);
  while (true) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = idx[i] * step;
    grid.push_back(std::move(x));
    int i = dim - 1;
    for (; i >= 0; --i) {
      if (++idx[i] < points_per_dim) break;
      idx[i] = 0;
    }
    if (i < 0) break;
  }
  return grid;
}

namespace {

// Composite-Simpson sweep over [0, T]: calls visit(t, weight) with weights
// that already include the Δt/3 factor and the 1/T average.
template <typename Visit>
void simpson_time_average(double T, int panels_per_unit_time, Visit visit) {
  int panels = std::max(2, static_cast<int>(std::ceil(panels_per_unit_time * T)));
  if (panels % 2) ++panels;
  const double step = T / panels;
  const double base = step / (3.0 * T);
  for (int i = 0; i <= panels; ++i) {
    double w = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    visit(i * step, base * w);
  }
}

}  // namespace

Eigen::VectorXd time_averaged_density(const PropagatorPlan& plan, const FourierState& u0,
                                      double T, const std::vector<Eigen::VectorXd>& xgrid,
                                      int panels_per_unit_time) {
  const auto g = static_cast<Eigen::Index>(xgrid.size());
  Eigen::MatrixXcd synth(g, plan.size());
  const double norm = fourier_normalization(plan.dim);
  for (Eigen::Index row = 0; row < g; ++row)
    for (int col = 0; col < plan.size(); ++col)
      synth(row, col) = std::polar(1.0, plan.freqs.col(col).dot(xgrid[row])) / norm;
  Eigen::VectorXcd v0 = state_to_vector(plan, u0);
  Eigen::VectorXd density = Eigen::VectorXd::Zero(g);
  simpson_time_average(T, panels_per_unit_time, [&](double t, double w) {
    Eigen::VectorXcd vals = synth * propagate_vector(plan, v0, t);
    density += w * vals.cwiseAbs2();
  });
  return density;
}

ModeMap<Complex> time_averaged_density_modes(const PropagatorPlan& plan, const FourierState& u0,
                                             double T, const std::vector<Mode>& ks,
                                             int panels_per_unit_time) {
  // c_k(t) = (2π)^{-d} Σ_j v_{j+k}(t) conj(v_j(t)), accumulated over the
  // Simpson nodes; pair indices are resolved once up front.
  std::vector<std::vector<std::pair<int, int>>> pairs(ks.size());
  for (size_t a = 0; a < ks.size(); ++a) {
    RationalVector shift = rational_of_mode(ks[a]);
    for (int j = 0; j < plan.size(); ++j) {
      int jk = plan.find(RationalVector(plan.freqs_exact[j] + shift));
      if (jk >= 0) pairs[a].emplace_back(jk, j);
    }
  }
  Eigen::VectorXcd v0 = state_to_vector(plan, u0);
  std::vector<Complex> acc(ks.size(), 0.0);
  simpson_time_average(T, panels_per_unit_time, [&](double t, double w) {
    Eigen::VectorXcd v = propagate_vector(plan, v0, t);
    for (size_t a = 0; a < ks.size(); ++a) {
      Complex s = 0;
      for (const auto& [jk, j] : pairs[a]) s += v[jk] * std::conj(v[j]);
      acc[a] += w * s;
    }
  });
  const double cell = std::pow(2.0 * std::numbers::pi, plan.dim);
  ModeMap<Complex> out;
  for (size_t a = 0; a < ks.size(); ++a) out[ks[a]] = acc[a] / cell;
  return out;
}

}  // namespace twomicro
