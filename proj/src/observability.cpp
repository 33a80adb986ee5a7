#include "twomicro/observability.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace twomicro {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ∫_{lo}^{hi} e^{−ikx} dx for a single arc.
Complex arc_integral(int k, double lo, double hi) {
  if (k == 0) return hi - lo;
  const Complex ik(0.0, static_cast<double>(k));
  return (std::polar(1.0, -k * hi) - std::polar(1.0, -k * lo)) / (-ik);
}

}  // namespace

double ObservationSpec::measure() const {
  double total = 0;
  for (const auto& b : boxes) {
    double vol = 1;
    for (Eigen::Index i = 0; i < b.lo.size(); ++i) vol *= b.hi[i] - b.lo[i];
    total += vol;
  }
  return total;
}

Complex ObservationSpec::indicator_coeff(const Mode& k) const {
  Complex total = 0;
  for (const auto& b : boxes) {
    Complex prod = 1;
    for (int i = 0; i < dim; ++i) prod *= arc_integral(k[i], b.lo[i], b.hi[i]);
    total += prod;
  }
  return total / fourier_normalization(dim);
}

void ObservationSpec::validate() const {
  if (T <= 0) throw std::invalid_argument("ObservationSpec: horizon must be positive");
  if (boxes.empty()) throw std::invalid_argument("ObservationSpec: empty region");
  for (const auto& b : boxes) {
    if (b.lo.size() != dim || b.hi.size() != dim)
      throw std::invalid_argument("ObservationSpec: box dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (b.lo[i] < 0 || b.hi[i] > kTwoPi || !(b.lo[i] < b.hi[i]))
        throw std::invalid_argument("ObservationSpec: box escapes [0,2pi) or degenerates");
  }
  for (size_t a = 0; a < boxes.size(); ++a)
    for (size_t b = a + 1; b < boxes.size(); ++b) {
      bool disjoint = false;
      for (int i = 0; i < dim && !disjoint; ++i)
        if (std::max(boxes[a].lo[i], boxes[b].lo[i]) >=
            std::min(boxes[a].hi[i], boxes[b].hi[i]))
          disjoint = true;
      if (!disjoint) throw std::invalid_argument("ObservationSpec: boxes overlap");
    }
  double m = measure();
  if (!(m > 0) || m > std::pow(kTwoPi, dim) + 1e-12)
    throw std::invalid_argument("ObservationSpec: measure outside (0, (2pi)^d]");
}

ObservationSpec full_torus_spec(int dim, double T) {
  ObservationSpec spec;
  spec.dim = dim;
  spec.T = T;
  ArcBox b;
  b.lo = Eigen::VectorXd::Zero(dim);
  b.hi = Eigen::VectorXd::Constant(dim, kTwoPi);
  spec.boxes.push_back(std::move(b));
  return spec;
}

Complex phi_factor(double T, double delta) {
  if (delta == 0.0) return T;
  const Complex id(0.0, delta);
  return (std::polar(1.0, delta * T) - 1.0) / id;
}

namespace {

// Multiplication matrix of 1_ω on the mode box: M[j,k] = (2π)^{−d/2}(1_ω)^(j−k).
Eigen::MatrixXcd indicator_matrix(const ObservationSpec& spec, const std::vector<Mode>& modes) {
  const auto n = static_cast<Eigen::Index>(modes.size());
  Eigen::MatrixXcd M(n, n);
  const double norm = fourier_normalization(spec.dim);
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < n; ++r)
      M(r, c) = spec.indicator_coeff(Mode(modes[r] - modes[c])) / norm;
  return M;
}

}  // namespace

GramOperator gram(const ObservationSpec& spec, const Potential& V, int box_radius) {
  spec.validate();
  if (V.time_dependent())
    throw std::invalid_argument("gram: time-dependent potentials are not supported");
  GramOperator G;
  G.spec = spec;
  G.potential = V;
  G.box_radius = box_radius;
  G.modes = box_modes(spec.dim, box_radius);
  const auto n = static_cast<Eigen::Index>(G.modes.size());

  bool free = true;
  for (const auto& [k, c] : V.modes)
    if (c != Complex(0) && k.cwiseAbs().maxCoeff() > 0) free = false;

  if (free) {
    // Closed form (a constant potential only shifts phases that cancel).
    const double norm = fourier_normalization(spec.dim);
    G.matrix.resize(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
      for (Eigen::Index r = 0; r < n; ++r) {
        double delta = 0.5 * (G.modes[r].cast<double>().squaredNorm() -
                              G.modes[c].cast<double>().squaredNorm());
        G.matrix(r, c) =
            spec.indicator_coeff(Mode(G.modes[r] - G.modes[c])) / norm * phi_factor(spec.T, delta);
      }
    }
  } else {
    PropagatorPlan plan = make_plan_for_modes(V, G.modes);
    Eigen::MatrixXcd Mtilde =
        plan.evecs.adjoint() * indicator_matrix(spec, G.modes) * plan.evecs;
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        Mtilde(r, c) *= phi_factor(spec.T, plan.evals[r] - plan.evals[c]);
    G.matrix = plan.evecs * Mtilde * plan.evecs.adjoint();
  }
  // Symmetrize away the last bits of roundoff.
  G.matrix = 0.5 * (G.matrix + G.matrix.adjoint().eval());
  return G;
}

GramOperator gram_quadrature(const ObservationSpec& spec, const Potential& V, int box_radius,
                             int panels) {
  spec.validate();
  GramOperator G;
  G.spec = spec;
  G.potential = V;
  G.box_radius = box_radius;
  G.modes = box_modes(spec.dim, box_radius);
  const auto n = static_cast<Eigen::Index>(G.modes.size());

  PropagatorPlan plan = make_plan_for_modes(V, G.modes);
  Eigen::MatrixXcd M = indicator_matrix(spec, G.modes);
  if (panels % 2) ++panels;
  const double step = spec.T / panels;
  G.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i <= panels; ++i) {
    double w = (step / 3.0) * ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    Eigen::MatrixXcd U = propagator_matrix(plan, i * step);
    G.matrix += w * (U.adjoint() * M * U);
  }
  G.matrix = 0.5 * (G.matrix + G.matrix.adjoint().eval());
  return G;
}

std::pair<double, double> observability_constant(const GramOperator& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G.matrix);
  double lambda_min = es.eigenvalues().minCoeff();
  double C = (lambda_min <= 1e-12) ? std::numeric_limits<double>::infinity() : 1.0 / lambda_min;
  return {lambda_min, C};
}

double quotient(const FourierState& u0, const GramOperator& G) {
  double nn = u0.squared_norm();
  if (nn <= 0) throw std::invalid_argument("quotient: zero state");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(G.size());
  ModeMap<int> index;
  for (int i = 0; i < G.size(); ++i) index[G.modes[i]] = i;
  for (const auto& [k, c] : u0.coeff) {
    auto it = index.find(k);
    if (it == index.end())
      throw std::out_of_range("quotient: state support escapes the Gram box");
    v[it->second] = c;
  }
  Complex q = v.adjoint() * (G.matrix * v);
  return q.real() / nn;
}

BoundReport corollary_lower_bound_check(const std::vector<FourierState>& family,
                                        const GramOperator& G, double slack) {
  BoundReport report;
  report.lambda_min = observability_constant(G).first;
  report.min_gap = std::numeric_limits<double>::infinity();
  report.passed = true;
  for (const auto& u : family) {
    double q = quotient(u, G);
    report.quotients.push_back(q);
    double gap = q - report.lambda_min;
    report.min_gap = std::min(report.min_gap, gap);
    if (gap < -slack) report.passed = false;
  }
  return report;
}

}  // namespace twomicro
