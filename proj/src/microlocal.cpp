#include "twomicro/microlocal.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace twomicro {

namespace {

RationalVector rational_of_mode(const Mode& k) {
  RationalVector f(k.size());
  for (Eigen::Index i = 0; i < k.size(); ++i) f[i] = Rational(k[i]);
  return f;
}

RationalVector project(const RationalMatrix& P, const Mode& k) {
  const auto d = P.rows();
  RationalVector out(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Rational s = 0;
    for (Eigen::Index j = 0; j < d; ++j) s += P(i, j) * Rational(k[j]);
    out[i] = s;
  }
  return out;
}

std::optional<Mode> integer_difference(const RationalVector& a, const RationalVector& b) {
  Mode m(a.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    Rational d = a[i] - b[i];
    if (d.denominator() != 1) return std::nullopt;
    m[i] = d.numerator().convert_to<int>();
  }
  return m;
}

}  // namespace

CoveringSplit covering_split(const ModuleGeometry& geom, int box) {
  if (geom.module.rank() < 1)
    throw std::invalid_argument("covering_split: module must have rank >= 1");
  CoveringSplit split;
  split.geometry = geom;
  split.box = box;
  for (const auto& k : box_modes(geom.module.dim, box)) {
    RationalVector m = project(geom.projector, k);
    RationalVector sigma = rational_of_mode(k) - m;
    if (!exact_equal(RationalVector(sigma + m), rational_of_mode(k)))
      throw std::logic_error("covering_split: mode not recoverable from its split");
    split.mode_split[k] = {std::move(sigma), std::move(m)};
  }
  return split;
}

double lift_isometry_check(const FourierState& u, const CoveringSplit& split) {
  double mass = 0;
  for (const auto& [k, c] : u.coeff)
    if (split.mode_split.count(k)) mass += std::norm(c);
  return std::abs(mass - u.squared_norm());
}

double SigmaProxy::min_eigenvalue() const {
  if (matrix.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix);
  return es.eigenvalues().minCoeff();
}

SigmaProxy sigma_proxy(const FourierState& u, const ModuleGeometry& geom, double h,
                       const Cutoff& cutoff) {
  if (geom.module.rank() < 1)
    throw std::invalid_argument("sigma_proxy: module must have rank >= 1");
  SigmaProxy proxy;
  proxy.module = geom.module;
  proxy.h = h;
  proxy.cutoff = cutoff;

  // Group the state's modes by the transverse label σ; each group contributes
  // a rank-one Gram term over its Λ-side modes m.
  struct Entry {
    int m_index;
    Complex weighted;  // û(σ+m)·√χ(m/R)
  };
  std::map<std::string, int> m_index;
  std::map<std::string, std::vector<Entry>> groups;
  for (const auto& [k, c] : u.coeff) {
    RationalVector m = project(geom.projector, k);
    double w = cutoff.sqrt_chi(to_double(m));
    if (w == 0.0) continue;
    std::string mkey = frequency_key(m);
    auto [it, inserted] = m_index.try_emplace(mkey, static_cast<int>(proxy.modes.size()));
    if (inserted) proxy.modes.push_back(m);
    RationalVector sigma = rational_of_mode(k) - m;
    groups[frequency_key(sigma)].push_back({it->second, w * c});
  }

  const int n = proxy.size();
  proxy.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& [skey, entries] : groups)
    for (const auto& a : entries)
      for (const auto& b : entries)
        proxy.matrix(a.m_index, b.m_index) += a.weighted * std::conj(b.weighted);
  return proxy;
}

double nu_lambda(const Symbol& b, const SigmaProxy& proxy, const PropagatorPlan& avgplan,
                 double t) {
  const int n = avgplan.size();
  Eigen::MatrixXcd sigma = Eigen::MatrixXcd::Zero(n, n);
  std::vector<int> idx(proxy.size());
  for (int i = 0; i < proxy.size(); ++i) {
    idx[i] = avgplan.find(proxy.modes[i]);
    if (idx[i] < 0)
      throw std::invalid_argument("nu_lambda: proxy mode outside the averaged plan's box");
  }
  for (int i = 0; i < proxy.size(); ++i)
    for (int j = 0; j < proxy.size(); ++j) sigma(idx[i], idx[j]) = proxy.matrix(i, j);

  Eigen::MatrixXcd U = propagator_matrix(avgplan, t);
  Eigen::MatrixXcd evolved = U * sigma * U.adjoint();

  // (M_b)[r,c] = (2π)^{-d/2} b̂_{f_r - f_c}; only integer differences can
  // carry a mode of b.
  const double norm = fourier_normalization(avgplan.dim);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(avgplan.dim);
  Complex trace = 0;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      auto m = integer_difference(avgplan.freqs_exact[r], avgplan.freqs_exact[c]);
      if (!m) continue;
      auto it = b.modes.find(*m);
      if (it == b.modes.end()) continue;
      trace += it->second(zero, zero) / norm * evolved(c, r);
    }
  }
  return trace.real();
}

LimitSummary limit_extrapolate(const LimitTable& table) {
  const size_t nh = table.h_grid.size();
  const size_t nr = table.R_grid.size();
  if (nh < 3 || nr < 2)
    throw std::invalid_argument("limit_extrapolate: need >= 3 h-values and >= 2 R-values");
  for (size_t i = 1; i < nh; ++i)
    if (!(table.h_grid[i] < table.h_grid[i - 1]))
      throw std::invalid_argument("limit_extrapolate: h-grid must be strictly decreasing");
  for (size_t i = 1; i < nr; ++i)
    if (!(table.R_grid[i] > table.R_grid[i - 1]))
      throw std::invalid_argument("limit_extrapolate: R-grid must be strictly increasing");

  LimitSummary out;
  int decreasing = 0, increasing = 0;
  for (size_t r = 0; r < nr; ++r) {
    // Reduce the time axis to its worst case, then extrapolate in h.
    std::vector<double> v(nh);
    for (size_t hi = 0; hi < nh; ++hi) {
      double worst = table.values[r][hi].empty() ? 0.0 : table.values[r][hi][0];
      for (double x : table.values[r][hi]) worst = std::max(worst, x);
      v[hi] = worst;
    }
    double v1 = v[nh - 3], v2 = v[nh - 2], v3 = v[nh - 1];
    double d2 = v1 - 2 * v2 + v3;
    double scale = std::max({std::abs(v1), std::abs(v2), std::abs(v3), 1e-300});
    double est = (std::abs(d2) <= 1e-10 * scale) ? v3 : v3 - (v3 - v2) * (v3 - v2) / d2;
    out.per_R_estimate.push_back(est);
    out.per_R_last.push_back(v3);

    // Apparent order of the h-convergence, read off the residuals against the
    // extrapolated limit.
    double r2 = v2 - est, r3 = v3 - est;
    double slope = 0.0;
    if (r2 * r3 > 0)
      slope = std::log(std::abs(r2) / std::abs(r3)) /
              std::log(table.h_grid[nh - 2] / table.h_grid[nh - 1]);
    out.h_slopes.push_back(slope);

    if (v.back() < v.front()) ++decreasing;
    else if (v.back() > v.front()) ++increasing;
  }
  out.estimate = out.per_R_estimate.back();
  out.last_value = out.per_R_last.back();
  if (decreasing == static_cast<int>(nr)) out.verdict = "decreasing";
  else if (increasing == static_cast<int>(nr)) out.verdict = "increasing";
  else out.verdict = "mixed";
  return out;
}

LimitTable propagation_law_test(const std::vector<double>& h_grid, const FamilyEvolver& evolve,
                                const Potential& V, const ModuleGeometry& geom, const Symbol& b,
                                const std::vector<double>& R_grid,
                                const std::vector<double>& t_samples, int avg_box) {
  if (b.dim != geom.module.dim)
    throw std::invalid_argument("propagation_law_test: symbol/module dimension mismatch");
  Symbol bt = b;
  bt.module_tag = geom.module;
  PropagatorPlan avgplan = averaged_propagator(geom, V, avg_box);

  LimitTable table;
  table.h_grid = h_grid;
  table.R_grid = R_grid;
  table.t_samples = t_samples;
  table.values.assign(R_grid.size(),
                      std::vector<std::vector<double>>(
                          h_grid.size(), std::vector<double>(t_samples.size(), 0.0)));

  for (size_t hi = 0; hi < h_grid.size(); ++hi) {
    const double h = h_grid[hi];
    FourierState u0 = evolve(h, 0.0);
    std::vector<FourierState> ut;
    ut.reserve(t_samples.size());
    for (double t : t_samples) ut.push_back(evolve(h, t));
    for (size_t ri = 0; ri < R_grid.size(); ++ri) {
      Cutoff cutoff{R_grid[ri]};
      SigmaProxy proxy = sigma_proxy(u0, geom, h, cutoff);
      for (size_t ti = 0; ti < t_samples.size(); ++ti) {
        double lhs = twomicro_pair(ut[ti], bt, geom, h, cutoff, FilterSide::Inner).real();
        double rhs = nu_lambda(b, proxy, avgplan, t_samples[ti]);
        table.values[ri][hi][ti] = std::abs(lhs - rhs);
      }
    }
  }
  return table;
}

bool XiBox::contains(const Eigen::VectorXd& xi) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (xi[i] < lo[i] || xi[i] >= hi[i]) return false;
  return true;
}

bool XiBox::overlaps(const XiBox& o) const {
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (std::max(lo[i], o.lo[i]) >= std::min(hi[i], o.hi[i])) return false;
  return true;
}

std::vector<double> marginal_xi(const FourierState& u, double h, const std::vector<XiBox>& boxes) {
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j)
      if (boxes[i].overlaps(boxes[j]))
        throw std::invalid_argument("marginal_xi: boxes overlap");
  std::vector<double> histogram(boxes.size(), 0.0);
  for (const auto& [k, c] : u.coeff) {
    Eigen::VectorXd xi = h * k.cast<double>();
    for (size_t i = 0; i < boxes.size(); ++i) {
      if (boxes[i].contains(xi)) {
        histogram[i] += std::norm(c);
        break;
      }
    }
  }
  return histogram;
}

std::vector<ConditionalDensity> conditional_density(const PropagatorPlan& plan,
                                                    const FourierState& u0, double T, double h,
                                                    const std::vector<XiBox>& boxes,
                                                    const std::vector<Eigen::VectorXd>& xgrid,
                                                    int panels_per_unit_time,
                                                    double mass_threshold) {
  for (size_t i = 0; i < boxes.size(); ++i)
    for (size_t j = i + 1; j < boxes.size(); ++j)
      if (boxes[i].overlaps(boxes[j]))
        throw std::invalid_argument("conditional_density: boxes overlap");

  // Box membership is a fixed Fourier multiplier, resolved once per plan mode.
  std::vector<std::vector<int>> members(boxes.size());
  for (int c = 0; c < plan.size(); ++c) {
    Eigen::VectorXd xi = h * plan.freqs.col(c);
    for (size_t i = 0; i < boxes.size(); ++i)
      if (boxes[i].contains(xi)) members[i].push_back(c);
  }

  const auto g = static_cast<Eigen::Index>(xgrid.size());
  Eigen::MatrixXcd synth(g, plan.size());
  const double norm = fourier_normalization(plan.dim);
  for (Eigen::Index row = 0; row < g; ++row)
    for (int col = 0; col < plan.size(); ++col)
      synth(row, col) = std::polar(1.0, plan.freqs.col(col).dot(xgrid[row])) / norm;

  Eigen::VectorXcd v0 = state_to_vector(plan, u0);
  std::vector<Eigen::VectorXd> density(boxes.size(), Eigen::VectorXd::Zero(g));
  std::vector<double> mass(boxes.size(), 0.0);

  int panels = std::max(2, static_cast<int>(std::ceil(panels_per_unit_time * T)));
  if (panels % 2) ++panels;
  const double step = T / panels;
  const double base = step / (3.0 * T);
  for (int i = 0; i <= panels; ++i) {
    double w = base * ((i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0));
    Eigen::VectorXcd v = propagate_vector(plan, v0, i * step);
    for (size_t bi = 0; bi < boxes.size(); ++bi) {
      Eigen::VectorXcd filtered = Eigen::VectorXcd::Zero(plan.size());
      for (int c : members[bi]) filtered[c] = v[c];
      density[bi] += w * (synth * filtered).cwiseAbs2();
      mass[bi] += w * filtered.squaredNorm();
    }
  }

  std::vector<ConditionalDensity> out(boxes.size());
  for (size_t bi = 0; bi < boxes.size(); ++bi) {
    out[bi].mass = mass[bi];
    if (mass[bi] < mass_threshold) continue;
    out[bi].present = true;
    out[bi].density = density[bi] / mass[bi];
  }
  return out;
}

std::vector<double> default_h_grid() { return {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64}; }

FourierState plane_wave_ladder(const Eigen::VectorXd& xi0, double h) {
  Mode k(xi0.size());
  for (Eigen::Index i = 0; i < xi0.size(); ++i)
    k[i] = static_cast<int>(std::floor(xi0[i] / h));
  return plane_wave(static_cast<int>(xi0.size()), k);
}

FourierState tensor_state(const FourierState& u, const FourierState& v) {
  FourierState out;
  out.dim = u.dim + v.dim;
  out.box = std::max(u.box, v.box);
  for (const auto& [ku, cu] : u.coeff) {
    for (const auto& [kv, cv] : v.coeff) {
      Mode k(out.dim);
      k.head(u.dim) = ku;
      k.tail(v.dim) = kv;
      out.coeff[k] = cu * cv;
    }
  }
  return out;
}

FourierState transverse_profile_state(const ModeMap<Complex>& profile,
                                      const Eigen::VectorXd& xi0, double h) {
  const int d = static_cast<int>(xi0.size());
  Mode n(d);
  for (int i = 0; i < d; ++i) n[i] = static_cast<int>(std::floor(xi0[i] / h));
  FourierState u;
  u.dim = d;
  int box = 0;
  for (const auto& [m, c] : profile) {
    Mode k = m + n;
    u.coeff[k] = c;
    box = std::max(box, static_cast<int>(k.lpNorm<Eigen::Infinity>()));
  }
  u.box = box;
  u.normalize();
  return u;
}

FourierState gaussian_packet(const Eigen::VectorXd& x0, const Eigen::VectorXd& xi0, double h) {
  const int d = static_cast<int>(xi0.size());
  Mode center(d);
  for (int i = 0; i < d; ++i) center[i] = static_cast<int>(std::llround(xi0[i] / h));
  const int half_width = static_cast<int>(std::ceil(7.0 / std::sqrt(h)));
  FourierState u;
  u.dim = d;
  u.box = static_cast<int>(center.cwiseAbs().maxCoeff()) + half_width;
  for (const auto& offset : box_modes(d, half_width)) {
    Mode k = center + offset;
    Eigen::VectorXd dxi = h * k.cast<double>() - xi0;
    double amp = std::exp(-dxi.squaredNorm() / (4.0 * h));
    if (amp < 1e-300) continue;
    double phase = -k.cast<double>().dot(x0);
    u.coeff[k] = amp * std::polar(1.0, phase);
  }
  u.normalize();
  return u;
}

}  // namespace twomicro
