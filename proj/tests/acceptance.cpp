// Acceptance suite: twelve numbered end-to-end checks, one PASS/FAIL line
// each. The whole suite runs twice; check 12 compares the transcripts byte
// for byte. Exit status is the number of failed checks.

#include "twomicro/experiment.hpp"

#include <chrono>
#include <iostream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

using namespace twomicro;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

FourierState random_state(int dim, int box, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FourierState u;
  u.dim = dim;
  u.box = box;
  for (const auto& k : box_modes(dim, box)) u.coeff[k] = Complex(g(rng), g(rng));
  u.normalize();
  return u;
}

Symbol random_x_symbol(int dim, int mode_radius, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ModeMap<Complex> coeffs;
  for (const auto& m : box_modes(dim, mode_radius)) {
    Mode neg = -m;
    ModeLess less;
    if (less(neg, m)) continue;
    if (m.isZero()) {
      coeffs[m] = g(rng);
    } else {
      Complex c(g(rng), g(rng));
      coeffs[m] = c;
      coeffs[neg] = std::conj(c);
    }
  }
  return x_symbol(dim, coeffs);
}

ModuleGeometry line_geometry(int a, int b) {
  IntVector v(2);
  v << a, b;
  return geometry(saturate({v}, 2));
}

std::string num(double x) { return format_double(x); }

// ---------------------------------------------------------------------------
// 1. Marginal identity: for x-only observables the Wigner pairing is the
//    spatial integral of a against |u|^2, checked against periodic quadrature.
Outcome criterion1(std::ostream& tr) {
  std::mt19937_64 rng(101);
  const int n = 24;  // > twice the integrand bandwidth: the rule is exact
  const double step = 2.0 * kPi / n;
  std::vector<Eigen::VectorXd> grid;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd x(2);
      x << i * step, j * step;
      grid.push_back(x);
    }
  std::vector<Symbol> symbols;
  for (int s = 0; s < 10; ++s) symbols.push_back(random_x_symbol(2, 2, rng));
  std::vector<std::vector<double>> avals(symbols.size(), std::vector<double>(grid.size()));
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  for (size_t s = 0; s < symbols.size(); ++s)
    for (size_t g = 0; g < grid.size(); ++g)
      avals[s][g] = symbols[s].value_at(grid[g], zero2, zero2).real();

  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    FourierState u = random_state(2, 8, rng);
    std::vector<double> dens(grid.size());
    for (size_t g = 0; g < grid.size(); ++g) dens[g] = std::norm(u.value_at(grid[g]));
    for (size_t s = 0; s < symbols.size(); ++s) {
      double quad = 0;
      for (size_t g = 0; g < grid.size(); ++g) quad += avals[s][g] * dens[g];
      quad *= step * step;
      double w = wigner_pair(u, symbols[s], 0.25).real();
      worst = std::max(worst, std::abs(w - quad));
    }
  }
  tr << "c1 worst=" << num(worst) << '\n';
  return {worst <= 1e-10, "max |pairing - quadrature| = " + num(worst)};
}

// ---------------------------------------------------------------------------
// 2. Commutator identity: [-h^2 Delta/2, Op_h(a)] = (h/i) Op_h(xi . grad_x a),
//    exact for Weyl quantization on every matrix element.
Outcome criterion2(std::ostream& tr) {
  std::mt19937_64 rng(202);
  std::vector<std::pair<Symbol, int>> corpus;  // (symbol, box radius)
  auto fquad = [](const Eigen::VectorXd& xi) { return Complex(1.0 + xi.squaredNorm()); };
  corpus.emplace_back(cos_symbol(1, make_mode({1})), 8);
  corpus.emplace_back(cos_symbol(1, make_mode({2}), fquad), 8);
  corpus.emplace_back(x_mode_symbol(1, make_mode({3}), Complex(0.5, 0.25)), 8);
  corpus.emplace_back(xi_symbol(1, fquad), 8);
  corpus.emplace_back(constant_symbol(1, 2.0), 8);
  for (int s = 0; s < 5; ++s) corpus.emplace_back(random_x_symbol(1, 3, rng), 8);
  corpus.emplace_back(cos_symbol(2, make_mode({1, 0})), 8);
  corpus.emplace_back(cos_symbol(2, make_mode({1, 1}), fquad), 8);
  corpus.emplace_back(cos_symbol(2, make_mode({2, -1})), 8);
  corpus.emplace_back(x_mode_symbol(2, make_mode({0, 2}), Complex(1.0, -1.0)), 8);
  corpus.emplace_back(xi_symbol(2, fquad), 8);
  for (int s = 0; s < 5; ++s) corpus.emplace_back(random_x_symbol(2, 2, rng), 8);

  double worst = 0;
  for (const auto& [a, box] : corpus)
    for (double h : {0.5, 0.125}) worst = std::max(worst, commutator_defect(a, h, box));
  tr << "c2 worst=" << num(worst) << '\n';
  return {worst <= 1e-10, "max commutator defect over " + std::to_string(corpus.size()) +
                              " symbols = " + num(worst)};
}

// ---------------------------------------------------------------------------
// 3. Two-microlocal decomposition: inner + outer filtered pairings reassemble
//    the unfiltered one for every (h, R) on the default grids.
Outcome criterion3(std::ostream& tr) {
  std::mt19937_64 rng(303);
  std::vector<ModuleGeometry> geoms = {line_geometry(1, 0), line_geometry(1, 1),
                                       geometry(full_module(2))};
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    FourierState u = random_state(2, 4, rng);
    for (const auto& geom : geoms) {
      Symbol a = cos_symbol(2, make_mode({1, 0}));
      a.module_tag = geom.module;
      for (double h : default_h_grid())
        for (double R : {1.0, 2.0, 4.0, 8.0}) {
          Complex uncut = wigner_pair(u, a, h);
          Complex in = twomicro_pair(u, a, geom, h, Cutoff{R}, FilterSide::Inner);
          Complex out = twomicro_pair(u, a, geom, h, Cutoff{R}, FilterSide::Outer);
          worst = std::max(worst, std::abs(in + out - uncut));
        }
    }
  }
  tr << "c3 worst=" << num(worst) << '\n';
  return {worst <= 1e-12, "max splitting defect = " + num(worst)};
}

// ---------------------------------------------------------------------------
// 4. Partition of frequencies: classification of 1000 random rational xi
//    against brute-force stabilizer search over the |k|_inf <= 20 box.
Outcome criterion4(std::ostream& tr) {
  std::mt19937_64 rng(404);
  int failures = 0;
  long long total_hits = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int d = (trial % 2 == 0) ? 2 : 3;
    RationalVector xi(d);
    long long denom_lcm = 1;
    for (int i = 0; i < d; ++i) {
      long long p = static_cast<long long>(rng() % 11) - 5;
      long long q = static_cast<long long>(rng() % 6) + 1;
      xi[i] = Rational(Int(p), Int(q));
      denom_lcm = std::lcm(denom_lcm, q);
    }
    // Integer vector w with k . xi = 0  <=>  k . w = 0.
    std::vector<long long> w(d);
    for (int i = 0; i < d; ++i)
      w[i] = static_cast<long long>(xi[i].numerator()) *
             (denom_lcm / static_cast<long long>(xi[i].denominator()));

    PrimitiveModule mod = classify(xi);
    bool ok = (mod == stabilizer(xi)) && (resonance_order(xi) == d - mod.rank());

    // Every canonical generator annihilates xi ...
    std::set<std::vector<long long>> basis_cols;
    for (Eigen::Index c = 0; c < mod.basis.cols() && ok; ++c) {
      long long dot = 0;
      std::vector<long long> col(d);
      for (int r = 0; r < d; ++r) {
        col[r] = mod.basis(r, c).convert_to<long long>();
        dot += col[r] * w[r];
      }
      if (dot != 0) ok = false;
      basis_cols.insert(col);
    }

    // ... and the brute-force box search agrees with integer membership.
    std::vector<int> k(d, -20);
    long long hits = 0;
    int sampled = 0;
    while (ok) {
      long long dot = 0;
      for (int i = 0; i < d; ++i) dot += static_cast<long long>(k[i]) * w[i];
      if (dot == 0) {
        ++hits;
        if (hits % 37 == 1 && sampled < 40) {
          ++sampled;
          IntVector kk(d);
          for (int i = 0; i < d; ++i) kk[i] = k[i];
          if (!mode_in(kk, mod)) ok = false;
        }
        std::vector<long long> kl(k.begin(), k.end());
        basis_cols.erase(kl);  // generators inside the box must be found
      }
      int i = d - 1;
      for (; i >= 0; --i) {
        if (++k[i] <= 20) break;
        k[i] = -20;
      }
      if (i < 0) break;
    }
    for (const auto& col : basis_cols) {
      bool inside = true;
      for (long long x : col) inside &= std::llabs(x) <= 20;
      if (inside) ok = false;  // a generator in the box escaped brute force
    }
    total_hits += hits;
    if (!ok) ++failures;
  }
  tr << "c4 failures=" << failures << " hits=" << total_hits << '\n';
  return {failures == 0, std::to_string(failures) + " of 1000 frequencies disagreed (" +
                             std::to_string(total_hits) + " brute-force resonances checked)"};
}

// ---------------------------------------------------------------------------
// 5. Covering isometry: the (sigma, m) relabeling preserves mass exactly,
//    including degree-2 coverings (the diagonal module).
Outcome criterion5(std::ostream& tr) {
  std::mt19937_64 rng(505);
  std::vector<ModuleGeometry> geoms = {line_geometry(1, 0), line_geometry(0, 1),
                                       line_geometry(1, 1), line_geometry(1, 2)};
  double worst = 0;
  for (const auto& geom : geoms) {
    CoveringSplit split = covering_split(geom, 5);
    for (int trial = 0; trial < 25; ++trial)
      worst = std::max(worst, lift_isometry_check(random_state(2, 5, rng), split));
  }
  tr << "c5 worst=" << num(worst) << '\n';
  return {worst <= 1e-12, "max isometry defect over 100 states = " + num(worst)};
}

// ---------------------------------------------------------------------------
// 6. Exact free Egorov: with V = 0, U(t)* Op_h(a) U(t) = Op_h(a o phi_{t/h}).
Outcome criterion6(std::ostream& tr) {
  auto fquad = [](const Eigen::VectorXd& xi) { return Complex(1.0 + xi.squaredNorm()); };
  double worst = 0;
  for (int d : {1, 2}) {
    const int box = (d == 1) ? 8 : 6;
    auto modes = box_modes(d, box);
    PropagatorPlan plan = make_plan_for_modes(zero_potential(d), modes);
    std::vector<Symbol> symbols;
    if (d == 1) {
      symbols.push_back(cos_symbol(1, make_mode({1}), fquad));
      symbols.push_back(cos_symbol(1, make_mode({2})));
      symbols.push_back(xi_symbol(1, fquad));
    } else {
      symbols.push_back(cos_symbol(2, make_mode({1, 0}), fquad));
      symbols.push_back(cos_symbol(2, make_mode({1, 1})));
      symbols.push_back(xi_symbol(2, fquad));
    }
    for (const auto& a : symbols)
      for (double h : {0.25, 0.125})
        for (double t : {0.1, 1.0, kPi}) {
          Eigen::MatrixXcd U = propagator_matrix(plan, t);
          Eigen::MatrixXcd lhs = U.adjoint() * operator_matrix(a, h, modes) * U;
          Eigen::MatrixXcd rhs = operator_matrix(flow_symbol(a, t / h), h, modes);
          worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
  }
  tr << "c6 worst=" << num(worst) << '\n';
  return {worst <= 1e-10, "max conjugation defect = " + num(worst)};
}

// ---------------------------------------------------------------------------
// Shared concentrating family for checks 7, 8 and 11: f(x1) e^{i n_h x2} with
// h n_h -> 1 under V = 2cos x1 + 3cos x2. The dynamics separates exactly, so
// u(t) is assembled from two 1d problems (Galerkin window W keeps the
// truncation error far below every tolerance used here).
struct SeparableFamily {
  static constexpr int W = 30;
  Potential V;
  PropagatorPlan plan1;
  FourierState f1;

  SeparableFamily() {
    V = zero_potential(2);
    add_cos_mode(V, make_mode({1, 0}), 2.0);
    add_cos_mode(V, make_mode({0, 1}), 3.0);
    Potential V1 = zero_potential(1);
    add_cos_mode(V1, make_mode({1}), 2.0);
    plan1 = make_plan(V1, W);
    f1.dim = 1;
    f1.box = 1;
    f1.set(make_mode({0}), 1.0);
    f1.set(make_mode({1}), 0.5);
    f1.set(make_mode({-1}), 0.5);
    f1.normalize();
  }

  PropagatorPlan transverse_plan(double h) const {
    int nh = static_cast<int>(std::floor(1.0 / h));
    Potential V2 = zero_potential(1);
    add_cos_mode(V2, make_mode({1}), 3.0);
    std::vector<Mode> modes2;
    for (int k = nh - W; k <= nh + W; ++k) modes2.push_back(make_mode({k}));
    return make_plan_for_modes(V2, modes2);
  }

  FourierState evolve(double h, double t) const {
    int nh = static_cast<int>(std::floor(1.0 / h));
    PropagatorPlan plan2 = transverse_plan(h);
    FourierState u2 = propagate(plan2, plane_wave(1, make_mode({nh})), t);
    FourierState u1 = propagate(plan1, f1, t);
    return tensor_state(u1, u2);
  }
};

// 7. Propagation law: sigma_Lambda transported by the averaged flow matches
//    the filtered pairing of the true evolution as h -> 0 then R -> infinity.
Outcome criterion7(std::ostream& tr) {
  SeparableFamily fam;
  auto geom = line_geometry(1, 0);
  auto evolve = [&](double h, double t) { return fam.evolve(h, t); };
  std::vector<double> h_grid = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> R_grid = {2.0, 10.0, 40.0};
  std::vector<double> t_samples = {0.5, 1.0, 2.0};

  std::vector<Symbol> bs = {constant_symbol(2, 1.0), cos_symbol(2, make_mode({1, 0})),
                            cos_symbol(2, make_mode({2, 0}))};
  bool richardson_ok = true, decrease_ok = true;
  std::ostringstream detail;
  for (size_t bi = 0; bi < bs.size(); ++bi) {
    LimitTable table = propagation_law_test(h_grid, evolve, fam.V, geom, bs[bi], R_grid,
                                            t_samples, SeparableFamily::W + 5);
    LimitSummary summary = limit_extrapolate(table);
    auto max_over_Rt = [&](size_t hi) {
      double m = 0;
      for (const auto& per_h : table.values)
        for (double v : per_h[hi]) m = std::max(m, v);
      return m;
    };
    double dev_coarse = max_over_Rt(0);                     // h = 1/8
    double dev_fine = max_over_Rt(h_grid.size() - 1);       // h = 1/64
    richardson_ok &= std::abs(summary.estimate) <= 1e-2;    // signal scale is O(1)
    decrease_ok &= dev_fine < dev_coarse;
    tr << "c7 b" << bi << " coarse=" << num(dev_coarse) << " fine=" << num(dev_fine)
       << " richardson=" << num(summary.estimate) << " verdict=" << summary.verdict << '\n';
    detail << (bi ? "; " : "") << "b" << bi << ": dev(1/8)=" << num(dev_coarse)
           << " dev(1/64)=" << num(dev_fine) << " richardson=" << num(summary.estimate);
  }
  std::string msg = detail.str();
  if (!decrease_ok)
    msg += " -- deviation is h-independent for this exactly separable family (the filter"
           " argument and the longitudinal dynamics are h-free), so the strict h-decrease"
           " clause cannot hold; the large-R deviation itself is at roundoff";
  return {richardson_ok && decrease_ok, msg};
}

// ---------------------------------------------------------------------------
// 8. Marginal constancy: the xi-histogram of the same family varies less in
//    time at h = 1/64 than at h = 1/8.
Outcome criterion8(std::ostream& tr) {
  SeparableFamily fam;
  std::vector<XiBox> boxes;
  for (double lo1 = -2.25; lo1 < 2.7; lo1 += 0.5)
    for (double lo2 = -2.25; lo2 < 2.7; lo2 += 0.5) {
      XiBox b;
      b.lo = Eigen::VectorXd(2);
      b.hi = Eigen::VectorXd(2);
      b.lo << lo1, lo2;
      b.hi << lo1 + 0.5, lo2 + 0.5;
      boxes.push_back(std::move(b));
    }
  std::vector<double> t_samples = {0.0, 0.5, 1.0, 1.5, 2.0};
  auto variation = [&](double h) {
    std::vector<double> base;
    double var = 0;
    for (size_t ti = 0; ti < t_samples.size(); ++ti) {
      auto hist = marginal_xi(fam.evolve(h, t_samples[ti]), h, boxes);
      if (ti == 0) base = hist;
      double dist = 0;
      for (size_t i = 0; i < hist.size(); ++i) dist += std::abs(hist[i] - base[i]);
      var = std::max(var, dist);
    }
    return var;
  };
  double coarse = variation(1.0 / 8), fine = variation(1.0 / 64);
  tr << "c8 coarse=" << num(coarse) << " fine=" << num(fine) << '\n';
  return {fine < coarse,
          "t-variation " + num(coarse) + " at h=1/8 vs " + num(fine) + " at h=1/64"};
}

// ---------------------------------------------------------------------------
// 9. Observability: omega = (0, pi/2), T = 1, V in {0, 2cos x}. lambda_min
//    stays positive with no collapse across N, the closed-form Gram matches
//    quadrature, and first-run values are regression-pinned.
Outcome criterion9(std::ostream& tr) {
  ObservationSpec spec;
  spec.dim = 1;
  spec.T = 1.0;
  ArcBox arc;
  arc.lo = Eigen::VectorXd::Constant(1, 0.0);
  arc.hi = Eigen::VectorXd::Constant(1, kPi / 2);
  spec.boxes.push_back(arc);

  Potential V0 = zero_potential(1);
  Potential V1 = zero_potential(1);
  add_cos_mode(V1, make_mode({1}), 2.0);
  // First-run values, pinned.
  const std::vector<std::vector<double>> pins = {
      {6.9289823412026707e-05, 2.8596436308771422e-05, 2.8168254661274946e-05,
       2.8165771814685174e-05},
      {2.7434802401437532e-05, 1.2317280025595987e-05, 1.2181292048738069e-05,
       1.2179879160455892e-05}};
  const std::vector<int> Ns = {4, 8, 16, 32};

  bool positive = true, pinned = true, quad_ok = true, no_collapse = true;
  std::ostringstream detail;
  const std::vector<const Potential*> Vs = {&V0, &V1};
  for (size_t vi = 0; vi < Vs.size(); ++vi) {
    double first = 0, smallest = 0;
    for (size_t ni = 0; ni < Ns.size(); ++ni) {
      auto [lmin, C] = observability_constant(gram(spec, *Vs[vi], Ns[ni]));
      tr << "c9 V" << vi << " N=" << Ns[ni] << " lmin=" << num(lmin) << '\n';
      positive &= lmin > 0;
      pinned &= std::abs(lmin - pins[vi][ni]) <= 1e-9 * pins[vi][ni];
      if (ni == 0) first = smallest = lmin;
      smallest = std::min(smallest, lmin);
    }
    no_collapse &= smallest >= 0.5 * first;
    GramOperator closed = gram(spec, *Vs[vi], 8);
    GramOperator quad = gram_quadrature(spec, *Vs[vi], 8, 20000);
    double gram_dev = (closed.matrix - quad.matrix).cwiseAbs().maxCoeff();
    quad_ok &= gram_dev <= 1e-6;
    detail << (vi ? "; " : "") << "V" << vi << ": ratio min/first=" << num(smallest / first)
           << " gram-vs-quadrature=" << num(gram_dev);
  }
  std::string msg = detail.str();
  if (!no_collapse)
    msg += " -- lambda_min is positive and plateaus for N>=8, but at T=1 the N=4 box cannot"
           " yet resolve the true minimizer, so the 0.5x no-collapse ratio against N=4 fails"
           " (0.41 and 0.44 measured)";
  return {positive && pinned && quad_ok && no_collapse, msg};
}

// ---------------------------------------------------------------------------
// 10. Sigma-proxy positivity and trace budget over the random corpus.
Outcome criterion10(std::ostream& tr) {
  std::mt19937_64 rng(1010);
  std::vector<ModuleGeometry> geoms = {line_geometry(1, 0), line_geometry(1, 1)};
  double min_eig = 0, worst_excess = -1;
  for (int trial = 0; trial < 30; ++trial) {
    FourierState u = random_state(2, 5, rng);
    for (const auto& geom : geoms)
      for (double h : {0.125, 1.0 / 32})
        for (double R : {1.0, 3.0}) {
          SigmaProxy proxy = sigma_proxy(u, geom, h, Cutoff{R});
          min_eig = std::min(min_eig, proxy.min_eigenvalue());
          worst_excess = std::max(worst_excess, proxy.trace() - u.squared_norm());
        }
  }
  tr << "c10 min_eig=" << num(min_eig) << " excess=" << num(worst_excess) << '\n';
  return {min_eig >= -1e-10 && worst_excess <= 1e-10,
          "min eigenvalue = " + num(min_eig) + ", max trace excess = " + num(worst_excess)};
}

// ---------------------------------------------------------------------------
// 11. Absolute continuity: plane-wave pairs time-average to the flat density
//     at T = 4pi, and the concentrating family's density modes stay bounded.
Outcome criterion11(std::ostream& tr) {
  const double T = 4 * kPi;
  double worst_flat = 0;
  {
    PropagatorPlan plan = make_plan(zero_potential(1), 4);
    auto xgrid = uniform_grid(1, 64);
    const std::vector<std::pair<int, int>> pairs = {{1, 2}, {0, 3}, {2, -3}};
    for (auto [a, b] : pairs) {
      FourierState u;
      u.dim = 1;
      u.box = 4;
      u.set(make_mode({a}), 1.0);
      u.set(make_mode({b}), 1.0);
      u.normalize();
      Eigen::VectorXd rho = time_averaged_density(plan, u, T, xgrid);
      worst_flat = std::max(worst_flat,
                            (rho.array() - 1.0 / (2 * kPi)).abs().maxCoeff());
    }
  }
  tr << "c11 flat=" << num(worst_flat) << '\n';

  // Concentrating family: time-averaged density modes via exact separability,
  // rho_hat_(k1,k2)(t) = rho1_hat_k1(t) * rho2_hat_k2(t), Simpson in time.
  SeparableFamily fam;
  const std::vector<Mode> ks = {make_mode({1, 0}), make_mode({2, 0}), make_mode({0, 1}),
                                make_mode({1, 1})};
  auto density_modes = [&](double h) {
    PropagatorPlan plan2 = fam.transverse_plan(h);
    int nh = static_cast<int>(std::floor(1.0 / h));
    FourierState g0 = plane_wave(1, make_mode({nh}));
    const int panels = 3142;  // even, ~250 per unit time
    const double dt = T / panels;
    std::vector<Complex> acc(ks.size(), 0.0);
    auto correlation = [](const FourierState& u, int shift) {
      Complex s = 0;
      Mode probe(1);
      for (const auto& [j, c] : u.coeff) {
        probe[0] = j[0] + shift;
        auto it = u.coeff.find(probe);
        if (it != u.coeff.end()) s += it->second * std::conj(c);
      }
      return s;
    };
    for (int node = 0; node <= panels; ++node) {
      double t = node * dt;
      double wgt = (node == 0 || node == panels) ? 1.0 : (node % 2 ? 4.0 : 2.0);
      FourierState u1 = propagate(fam.plan1, fam.f1, t);
      FourierState u2 = propagate(plan2, g0, t);
      for (size_t i = 0; i < ks.size(); ++i)
        acc[i] += wgt * correlation(u1, ks[i][0]) * correlation(u2, ks[i][1]);
    }
    std::vector<double> out(ks.size());
    for (size_t i = 0; i < ks.size(); ++i) out[i] = std::abs(acc[i] * (dt / 3.0) / T);
    return out;
  };
  std::vector<double> reference = density_modes(1.0 / 8);
  bool bounded = true;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    auto current = density_modes(h);
    for (size_t i = 0; i < ks.size(); ++i) {
      tr << "c11 h=" << num(h) << " |rho_k" << i << "|=" << num(current[i]) << '\n';
      bounded &= current[i] <= reference[i] + 1e-9;
    }
  }
  std::ostringstream detail;
  detail << "pair-density flatness " << num(worst_flat) << "; reference |rho_k| =";
  for (double r : reference) detail << ' ' << num(r);
  detail << (bounded ? "; all finer-h modes bounded" : "; a finer-h mode exceeded the bound");
  return {worst_flat <= 1e-6 && bounded, detail.str()};
}

struct SuiteRun {
  std::vector<Outcome> outcomes;
  std::string transcript;
};

SuiteRun run_suite() {
  SuiteRun run;
  std::ostringstream tr;
  run.outcomes.push_back(criterion1(tr));
  run.outcomes.push_back(criterion2(tr));
  run.outcomes.push_back(criterion3(tr));
  run.outcomes.push_back(criterion4(tr));
  run.outcomes.push_back(criterion5(tr));
  run.outcomes.push_back(criterion6(tr));
  run.outcomes.push_back(criterion7(tr));
  run.outcomes.push_back(criterion8(tr));
  run.outcomes.push_back(criterion9(tr));
  run.outcomes.push_back(criterion10(tr));
  run.outcomes.push_back(criterion11(tr));
  run.transcript = tr.str();
  return run;
}

const char* kNames[] = {
    "marginal identity (pairing vs quadrature)",
    "commutator identity",
    "two-microlocal decomposition",
    "partition of frequencies vs brute force",
    "covering isometry",
    "exact free Egorov",
    "propagation law (h-limit then R-limit)",
    "marginal constancy in time",
    "observability constants (T = 1)",
    "sigma-proxy positivity and trace budget",
    "absolute-continuity diagnostic",
    "determinism (byte-identical reruns)",
};

}  // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  SuiteRun first = run_suite();
  SuiteRun second = run_suite();

  std::vector<Outcome> all = first.outcomes;
  bool identical = first.transcript == second.transcript;
  all.push_back({identical, identical ? "transcripts match byte for byte"
                                      : "transcripts differ between runs"});

  int failures = 0;
  for (size_t i = 0; i < all.size(); ++i) {
    std::cout << (all[i].pass ? "[PASS]" : "[FAIL]") << " criterion " << (i + 1) << ": "
              << kNames[i] << " -- " << all[i].detail << '\n';
    if (!all[i].pass) ++failures;
  }
  auto dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << failures << " of 12 criteria failed; total runtime "
            << format_double(dt) << " s\n";
  return failures;
}
