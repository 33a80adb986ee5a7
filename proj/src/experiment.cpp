#include "twomicro/experiment.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace twomicro {

namespace {

std::string join(const std::vector<std::string>& msgs) {
  std::string all;
  for (const auto& m : msgs) {
    if (!all.empty()) all += "; ";
    all += m;
  }
  return all;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> msgs)
    : std::runtime_error("invalid experiment: " + join(msgs)), messages(std::move(msgs)) {}

ExperimentSpec parse_experiment(const Json& config) {
  ExperimentSpec spec;
  spec.kind = config.value("kind", "");
  spec.config = config;
  return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open spec file: " + file.string());
  Json config = Json::parse(in);
  return parse_experiment(config);
}

std::string spec_hash(const ExperimentSpec& spec) {
  const std::string canon = spec.config.dump();
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : canon) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

namespace {

const std::set<std::string> kKinds = {"classify",  "evolve",   "wigner",
                                      "twomicro",  "sigma-propagation", "marginal",
                                      "disintegration", "observability"};

const std::set<std::string> kFamilies = {"plane_wave", "ladder", "transverse_profile",
                                         "gaussian", "random", "modes"};

Mode mode_from_json(const Json& j, int dim) {
  if (j.size() != static_cast<size_t>(dim))
    throw std::invalid_argument("mode length != dim");
  Mode k(dim);
  for (int i = 0; i < dim; ++i) k[i] = j[i].get<int>();
  return k;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::vector<double> grid_from_json(const Json& j) {
  std::vector<double> g;
  for (const auto& x : j) g.push_back(x.get<double>());
  return g;
}

void check_grid(const Json& config, const char* field, bool decreasing,
                std::vector<std::string>& errors) {
  if (!config.contains(field)) {
    errors.push_back(std::string(field) + ": missing");
    return;
  }
  auto g = grid_from_json(config.at(field));
  if (g.empty()) errors.push_back(std::string(field) + ": empty");
  for (size_t i = 1; i < g.size(); ++i) {
    bool ok = decreasing ? g[i] < g[i - 1] : g[i] > g[i - 1];
    if (!ok) {
      errors.push_back(std::string(field) + ": must be strictly " +
                       (decreasing ? "decreasing" : "increasing"));
      break;
    }
  }
}

void check_module(const Json& config, std::vector<std::string>& errors) {
  if (!config.contains("module")) {
    errors.push_back("module: missing");
    return;
  }
  try {
    const Json& mj = config.at("module");
    const int dim = mj.at("dim").get<int>();
    const auto& basis = mj.at("basis");
    IntMatrix B(dim, static_cast<Eigen::Index>(basis.size()));
    for (size_t c = 0; c < basis.size(); ++c)
      for (int r = 0; r < dim; ++r)
        B(r, static_cast<Eigen::Index>(c)) = basis[c][r].get<long long>();
    PrimitiveModule sat = saturate(B);
    if (!exact_equal(sat.basis, column_hnf(B)))
      errors.push_back("module: generators are not saturated; saturation is " +
                       module_to_json(sat).dump());
  } catch (const std::exception& e) {
    errors.push_back(std::string("module: ") + e.what());
  }
}

void check_family(const Json& config, std::vector<std::string>& errors) {
  if (!config.contains("family")) {
    errors.push_back("family: missing");
    return;
  }
  const Json& f = config.at("family");
  std::string name = f.value("name", "");
  if (!kFamilies.count(name)) {
    errors.push_back("family.name: unknown '" + name + "'");
    return;
  }
  if (name == "random" && !f.contains("seed"))
    errors.push_back("family.seed: mandatory for randomized families");
}

void check_potential(const Json& config, std::vector<std::string>& errors) {
  if (!config.contains("potential")) return;  // defaults to zero
  try {
    Potential V = potential_from_json(config.at("potential"));
    if (V.dim > 0 && !V.hermitian()) errors.push_back("potential: not Hermitian (V not real)");
  } catch (const std::exception& e) {
    errors.push_back(std::string("potential: ") + e.what());
  }
}

Potential potential_or_zero(const Json& config, int dim) {
  if (!config.contains("potential")) return zero_potential(dim);
  Potential V = potential_from_json(config.at("potential"));
  if (V.dim == 0) V.dim = dim;
  if (V.dim != dim) throw std::invalid_argument("potential dimension mismatch");
  return V;
}

// Mode set: the state's support dilated by `margin` in the sup norm.
std::vector<Mode> dilated_support(const FourierState& u, int margin) {
  std::set<Mode, ModeLess> out;
  for (const auto& [k, c] : u.coeff)
    for (const auto& o : box_modes(u.dim, margin)) out.insert(Mode(k + o));
  return {out.begin(), out.end()};
}

// Comma-free cell encodings for the classify CSV.
std::string xi_cell(const RationalVector& xi) {
  std::string out;
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    if (i) out += ';';
    out += format_rational(xi[i]);
  }
  return out;
}

std::string basis_cell(const PrimitiveModule& mod) {
  if (mod.rank() == 0) return "{}";
  std::string out;
  for (Eigen::Index col = 0; col < mod.basis.cols(); ++col) {
    if (col) out += '|';
    for (Eigen::Index r = 0; r < mod.basis.rows(); ++r) {
      if (r) out += ' ';
      out += mod.basis(r, col).str();
    }
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& dir, const std::string& name,
                          RunRecord& record) {
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  record.outputs.push_back(path);
  return os;
}

}  // namespace

std::vector<std::string> validate_experiment(const ExperimentSpec& spec) {
  std::vector<std::string> errors;
  const Json& c = spec.config;
  if (!kKinds.count(spec.kind)) {
    errors.push_back("kind: unknown '" + spec.kind + "'");
    return errors;
  }
  if (spec.kind != "classify" && !c.contains("dim")) errors.push_back("dim: missing");

  if (spec.kind == "classify") {
    if (!c.contains("xi")) errors.push_back("xi: missing");
  } else if (spec.kind == "evolve") {
    check_family(c, errors);
    check_potential(c, errors);
    if (!c.contains("box")) errors.push_back("box: missing");
    if (!c.contains("t_samples")) errors.push_back("t_samples: missing");
  } else if (spec.kind == "wigner") {
    check_family(c, errors);
    if (!c.contains("symbol")) errors.push_back("symbol: missing");
    check_grid(c, "h_grid", /*decreasing=*/true, errors);
  } else if (spec.kind == "twomicro") {
    check_family(c, errors);
    check_module(c, errors);
    if (!c.contains("symbol")) errors.push_back("symbol: missing");
    check_grid(c, "h_grid", true, errors);
    check_grid(c, "R_grid", false, errors);
  } else if (spec.kind == "sigma-propagation") {
    check_family(c, errors);
    check_module(c, errors);
    check_potential(c, errors);
    if (!c.contains("symbol")) errors.push_back("symbol: missing");
    check_grid(c, "h_grid", true, errors);
    check_grid(c, "R_grid", false, errors);
    if (!c.contains("t_samples")) errors.push_back("t_samples: missing");
  } else if (spec.kind == "marginal") {
    check_family(c, errors);
    check_potential(c, errors);
    check_grid(c, "h_grid", true, errors);
    if (!c.contains("t_samples")) errors.push_back("t_samples: missing");
    if (!c.contains("boxes")) errors.push_back("boxes: missing");
  } else if (spec.kind == "disintegration") {
    check_family(c, errors);
    check_potential(c, errors);
    if (!c.contains("box")) errors.push_back("box: missing");
    if (!c.contains("h")) errors.push_back("h: missing");
    if (!c.contains("T")) errors.push_back("T: missing");
    if (!c.contains("boxes")) errors.push_back("boxes: missing");
  } else if (spec.kind == "observability") {
    if (!c.contains("observation")) errors.push_back("observation: missing");
    if (!c.contains("N_grid")) errors.push_back("N_grid: missing");
    check_potential(c, errors);
    if (c.contains("observation")) {
      try {
        observation_from_json(c.at("observation")).validate();
      } catch (const std::exception& e) {
        errors.push_back(std::string("observation: ") + e.what());
      }
    }
  }
  return errors;
}

FourierState family_state(const Json& family, int dim, double h) {
  const std::string name = family.at("name").get<std::string>();
  if (name == "plane_wave") return plane_wave(dim, mode_from_json(family.at("k"), dim));
  if (name == "ladder") return plane_wave_ladder(vector_from_json(family.at("xi0")), h);
  if (name == "transverse_profile") {
    ModeMap<Complex> profile;
    for (const auto& entry : family.at("profile"))
      profile[mode_from_json(entry.at("k"), dim)] =
          Complex(entry.at("re").get<double>(), entry.value("im", 0.0));
    return transverse_profile_state(profile, vector_from_json(family.at("xi0")), h);
  }
  if (name == "gaussian")
    return gaussian_packet(vector_from_json(family.at("x0")),
                           vector_from_json(family.at("xi0")), h);
  if (name == "random") {
    std::mt19937_64 rng(family.at("seed").get<std::uint64_t>());
    std::normal_distribution<double> g;
    const int box = family.at("box").get<int>();
    FourierState u;
    u.dim = dim;
    u.box = box;
    for (const auto& k : box_modes(dim, box)) u.coeff[k] = Complex(g(rng), g(rng));
    u.normalize();
    return u;
  }
  if (name == "modes") {
    FourierState u;
    u.dim = dim;
    for (const auto& entry : family.at("modes")) {
      Mode k = mode_from_json(entry.at("k"), dim);
      u.coeff[k] = Complex(entry.at("re").get<double>(), entry.value("im", 0.0));
      u.box = std::max(u.box, static_cast<int>(k.lpNorm<Eigen::Infinity>()));
    }
    u.normalize();
    return u;
  }
  throw std::invalid_argument("family: unknown name '" + name + "'");
}

namespace {

void run_classify(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const Json& xij = c.at("xi");
  const int dim = static_cast<int>(xij.size());
  bool exact = true;
  for (const auto& entry : xij)
    if (!entry.is_string()) exact = false;

  RationalVector xi;
  bool resonant = true;
  if (exact) {
    xi = rational_vector_from_json(xij);
  } else {
    SnapReport snap = snap_frequency(vector_from_json(xij), c.value("max_den", 1000000L));
    xi = snap.value;
    resonant = snap.resonant;
  }

  auto os = open_output(dir, "classify.csv", record);
  os << "xi,basis,rank,covering_degree,resonance_order\n";
  if (!resonant) {
    // No exact rational within tolerance: the only certified resonances are
    // none, so the attached module is {0} and the order is maximal.
    PrimitiveModule mod = zero_module(dim);
    os << "non-resonant," << basis_cell(mod) << ",0,1," << dim << '\n';
    record.summary["rank"] = 0;
    return;
  }
  PrimitiveModule mod = classify(xi);
  ModuleGeometry geom = geometry(mod);
  os << xi_cell(xi) << ',' << basis_cell(mod) << ',' << mod.rank() << ','
     << geom.covering_degree << ',' << resonance_order(xi) << '\n';
  record.summary["rank"] = mod.rank();
}

void run_evolve(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  const int box = c.at("box").get<int>();
  Potential V = potential_or_zero(c, dim);
  Scheme scheme = c.value("scheme", std::string("eigenbasis")) == "split-step"
                      ? Scheme::SplitStep
                      : Scheme::Eigenbasis;
  PropagatorPlan plan = make_plan(V, box, scheme, c.value("dt", 1e-3));
  FourierState u0 = family_state(c.at("family"), dim, c.value("h", 1.0));
  auto t_samples = grid_from_json(c.at("t_samples"));
  double final_norm = 0;
  for (size_t i = 0; i < t_samples.size(); ++i) {
    FourierState ut = propagate(plan, u0, t_samples[i]);
    auto os = open_output(dir, "evolve_t" + std::to_string(i) + ".csv", record);
    write_state_csv(os, ut);
    final_norm = ut.norm();
  }
  record.summary["final_norm"] = final_norm;
}

void run_wigner(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  Symbol a = symbol_from_json(c.at("symbol"), dim);
  auto os = open_output(dir, "wigner.csv", record);
  os << "h,re,im\n";
  for (double h : grid_from_json(c.at("h_grid"))) {
    FourierState u = family_state(c.at("family"), dim, h);
    Complex w = wigner_pair(u, a, h);
    os << format_double(h) << ',' << format_double(w.real()) << ',' << format_double(w.imag())
       << '\n';
    record.summary["last_re"] = w.real();
  }
}

void run_twomicro(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  ModuleGeometry geom = geometry(module_from_json(c.at("module")));
  Symbol a = symbol_from_json(c.at("symbol"), dim);
  a.module_tag = geom.module;
  auto os = open_output(dir, "twomicro.csv", record);
  os << "h,R,inner,outer,uncut,defect\n";
  double worst = 0;
  for (double h : grid_from_json(c.at("h_grid"))) {
    FourierState u = family_state(c.at("family"), dim, h);
    Complex uncut = wigner_pair(u, a, h);
    for (double R : grid_from_json(c.at("R_grid"))) {
      Cutoff cutoff{R};
      Complex inner = twomicro_pair(u, a, geom, h, cutoff, FilterSide::Inner);
      Complex outer = twomicro_pair(u, a, geom, h, cutoff, FilterSide::Outer);
      double defect = std::abs(inner + outer - uncut);
      worst = std::max(worst, defect);
      os << format_double(h) << ',' << format_double(R) << ',' << format_double(inner.real())
         << ',' << format_double(outer.real()) << ',' << format_double(uncut.real()) << ','
         << format_double(defect) << '\n';
    }
  }
  record.summary["max_sum_defect"] = worst;
}

void run_sigma_propagation(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  ModuleGeometry geom = geometry(module_from_json(c.at("module")));
  Potential V = potential_or_zero(c, dim);
  Symbol b = symbol_from_json(c.at("symbol"), dim);
  const int margin = c.value("evolve_margin", 30);
  const int avg_box = c.value("avg_box", margin + 5);

  // One propagation plan per h, over the family's dilated support.
  auto evolve = [&](double h, double t) {
    FourierState u0 = family_state(c.at("family"), dim, h);
    PropagatorPlan plan = make_plan_for_modes(V, dilated_support(u0, margin));
    return propagate(plan, u0, t);
  };
  LimitTable table =
      propagation_law_test(grid_from_json(c.at("h_grid")), evolve, V, geom, b,
                           grid_from_json(c.at("R_grid")), grid_from_json(c.at("t_samples")),
                           avg_box);
  LimitSummary summary = limit_extrapolate(table);
  auto os = open_output(dir, "limit_table.csv", record);
  write_limit_table_csv(os, table, summary);
  record.summary["estimate"] = summary.estimate;
  record.summary["last_value"] = summary.last_value;
}

std::vector<XiBox> xi_boxes_from_json(const Json& j, int dim) {
  std::vector<XiBox> boxes;
  for (const auto& bj : j) {
    if (bj.size() != static_cast<size_t>(dim))
      throw std::invalid_argument("xi box: wrong number of intervals");
    XiBox b;
    b.lo.resize(dim);
    b.hi.resize(dim);
    for (int i = 0; i < dim; ++i) {
      b.lo[i] = bj[i].at(0).get<double>();
      b.hi[i] = bj[i].at(1).get<double>();
    }
    boxes.push_back(std::move(b));
  }
  return boxes;
}

void run_marginal(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  Potential V = potential_or_zero(c, dim);
  auto boxes = xi_boxes_from_json(c.at("boxes"), dim);
  auto t_samples = grid_from_json(c.at("t_samples"));
  const int margin = c.value("evolve_margin", 20);
  auto os = open_output(dir, "marginal.csv", record);
  os << "h,t,box,mass\n";
  double last_variation = 0;
  for (double h : grid_from_json(c.at("h_grid"))) {
    FourierState u0 = family_state(c.at("family"), dim, h);
    PropagatorPlan plan = make_plan_for_modes(V, dilated_support(u0, margin));
    std::vector<double> base;
    double variation = 0;
    for (size_t ti = 0; ti < t_samples.size(); ++ti) {
      FourierState ut = propagate(plan, u0, t_samples[ti]);
      auto hist = marginal_xi(ut, h, boxes);
      if (ti == 0) base = hist;
      double dist = 0;
      for (size_t i = 0; i < hist.size(); ++i) dist += std::abs(hist[i] - base[i]);
      variation = std::max(variation, dist);
      for (size_t i = 0; i < hist.size(); ++i)
        os << format_double(h) << ',' << format_double(t_samples[ti]) << ',' << i << ','
           << format_double(hist[i]) << '\n';
    }
    record.summary["variation_h=" + format_double(h)] = variation;
    last_variation = variation;
  }
  record.summary["last_variation"] = last_variation;
}

void run_disintegration(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  Potential V = potential_or_zero(c, dim);
  const double h = c.at("h").get<double>();
  FourierState u0 = family_state(c.at("family"), dim, h);
  PropagatorPlan plan = make_plan(V, c.at("box").get<int>());
  auto boxes = xi_boxes_from_json(c.at("boxes"), dim);
  auto grid = uniform_grid(dim, c.value("grid_points", 32));
  auto parts = conditional_density(plan, u0, c.at("T").get<double>(), h, boxes, grid,
                                   c.value("panels_per_unit_time", 1000));
  for (size_t i = 0; i < parts.size(); ++i) {
    if (!parts[i].present) continue;
    auto os = open_output(dir, "density_box" + std::to_string(i) + ".csv", record);
    write_density_csv(os, grid, parts[i].density);
    record.summary["mass_box" + std::to_string(i)] = parts[i].mass;
  }
}

void run_observability(const Json& c, const std::filesystem::path& dir, RunRecord& record) {
  const int dim = c.at("dim").get<int>();
  ObservationSpec spec = observation_from_json(c.at("observation"));
  Potential V = potential_or_zero(c, dim);
  const std::string omega_id = c.value("omega_id", std::string("omega"));
  auto os = open_output(dir, "observability.csv", record);
  os << "N,T,omega,lambda_min,C\n";
  for (const auto& nj : c.at("N_grid")) {
    int N = nj.get<int>();
    auto [lmin, C] = observability_constant(gram(spec, V, N));
    os << N << ',' << format_double(spec.T) << ',' << omega_id << ',' << format_double(lmin)
       << ',' << format_double(C) << '\n';
    record.summary["lambda_min_N=" + std::to_string(N)] = lmin;
  }
}

}  // namespace

RunRecord run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir) {
  auto errors = validate_experiment(spec);
  if (!errors.empty()) throw ValidationError(std::move(errors));
  RunRecord record;
  record.spec_hash = spec_hash(spec);
  record.version = artifact_version();
  const Json& c = spec.config;
  if (spec.kind == "classify") run_classify(c, out_dir, record);
  else if (spec.kind == "evolve") run_evolve(c, out_dir, record);
  else if (spec.kind == "wigner") run_wigner(c, out_dir, record);
  else if (spec.kind == "twomicro") run_twomicro(c, out_dir, record);
  else if (spec.kind == "sigma-propagation") run_sigma_propagation(c, out_dir, record);
  else if (spec.kind == "marginal") run_marginal(c, out_dir, record);
  else if (spec.kind == "disintegration") run_disintegration(c, out_dir, record);
  else if (spec.kind == "observability") run_observability(c, out_dir, record);
  return record;
}

SnapReport snap_frequency(const Eigen::VectorXd& x, long max_den) {
  if (max_den < 1) throw std::invalid_argument("snap_frequency: max_den must be >= 1");
  SnapReport report;
  report.value.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // Continued-fraction best approximation with denominator <= max_den,
    // including the final semiconvergent.
    double target = x[i];
    // Convergent recurrences: h_{-1}=1, h_{-2}=0; k_{-1}=0, k_{-2}=1.
    long long hm1 = 1, hm2 = 0, km1 = 0, km2 = 1;
    double rem = target;
    long long best_p = static_cast<long long>(std::llround(target)), best_q = 1;
    for (int iter = 0; iter < 64; ++iter) {
      double floor_a = std::floor(rem);
      long long a = static_cast<long long>(floor_a);
      long long h = a * hm1 + hm2;
      long long k = a * km1 + km2;
      if (k > max_den) {
        long long amax = (max_den - km2) / std::max<long long>(km1, 1);
        long long hs = amax * hm1 + hm2, ks = amax * km1 + km2;
        if (ks >= 1) {
          double err_semi = std::abs(target - static_cast<double>(hs) / ks);
          double err_best = std::abs(target - static_cast<double>(best_p) / best_q);
          if (err_semi < err_best) {
            best_p = hs;
            best_q = ks;
          }
        }
        break;
      }
      best_p = h;
      best_q = k;
      hm2 = hm1;
      hm1 = h;
      km2 = km1;
      km1 = k;
      double frac = rem - floor_a;
      if (frac < 1e-15) break;
      rem = 1.0 / frac;
    }
    report.value[i] = Rational(Int(best_p), Int(best_q));
    report.residuals.push_back(std::abs(target - static_cast<double>(best_p) / best_q));
  }
  for (double r : report.residuals)
    if (r > 1e-9) report.resonant = false;
  return report;
}

}  // namespace twomicro
