// Command-line laboratory: runs declarative JSON experiments, an exact-identity
// verification suite, and rational frequency snapping.

#include <CLI11.hpp>

#include "twomicro/experiment.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <iostream>
#include <random>
#include <sstream>

namespace {

using namespace twomicro;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

int run_kind(const std::string& kind, const std::string& spec_path, const std::string& out_dir) {
  try {
    ExperimentSpec spec = load_experiment(spec_path);
    if (spec.kind != kind) {
      std::cerr << "kind: spec declares '" << spec.kind << "' but the subcommand is '" << kind
                << "'\n";
      return kExitValidation;
    }
    RunRecord record = run_experiment(spec, out_dir);
    std::cout << "spec_hash=" << record.spec_hash << " version=" << record.version << '\n';
    for (const auto& path : record.outputs) std::cout << "wrote " << path.string() << '\n';
    for (const auto& [key, value] : record.summary)
      std::cout << key << '=' << format_double(value) << '\n';
    return kExitOk;
  } catch (const ValidationError& e) {
    for (const auto& msg : e.messages) std::cerr << msg << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
}

FourierState random_state(int dim, int box, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  FourierState u;
  u.dim = dim;
  u.box = box;
  for (const auto& k : box_modes(dim, box)) u.coeff[k] = Complex(g(rng), g(rng));
  u.normalize();
  return u;
}

bool report(const char* name, double defect, double tol) {
  bool ok = defect <= tol;
  std::cout << (ok ? "PASS " : "FAIL ") << name << " (defect " << format_double(defect) << ")\n";
  return ok;
}

// Fast exact-identity suite; every check holds to roundoff by construction.
int run_verify() {
  std::mt19937_64 rng(20260823);
  bool all = true;

  {  // inner + outer filters reassemble the unfiltered pairing
    ModuleGeometry geom = geometry(saturate(IntMatrix(make_mode({1, 0}).cast<Int>())));
    Symbol a = cos_symbol(2, make_mode({1, 0}));
    a.module_tag = geom.module;
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
      FourierState u = random_state(2, 4, rng);
      for (double h : {0.5, 0.125}) {
        Complex uncut = wigner_pair(u, a, h);
        Complex in = twomicro_pair(u, a, geom, h, Cutoff{2.0}, FilterSide::Inner);
        Complex out = twomicro_pair(u, a, geom, h, Cutoff{2.0}, FilterSide::Outer);
        worst = std::max(worst, std::abs(in + out - uncut));
      }
    }
    all &= report("two-microlocal splitting", worst, 1e-12);
  }

  {  // covering relabeling is an isometry
    ModuleGeometry geom = geometry(saturate(IntMatrix(make_mode({1, 1}).cast<Int>())));
    CoveringSplit split = covering_split(geom, 6);
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial)
      worst = std::max(worst, lift_isometry_check(random_state(2, 6, rng), split));
    all &= report("covering isometry", worst, 1e-12);
  }

  {  // classified module annihilates its frequency, exactly
    std::vector<RationalVector> samples;
    for (int trial = 0; trial < 20; ++trial) {
      RationalVector xi(3);
      for (int i = 0; i < 3; ++i)
        xi[i] = Rational(Int(static_cast<long>(rng() % 11) - 5),
                         Int(static_cast<long>(rng() % 6) + 1));
      samples.push_back(xi);
    }
    bool exact = true;
    for (const auto& xi : samples) {
      PrimitiveModule mod = classify(xi);
      for (Eigen::Index c = 0; c < mod.basis.cols(); ++c) {
        Rational dot(0);
        for (Eigen::Index r = 0; r < mod.basis.rows(); ++r) dot += Rational(mod.basis(r, c)) * xi[r];
        if (dot != Rational(0)) exact = false;
      }
    }
    all &= report("classification annihilation", exact ? 0.0 : 1.0, 0.0);
  }

  {  // marginal histograms carry the full mass when the boxes cover the support
    XiBox everything;
    everything.lo = Eigen::VectorXd::Constant(2, -100.0);
    everything.hi = Eigen::VectorXd::Constant(2, 100.0);
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
      FourierState u = random_state(2, 5, rng);
      auto hist = marginal_xi(u, 0.25, {everything});
      worst = std::max(worst, std::abs(hist[0] - u.squared_norm()));
    }
    all &= report("marginal mass", worst, 1e-12);
  }

  {  // free propagation is exactly unitary and reversible
    double worst = 0;
    for (int trial = 0; trial < 5; ++trial) {
      FourierState u = random_state(2, 5, rng);
      FourierState back = free_propagate(free_propagate(u, 1.37), -1.37);
      worst = std::max(worst, l2_distance(u, back));
    }
    all &= report("free-flow reversibility", worst, 1e-12);
  }

  return all ? kExitOk : kExitNumeric;
}

int run_snap(const std::string& csv, long max_den) {
  std::vector<double> xs;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) xs.push_back(std::stod(cell));
  Eigen::VectorXd x(static_cast<Eigen::Index>(xs.size()));
  for (size_t i = 0; i < xs.size(); ++i) x[static_cast<Eigen::Index>(i)] = xs[i];
  SnapReport snap = snap_frequency(x, max_den);
  Json out;
  out["resonant"] = snap.resonant;
  out["value"] = snap.resonant ? rational_vector_to_json(snap.value) : Json("non-resonant");
  Json residuals = Json::array();
  for (double r : snap.residuals) residuals.push_back(r);
  out["residuals"] = residuals;
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-microlocal torus laboratory"};
  app.require_subcommand(1);

  std::string spec_path, out_dir = ".";
  int threads = 1;

  const std::vector<std::string> kinds = {"classify",  "evolve",   "wigner",
                                          "twomicro",  "sigma-propagation", "marginal",
                                          "disintegration", "observability"};
  std::vector<CLI::App*> kind_cmds;
  for (const auto& kind : kinds) {
    CLI::App* cmd = app.add_subcommand(kind, "run a '" + kind + "' experiment");
    cmd->add_option("--spec", spec_path, "JSON experiment file")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads");
    kind_cmds.push_back(cmd);
  }

  CLI::App* verify = app.add_subcommand("verify", "run the exact-identity suite");
  verify->add_option("--threads", threads, "worker threads");

  std::string snap_value;
  long max_den = 1000000;
  CLI::App* snap = app.add_subcommand("snap", "snap a frequency to exact rationals");
  snap->add_option("--value", snap_value, "comma-separated components")->required();
  snap->add_option("--max-den", max_den, "largest denominator considered");

  CLI11_PARSE(app, argc, argv);
  Eigen::setNbThreads(threads);

  for (size_t i = 0; i < kinds.size(); ++i)
    if (kind_cmds[i]->parsed()) return run_kind(kinds[i], spec_path, out_dir);
  if (verify->parsed()) return run_verify();
  if (snap->parsed()) return run_snap(snap_value, max_den);
  return kExitOk;
}
