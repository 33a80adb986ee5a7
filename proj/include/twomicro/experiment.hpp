#pragma once

#include "twomicro/serialize.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace twomicro {

/// Declarative experiment description, parsed from a JSON config. Field names
/// match the JSON keys one-to-one.
struct ExperimentSpec {
  std::string kind;  // classify | evolve | wigner | twomicro | sigma-propagation
                     // | marginal | disintegration | observability
  Json config;       // full parsed document (kept for hashing and reruns)
};

/// Thrown when a spec fails validation; messages name the offending fields.
struct ValidationError : std::runtime_error {
  std::vector<std::string> messages;
  explicit ValidationError(std::vector<std::string> msgs);
};

ExperimentSpec parse_experiment(const Json& config);
ExperimentSpec load_experiment(const std::filesystem::path& file);

/// Collects field-level problems; empty means the config is runnable.
std::vector<std::string> validate_experiment(const ExperimentSpec& spec);

struct RunRecord {
  std::string spec_hash;
  std::string version;
  std::vector<std::filesystem::path> outputs;
  std::map<std::string, double> summary;
};

/// Executes the experiment, writing deterministic CSV outputs into out_dir.
RunRecord run_experiment(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

/// FNV-1a hash of the canonical config dump; pins outputs to specs.
std::string spec_hash(const ExperimentSpec& spec);

inline const char* artifact_version() { return "0.1.0"; }

struct SnapReport {
  RationalVector value;
  std::vector<double> residuals;
  bool resonant = true;  // false when any residual exceeds 10⁻⁹ (Λ = {0} token)
};

/// Per-entry best rational approximation with denominator ≤ max_den
/// (continued fractions with semiconvergents).
SnapReport snap_frequency(const Eigen::VectorXd& x, long max_den);

/// Data families shared by experiments; "random" requires a seed.
FourierState family_state(const Json& family, int dim, double h);

}  // namespace twomicro
