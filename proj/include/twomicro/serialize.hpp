#pragma once

#include "twomicro/microlocal.hpp"
#include "twomicro/observability.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>

namespace twomicro {

using Json = nlohmann::json;

// JSON forms: modules {"dim": d, "basis": [[...], ...]} (basis vectors as
// columns), rationals "p/q" strings, potentials {"modes": [{"k": [...],
// "re": x, "im": y}]}, proxies {"modes": [...], "matrix_re": [[...]],
// "matrix_im": [[...]], "trace": x}.

Json module_to_json(const PrimitiveModule& mod);
PrimitiveModule module_from_json(const Json& j);

Json rational_vector_to_json(const RationalVector& v);
RationalVector rational_vector_from_json(const Json& j);

Json potential_to_json(const Potential& V);
Potential potential_from_json(const Json& j);

Json proxy_to_json(const SigmaProxy& proxy);

Json observation_to_json(const ObservationSpec& spec);
/// Box coordinates are given in units of 2π.
ObservationSpec observation_from_json(const Json& j);

/// Symbol specs: {"kind": "constant", "re": x, "im": y},
/// {"kind": "cos", "k": [...]}, {"kind": "x_modes", "modes": [{"k", "re", "im"}]}.
Symbol symbol_from_json(const Json& j, int dim);

/// Deterministic decimal formatting shared by every CSV writer.
std::string format_double(double x);

void write_limit_table_csv(std::ostream& os, const LimitTable& table,
                           const LimitSummary& summary);
void write_density_csv(std::ostream& os, const std::vector<Eigen::VectorXd>& xgrid,
                       const Eigen::VectorXd& density);
void write_state_csv(std::ostream& os, const FourierState& u);

}  // namespace twomicro
