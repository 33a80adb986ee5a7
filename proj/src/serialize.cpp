#include "twomicro/serialize.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace twomicro {

Json module_to_json(const PrimitiveModule& mod) {
  Json basis = Json::array();
  for (Eigen::Index c = 0; c < mod.basis.cols(); ++c) {
    Json col = Json::array();
    for (Eigen::Index r = 0; r < mod.basis.rows(); ++r)
      col.push_back(mod.basis(r, c).convert_to<long long>());
    basis.push_back(std::move(col));
  }
  return Json{{"dim", mod.dim}, {"basis", basis}};
}

PrimitiveModule module_from_json(const Json& j) {
  const int dim = j.at("dim").get<int>();
  const auto& basis = j.at("basis");
  IntMatrix B(dim, static_cast<Eigen::Index>(basis.size()));
  for (size_t c = 0; c < basis.size(); ++c) {
    if (basis[c].size() != static_cast<size_t>(dim))
      throw std::invalid_argument("module basis: generator length != dim");
    for (int r = 0; r < dim; ++r) B(r, static_cast<Eigen::Index>(c)) = basis[c][r].get<long long>();
  }
  return PrimitiveModule{dim, column_hnf(B)};
}

Json rational_vector_to_json(const RationalVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(format_rational(v[i]));
  return out;
}

RationalVector rational_vector_from_json(const Json& j) {
  RationalVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (j[i].is_string()) v[static_cast<Eigen::Index>(i)] = parse_rational(j[i].get<std::string>());
    else v[static_cast<Eigen::Index>(i)] = Rational(Int(j[i].get<long long>()));
  }
  return v;
}

Json potential_to_json(const Potential& V) {
  Json modes = Json::array();
  for (const auto& [k, c] : V.modes) {
    Json kk = Json::array();
    for (Eigen::Index i = 0; i < k.size(); ++i) kk.push_back(k[i]);
    modes.push_back(Json{{"k", kk}, {"re", c.real()}, {"im", c.imag()}});
  }
  return Json{{"modes", modes}};
}

Potential potential_from_json(const Json& j) {
  Potential V;
  for (const auto& entry : j.at("modes")) {
    const auto& kk = entry.at("k");
    Mode k(static_cast<Eigen::Index>(kk.size()));
    for (size_t i = 0; i < kk.size(); ++i) k[static_cast<Eigen::Index>(i)] = kk[i].get<int>();
    if (V.dim == 0) V.dim = static_cast<int>(k.size());
    if (static_cast<int>(k.size()) != V.dim)
      throw std::invalid_argument("potential: inconsistent mode dimensions");
    V.modes[k] = Complex(entry.at("re").get<double>(), entry.value("im", 0.0));
  }
  return V;
}

Json proxy_to_json(const SigmaProxy& proxy) {
  Json modes = Json::array();
  for (const auto& m : proxy.modes) modes.push_back(rational_vector_to_json(m));
  Json re = Json::array(), im = Json::array();
  for (Eigen::Index r = 0; r < proxy.matrix.rows(); ++r) {
    Json rrow = Json::array(), irow = Json::array();
    for (Eigen::Index c = 0; c < proxy.matrix.cols(); ++c) {
      rrow.push_back(proxy.matrix(r, c).real());
      irow.push_back(proxy.matrix(r, c).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return Json{{"modes", modes}, {"matrix_re", re}, {"matrix_im", im}, {"trace", proxy.trace()}};
}

Json observation_to_json(const ObservationSpec& spec) {
  const double unit = 2.0 * std::numbers::pi;
  Json boxes = Json::array();
  for (const auto& b : spec.boxes) {
    Json box = Json::array();
    for (Eigen::Index i = 0; i < b.lo.size(); ++i)
      box.push_back(Json::array({b.lo[i] / unit, b.hi[i] / unit}));
    boxes.push_back(std::move(box));
  }
  return Json{{"dim", spec.dim}, {"T", spec.T}, {"boxes", boxes}};
}

ObservationSpec observation_from_json(const Json& j) {
  const double unit = 2.0 * std::numbers::pi;
  ObservationSpec spec;
  spec.dim = j.at("dim").get<int>();
  spec.T = j.at("T").get<double>();
  for (const auto& box : j.at("boxes")) {
    if (box.size() != static_cast<size_t>(spec.dim))
      throw std::invalid_argument("observation box: wrong number of arcs");
    ArcBox b;
    b.lo.resize(spec.dim);
    b.hi.resize(spec.dim);
    for (int i = 0; i < spec.dim; ++i) {
      b.lo[i] = box[i].at(0).get<double>() * unit;
      b.hi[i] = box[i].at(1).get<double>() * unit;
    }
    spec.boxes.push_back(std::move(b));
  }
  return spec;
}

Symbol symbol_from_json(const Json& j, int dim) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant")
    return constant_symbol(dim, Complex(j.value("re", 1.0), j.value("im", 0.0)));
  if (kind == "cos") {
    const auto& kk = j.at("k");
    if (kk.size() != static_cast<size_t>(dim))
      throw std::invalid_argument("symbol: cos mode length != dim");
    Mode k(dim);
    for (int i = 0; i < dim; ++i) k[i] = kk[i].get<int>();
    return cos_symbol(dim, k);
  }
  if (kind == "x_modes") {
    ModeMap<Complex> coeffs;
    for (const auto& entry : j.at("modes")) {
      const auto& kk = entry.at("k");
      Mode k(dim);
      for (int i = 0; i < dim; ++i) k[i] = kk[i].get<int>();
      coeffs[k] = Complex(entry.at("re").get<double>(), entry.value("im", 0.0));
    }
    return x_symbol(dim, coeffs);
  }
  throw std::invalid_argument("symbol: unknown kind '" + kind + "'");
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_limit_table_csv(std::ostream& os, const LimitTable& table,
                           const LimitSummary& summary) {
  os << "h,R,t,value\n";
  for (size_t ri = 0; ri < table.R_grid.size(); ++ri)
    for (size_t hi = 0; hi < table.h_grid.size(); ++hi)
      for (size_t ti = 0; ti < table.t_samples.size(); ++ti)
        os << format_double(table.h_grid[hi]) << ',' << format_double(table.R_grid[ri]) << ','
           << format_double(table.t_samples[ti]) << ','
           << format_double(table.values[ri][hi][ti]) << '\n';
  os << "# estimate=" << format_double(summary.estimate)
     << " last_value=" << format_double(summary.last_value) << " verdict=" << summary.verdict
     << '\n';
  os << "# per_R_estimate=";
  for (size_t i = 0; i < summary.per_R_estimate.size(); ++i)
    os << (i ? ";" : "") << format_double(summary.per_R_estimate[i]);
  os << '\n';
}

void write_density_csv(std::ostream& os, const std::vector<Eigen::VectorXd>& xgrid,
                       const Eigen::VectorXd& density) {
  if (xgrid.empty()) return;
  const auto d = xgrid.front().size();
  for (Eigen::Index i = 0; i < d; ++i) os << 'x' << (i + 1) << ',';
  os << "value\n";
  for (size_t g = 0; g < xgrid.size(); ++g) {
    for (Eigen::Index i = 0; i < d; ++i) os << format_double(xgrid[g][i]) << ',';
    os << format_double(density[static_cast<Eigen::Index>(g)]) << '\n';
  }
}

void write_state_csv(std::ostream& os, const FourierState& u) {
  for (int i = 0; i < u.dim; ++i) os << 'k' << (i + 1) << ',';
  os << "re,im\n";
  for (const auto& [k, c] : u.coeff) {
    for (Eigen::Index i = 0; i < k.size(); ++i) os << k[i] << ',';
    os << format_double(c.real()) << ',' << format_double(c.imag()) << '\n';
  }
}

}  // namespace twomicro
