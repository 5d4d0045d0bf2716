#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string_view>

#include "r2dnet/cli.hpp"
#include "r2dnet/discretize.hpp"

namespace r2dnet::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size()) throw ConfigError(key + ": trailing characters in '" + text + "'");
  if (!std::isfinite(value)) throw ConfigError(key + ": value must be finite");
  return value;
}

int to_int(const std::string& key, const std::string& text) {
  const double value = to_double(key, text);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw ConfigError(key + ": expected an integer, got '" + text + "'");
  }
  return static_cast<int>(value);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(trim(item));
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

// "a,b;c,d" is [[a, b], [c, d]].
Matrix to_matrix(const std::string& key, const std::string& text) {
  const auto rows = split(text, ';');
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) {
    std::vector<double> entries;
    for (const auto& item : split(row, ',')) entries.push_back(to_double(key, item));
    if (!values.empty() && entries.size() != values.front().size()) {
      throw ConfigError(key + ": ragged matrix rows");
    }
    values.push_back(std::move(entries));
  }
  if (values.empty() || values.front().empty()) throw ConfigError(key + ": empty matrix");
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = values[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return m;
}

Vector to_vector(const std::string& key, const std::string& text) {
  const Matrix m = to_matrix(key, text);
  if (m.rows() != 1) throw ConfigError(key + ": expected a single row");
  return m.row(0).transpose();
}

std::string matrix_text(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += ';';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_number(m(i, j));
    }
  }
  return out;
}

std::string vector_text(const Vector& v) { return matrix_text(v.transpose()); }

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string&)>;

Setter number(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_double(k, v); };
}

Setter optional_number(std::optional<double> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "auto") {
      c.*field = std::nullopt;
    } else {
      c.*field = to_double(k, v);
    }
  };
}

Setter optional_matrix(std::optional<Matrix> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) { c.*field = to_matrix(k, v); };
}

Setter beta(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& k, const std::string& v) {
    if (v == "search") {
      c.beta_search = true;
    } else {
      c.*field = to_double(k, v);
    }
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"plant.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "pde") {
           c.plant_kind = PlantKind::Pde;
         } else if (v == "roesser") {
           c.plant_kind = PlantKind::Roesser;
         } else {
           throw ConfigError(k + ": expected pde or roesser");
         }
       }},
      {"plant.a0", number(&RunConfig::a0)},
      {"plant.a1", number(&RunConfig::a1)},
      {"plant.a2", number(&RunConfig::a2)},
      {"plant.b", number(&RunConfig::b)},
      {"plant.c1", optional_matrix(&RunConfig::c1)},
      {"plant.c2", optional_matrix(&RunConfig::c2)},
      {"plant.d", optional_matrix(&RunConfig::d_override)},
      {"plant.A", [](RunConfig& c, const std::string& k, const std::string& v) { c.a = to_matrix(k, v); }},
      {"plant.B", [](RunConfig& c, const std::string& k, const std::string& v) { c.bmat = to_matrix(k, v); }},
      {"plant.C", [](RunConfig& c, const std::string& k, const std::string& v) { c.c = to_matrix(k, v); }},
      {"plant.D", [](RunConfig& c, const std::string& k, const std::string& v) { c.d = to_matrix(k, v); }},
      {"plant.nh", [](RunConfig& c, const std::string& k, const std::string& v) { c.nh = to_int(k, v); }},
      {"boundary.q", number(&RunConfig::boundary_q)},
      {"boundary.dq", number(&RunConfig::boundary_dq)},
      {"boundary.p_scale", number(&RunConfig::boundary_p_scale)},
      {"boundary.p_rate", number(&RunConfig::boundary_p_rate)},
      {"boundary.xh0",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.boundary_xh0 = to_vector(k, v); }},
      {"boundary.xv0",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.boundary_xv0 = to_vector(k, v); }},
      {"sampling.h1", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampling.h1 = to_double(k, v); }},
      {"sampling.h2", [](RunConfig& c, const std::string& k, const std::string& v) { c.sampling.h2 = to_double(k, v); }},
      {"indices.nu_p", number(&RunConfig::nu_p)},
      {"indices.rho_p", optional_number(&RunConfig::rho_p)},
      {"controller.k", number(&RunConfig::controller_k)},
      {"controller.nu_c", number(&RunConfig::nu_c)},
      {"controller.rho_c", optional_number(&RunConfig::rho_c)},
      {"quant.delta_p", number(&RunConfig::delta_p)},
      {"quant.delta_c", number(&RunConfig::delta_c)},
      {"quant.dead_zone_p", number(&RunConfig::dead_zone_p)},
      {"quant.dead_zone_c", number(&RunConfig::dead_zone_c)},
      {"network.beta1", beta(&RunConfig::beta1)},
      {"network.beta2", beta(&RunConfig::beta2)},
      {"trigger.theta1", number(&RunConfig::theta1)},
      {"trigger.theta2", number(&RunConfig::theta2)},
      {"grid.n1", [](RunConfig& c, const std::string& k, const std::string& v) { c.n1 = to_int(k, v); }},
      {"grid.n2", [](RunConfig& c, const std::string& k, const std::string& v) { c.n2 = to_int(k, v); }},
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
      {"lmi.tol", number(&RunConfig::lmi_tol)},
      {"lmi.rho_tol", number(&RunConfig::rho_tol)},
  };
  return table;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const RunConfig& c) {
  check(c.sampling.h1 >= 0.0 && c.sampling.h2 >= 0.0, "sampling periods must be nonnegative");
  check(c.n1 > 0 && c.n2 > 0, "grid.n1 and grid.n2 must be positive");
  check(c.delta_p >= 0.0 && c.delta_p < 1.0, "quant.delta_p must lie in [0, 1)");
  check(c.delta_c >= 0.0 && c.delta_c < 1.0, "quant.delta_c must lie in [0, 1)");
  check(c.dead_zone_p >= 0.0 && c.dead_zone_c >= 0.0, "dead zones must be nonnegative");
  check(c.theta1 > 0.0 && c.theta1 < 1.0, "trigger.theta1 must lie in (0, 1)");
  check(c.theta2 > 0.0 && c.theta2 < 1.0, "trigger.theta2 must lie in (0, 1)");
  check(c.beta_search || (c.beta1 > 0.0 && c.beta2 > 0.0), "network betas must be positive");
  check(c.lmi_tol > 0.0 && c.rho_tol > 0.0, "lmi tolerances must be positive");
  check(c.controller_k != 0.0, "controller.k must be nonzero");
  if (c.plant_kind == PlantKind::Roesser) {
    check(c.a.size() > 0 && c.bmat.size() > 0 && c.c.size() > 0 && c.d.size() > 0,
          "plant.kind = roesser needs plant.A, plant.B, plant.C and plant.D");
    check(c.nh > 0 && c.nh < c.a.rows(), "plant.nh must split plant.A");
    check(c.boundary_xh0.size() == c.nh && c.boundary_xv0.size() == c.a.rows() - c.nh,
          "boundary.xh0 and boundary.xv0 must match the state split");
  } else {
    const bool any = c.c1 || c.c2 || c.d_override;
    check(!any || (c.c1 && c.c2 && c.d_override), "plant.c1, plant.c2 and plant.d go together");
  }
}

}  // namespace

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(text).substr(0, eq));
    const std::string value = trim(std::string_view(text).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    it->second(config, key, value);
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::string dump_config(const RunConfig& c) {
  std::ostringstream out;
  auto put = [&out](const char* key, const std::string& value) { out << key << " = " << value << '\n'; };
  auto num = [&put](const char* key, double v) { put(key, format_number(v)); };
  auto opt = [&put](const char* key, const std::optional<double>& v) {
    put(key, v ? format_number(*v) : std::string("auto"));
  };

  if (c.plant_kind == PlantKind::Pde) {
    put("plant.kind", "pde");
    num("plant.a0", c.a0);
    num("plant.a1", c.a1);
    num("plant.a2", c.a2);
    num("plant.b", c.b);
    if (c.c1) put("plant.c1", matrix_text(*c.c1));
    if (c.c2) put("plant.c2", matrix_text(*c.c2));
    if (c.d_override) put("plant.d", matrix_text(*c.d_override));
    num("boundary.q", c.boundary_q);
    num("boundary.dq", c.boundary_dq);
    num("boundary.p_scale", c.boundary_p_scale);
    num("boundary.p_rate", c.boundary_p_rate);
  } else {
    put("plant.kind", "roesser");
    put("plant.A", matrix_text(c.a));
    put("plant.B", matrix_text(c.bmat));
    put("plant.C", matrix_text(c.c));
    put("plant.D", matrix_text(c.d));
    put("plant.nh", std::to_string(c.nh));
    put("boundary.xh0", vector_text(c.boundary_xh0));
    put("boundary.xv0", vector_text(c.boundary_xv0));
  }
  num("sampling.h1", c.sampling.h1);
  num("sampling.h2", c.sampling.h2);
  num("indices.nu_p", c.nu_p);
  opt("indices.rho_p", c.rho_p);
  num("controller.k", c.controller_k);
  num("controller.nu_c", c.nu_c);
  opt("controller.rho_c", c.rho_c);
  num("quant.delta_p", c.delta_p);
  num("quant.delta_c", c.delta_c);
  num("quant.dead_zone_p", c.dead_zone_p);
  num("quant.dead_zone_c", c.dead_zone_c);
  if (c.beta_search) {
    put("network.beta1", "search");
    put("network.beta2", "search");
  } else {
    num("network.beta1", c.beta1);
    num("network.beta2", c.beta2);
  }
  num("trigger.theta1", c.theta1);
  num("trigger.theta2", c.theta2);
  put("grid.n1", std::to_string(c.n1));
  put("grid.n2", std::to_string(c.n2));
  put("output.dir", c.out_dir);
  num("lmi.tol", c.lmi_tol);
  num("lmi.rho_tol", c.rho_tol);
  return out.str();
}

namespace {

Pde2ndOrderSpec pde_spec(const RunConfig& c) {
  Pde2ndOrderSpec spec;
  spec.a0 = c.a0;
  spec.a1 = c.a1;
  spec.a2 = c.a2;
  spec.b = c.b;
  spec.boundary_q.assign(static_cast<size_t>(c.n2), c.boundary_q);
  spec.boundary_dq.assign(static_cast<size_t>(c.n2), c.boundary_dq);
  spec.boundary_p.resize(static_cast<size_t>(c.n1));
  for (int i = 0; i < c.n1; ++i) {
    spec.boundary_p[static_cast<size_t>(i)] =
        c.boundary_p_scale * std::exp(c.boundary_p_rate * i * c.sampling.h1);
  }
  return spec;
}

}  // namespace

ContinuousRoesser2D plant_model(const RunConfig& c) {
  if (c.plant_kind == PlantKind::Roesser) return make_continuous(c.a, c.bmat, c.c, c.d, c.nh);
  const auto spec = pde_spec(c);
  if (c.c1) return pde_to_roesser(spec, *c.c1, *c.c2, *c.d_override);
  return pde_to_roesser(spec);
}

DiscreteRoesser2D sampled_plant(const RunConfig& c) { return sample_exact(plant_model(c), c.sampling); }

BoundaryConditions plant_boundary(const RunConfig& c) {
  if (c.plant_kind == PlantKind::Roesser) {
    return BoundaryConditions::constant(c.boundary_xh0, c.n2, c.boundary_xv0, c.n1);
  }
  return boundary_from_pde(pde_spec(c));
}

double Range::at(int k) const {
  if (count <= 1) return first;
  return first + (last - first) * static_cast<double>(k) / static_cast<double>(count - 1);
}

Range parse_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("range '" + text + "': expected a:b:n");
  Range r{to_double("range", parts[0]), to_double("range", parts[1]), to_int("range", parts[2])};
  if (r.count < 1) throw ConfigError("range '" + text + "': n must be at least 1");
  if (r.first < 0.0 || r.last < 0.0) throw ConfigError("range '" + text + "': periods must be nonnegative");
  return r;
}

SimulationMode parse_mode(const std::string& text) {
  if (text == "open") return SimulationMode::Open;
  if (text == "closed") return SimulationMode::Closed;
  if (text == "closed-quantized") return SimulationMode::ClosedQuantized;
  if (text == "closed-triggered") return SimulationMode::ClosedTriggered;
  throw ConfigError("unknown mode '" + text + "'");
}

}  // namespace r2dnet::cli
