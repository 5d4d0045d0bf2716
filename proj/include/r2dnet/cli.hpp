#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "r2dnet/discretize.hpp"
#include "r2dnet/roesser.hpp"
#include "r2dnet/sim2d.hpp"

namespace r2dnet::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConditionFailed = 1,
  kConfigError = 2,
  kSearchExhausted = 3,
};

/// Malformed or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlantKind { Pde, Roesser };

/// Flat key=value run description (see configs/heat_exchanger.cfg).
struct RunConfig {
  PlantKind plant_kind = PlantKind::Pde;
  // PDE coefficients and boundary q(t) = q, dq/dt = dq, p(x) = p_scale exp(p_rate x).
  double a0 = 1.0, a1 = 1.0, a2 = -1.0, b = 1.0;
  double boundary_q = 1.0, boundary_dq = 0.0, boundary_p_scale = 1.0, boundary_p_rate = -1.0;
  // Explicit Roesser model (plant.kind = roesser) or output override (pde).
  Matrix a, bmat, c, d;
  std::optional<Matrix> c1, c2, d_override;
  int nh = 1;
  Vector boundary_xh0, boundary_xv0;

  SamplingSpec sampling{0.1, 0.1};
  double nu_p = -0.1;
  std::optional<double> rho_p;  // nullopt: computed by maximize_rho
  double controller_k = 3.0;
  double nu_c = 1.5;
  std::optional<double> rho_c;  // nullopt: static_gain_indices(k, nu_c)
  double delta_p = 0.04, delta_c = 0.04;
  double dead_zone_p = 0.0, dead_zone_c = 0.0;
  bool beta_search = false;
  double beta1 = 36.0, beta2 = 56.0;
  double theta1 = 0.5, theta2 = 0.5;
  int n1 = 40, n2 = 300;
  std::string out_dir = ".";
  double lmi_tol = 1e-7;
  double rho_tol = 1e-3;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// Canonical text form; parse_config(dump_config(c)) reproduces c exactly.
std::string dump_config(const RunConfig& config);

ContinuousRoesser2D plant_model(const RunConfig& config);
DiscreteRoesser2D sampled_plant(const RunConfig& config);
BoundaryConditions plant_boundary(const RunConfig& config);

struct Range {
  double first = 0.0;
  double last = 0.0;
  int count = 1;

  double at(int k) const;
};
/// Parses "a:b:n".
Range parse_range(const std::string& text);

enum class SimulationMode { Open, Closed, ClosedQuantized, ClosedTriggered };
SimulationMode parse_mode(const std::string& text);

/// %.17g, the CSV number format.
std::string format_number(double value);

int cmd_discretize(const RunConfig& config, std::ostream& log);
int cmd_sweep_rho(const RunConfig& config, const Range& h1, const Range& h2, std::ostream& log);
int cmd_simulate(const RunConfig& config, SimulationMode mode, std::ostream& log);
int cmd_check(const RunConfig& config, std::ostream& log);

}  // namespace r2dnet::cli
