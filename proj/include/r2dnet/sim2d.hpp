#pragma once

#include <functional>
#include <optional>
#include <span>
#include <variant>

#include "r2dnet/network.hpp"
#include "r2dnet/quantize.hpp"
#include "r2dnet/roesser.hpp"
#include "r2dnet/trajectory.hpp"

namespace r2dnet {

/// Signal on the grid; an empty function is the zero field.
using InputField = std::function<Vector(int i, int j)>;

/// y_c = k u_c.
struct StaticGain {
  double k = 0.0;
};

struct DynamicController {
  DiscreteRoesser2D model;
  BoundaryConditions boundary;
};

using ControllerSpec = std::variant<StaticGain, DynamicController>;

struct ClosedLoopOptions {
  std::optional<LogQuantizerSpec> plant_quantizer;       // Q_p on the plant output
  std::optional<LogQuantizerSpec> controller_quantizer;  // Q_c on the controller output
  std::optional<TriggerParams> trigger;                  // needs plant_quantizer
  InputField r_p;
  InputField r_c;
};

/// States with magnitude above this abort the run with NonFiniteStateError.
inline constexpr double kDivergenceLimit = 1e12;

/// Runs the Roesser recursion column by column (outer j, inner i).
Grid2DTrajectory simulate_open_loop(const DiscreteRoesser2D& disc, const BoundaryConditions& bc,
                                    const InputField& input, int n1, int n2);

/// Feedback loop u_p = r_p - Q_c(y_c), u_c = r_c + Q_p(y_p(., j_k)).
///
/// Without a trigger every column is transmitted. With one, column 0 is
/// always transmitted; each later column is first computed with the held
/// values and, when the trigger rule fires on that column, recomputed with
/// the fresh values transmitted at j itself.
Grid2DTrajectory simulate_closed_loop(const DiscreteRoesser2D& disc, const ControllerSpec& ctrl,
                                      const ClosedLoopOptions& options,
                                      const BoundaryConditions& bc, int n1, int n2);

/// Event rule over one column:
///   sum_i |eps e_i + (nu_c / eps) current_i|^2 > threshold_coeff sum_i |current_i|^2
/// with e = current - held and eps = sqrt(eps_sq).
bool trigger_step(const TriggerParams& params, std::span<const Vector> current,
                  std::span<const Vector> held);

/// Largest pointwise residual of the plant recursion and output equations,
/// recomputed from the stored trajectory.
double recursion_residual(const DiscreteRoesser2D& disc, const Grid2DTrajectory& traj);

enum class OutputSelection { Plant, Transmitted };

struct GainEstimate {
  double gamma_sq = 0.0;
  double offset = 0.0;
  /// False when the fit over the first half of the prefixes disagrees with
  /// the full fit, i.e. the energy series has not settled.
  bool converged = true;
};

/// Least-squares fit of cumulative output energy against cumulative
/// reference energy over growing column prefixes.
GainEstimate estimate_l2_gain(const Grid2DTrajectory& traj, const InputField& reference,
                              OutputSelection selection = OutputSelection::Plant);

}  // namespace r2dnet
