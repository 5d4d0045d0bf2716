#pragma once

#include <optional>
#include <utility>

namespace r2dnet {

/// Passivity levels of plant and controller plus the sector bounds of the
/// quantizers on the plant output (delta_p) and controller output (delta_c).
struct LoopIndices {
  double rho_p = 0.0;
  double nu_p = 0.0;
  double rho_c = 0.0;
  double nu_c = 0.0;
  double delta_p = 0.0;
  double delta_c = 0.0;
};

struct NetworkConditionReport {
  double q1 = 0.0;
  double q2 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double beta1 = 0.0;
  double beta2 = 0.0;
  bool stable = false;
};

struct ControllerDesignCheck {
  bool holds = false;
  double margin_plant_side = 0.0;       // controller-side reading of q1: equals -q1
  double margin_controller_side = 0.0;  // equals -q2
};

/// Event-trigger constants for the quantized loop.
struct TriggerParams {
  double q1 = 0.0;
  double q2 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double eps_sq = 0.0;           // |nu_c| - nu_c - 1 / (4 theta2 q2)
  double threshold_coeff = 0.0;  // nu_c^2 / eps_sq - theta1 q1 / (1 + delta_p)^2
  double nu_c = 0.0;
  double delta_p = 0.0;
};

/// Quantization deficiencies of the loop:
///   q1 = -(rho_p + nu_c) + (dp^2 + 2 dp)|nu_c| + (1 + b2/2) dp^2 + 1/(2 b1)
///   q2 = -(rho_c + nu_p) + (dc^2 + 2 dc)|nu_p| + (1 + b1/2) dc^2 + 1/(2 b2)
/// and the reference-channel terms r1 = -nu_p + nu_p^2, r2 = -nu_c + nu_c^2.
/// The loop is L2-stable when q1 < 0 and q2 < 0.
NetworkConditionReport quantized_loop_report(const LoopIndices& idx, double beta1, double beta2);

/// The same inequalities arranged as requirements on the controller levels.
ControllerDesignCheck controller_design_check(const LoopIndices& idx, double beta1, double beta2);

/// Log grid over beta in [1e-3, 1e4], 29 points per axis. Returns the pair
/// maximizing min(-q1, -q2) when that minimum is positive; the first grid
/// point wins ties.
std::optional<std::pair<double, double>> search_beta(const LoopIndices& idx);

/// Throws QNotNegative unless q1 < 0 and q2 < 0.
TriggerParams trigger_params(const LoopIndices& idx, double beta1, double beta2, double theta1,
                             double theta2);

}  // namespace r2dnet
