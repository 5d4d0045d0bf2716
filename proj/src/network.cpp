#include "r2dnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "r2dnet/error.hpp"

namespace r2dnet {

namespace {

void check_betas(double beta1, double beta2) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !std::isfinite(beta1) || !std::isfinite(beta2)) {
    throw Error(ErrorKind::InvalidArgument, "beta1 and beta2 must be positive and finite");
  }
}

void check_deltas(const LoopIndices& idx) {
  auto ok = [](double d) { return d >= 0.0 && d < 1.0; };
  if (!ok(idx.delta_p) || !ok(idx.delta_c)) {
    throw Error(ErrorKind::InvalidArgument, "quantizer sector bounds must lie in [0, 1)");
  }
}

// Loss terms on the right-hand side of each stability inequality.
double plant_side_loss(const LoopIndices& idx, double beta1, double beta2) {
  const double dp = idx.delta_p;
  return (dp * dp + 2.0 * dp) * std::abs(idx.nu_c) + (1.0 + beta2 / 2.0) * dp * dp +
         1.0 / (2.0 * beta1);
}

double controller_side_loss(const LoopIndices& idx, double beta1, double beta2) {
  const double dc = idx.delta_c;
  return (dc * dc + 2.0 * dc) * std::abs(idx.nu_p) + (1.0 + beta1 / 2.0) * dc * dc +
         1.0 / (2.0 * beta2);
}

}  // namespace

NetworkConditionReport quantized_loop_report(const LoopIndices& idx, double beta1, double beta2) {
  check_betas(beta1, beta2);
  check_deltas(idx);
  NetworkConditionReport out;
  out.q1 = -(idx.rho_p + idx.nu_c) + plant_side_loss(idx, beta1, beta2);
  out.q2 = -(idx.rho_c + idx.nu_p) + controller_side_loss(idx, beta1, beta2);
  out.r1 = -idx.nu_p + idx.nu_p * idx.nu_p;
  out.r2 = -idx.nu_c + idx.nu_c * idx.nu_c;
  out.beta1 = beta1;
  out.beta2 = beta2;
  out.stable = out.q1 < 0.0 && out.q2 < 0.0;
  return out;
}

ControllerDesignCheck controller_design_check(const LoopIndices& idx, double beta1, double beta2) {
  check_betas(beta1, beta2);
  check_deltas(idx);
  const double dp = idx.delta_p;
  const double dc = idx.delta_c;
  ControllerDesignCheck out;
  const double lhs_plant = idx.nu_c - (dp * dp + 2.0 * dp) * std::abs(idx.nu_c);
  const double rhs_plant = -idx.rho_p + (1.0 + beta2 / 2.0) * dp * dp + 1.0 / (2.0 * beta1);
  const double rhs_controller = -idx.nu_p + (dc * dc + 2.0 * dc) * std::abs(idx.nu_p) +
                                (1.0 + beta1 / 2.0) * dc * dc + 1.0 / (2.0 * beta2);
  out.margin_plant_side = lhs_plant - rhs_plant;
  out.margin_controller_side = idx.rho_c - rhs_controller;
  out.holds = out.margin_plant_side > 0.0 && out.margin_controller_side > 0.0;
  return out;
}

std::optional<std::pair<double, double>> search_beta(const LoopIndices& idx) {
  check_deltas(idx);
  constexpr int kPoints = 29;
  double grid[kPoints];
  for (int k = 0; k < kPoints; ++k) grid[k] = std::pow(10.0, -3.0 + 0.25 * k);

  double best = 0.0;
  std::optional<std::pair<double, double>> arg;
  for (double beta1 : grid) {
    for (double beta2 : grid) {
      const auto report = quantized_loop_report(idx, beta1, beta2);
      const double margin = std::min(-report.q1, -report.q2);
      if (margin > best) {
        best = margin;
        arg = std::make_pair(beta1, beta2);
      }
    }
  }
  return arg;
}

TriggerParams trigger_params(const LoopIndices& idx, double beta1, double beta2, double theta1,
                             double theta2) {
  auto in_unit = [](double t) { return t > 0.0 && t < 1.0; };
  if (!in_unit(theta1) || !in_unit(theta2)) {
    throw Error(ErrorKind::InvalidArgument, "theta1 and theta2 must lie in (0, 1)");
  }
  const auto report = quantized_loop_report(idx, beta1, beta2);
  if (!(report.q1 < 0.0) || !(report.q2 < 0.0)) {
    throw Error(ErrorKind::QNotNegative, "q1 = " + std::to_string(report.q1) +
                                             ", q2 = " + std::to_string(report.q2));
  }
  TriggerParams out;
  out.q1 = report.q1;
  out.q2 = report.q2;
  out.theta1 = theta1;
  out.theta2 = theta2;
  out.nu_c = idx.nu_c;
  out.delta_p = idx.delta_p;
  out.eps_sq = std::abs(idx.nu_c) - idx.nu_c - 1.0 / (4.0 * theta2 * report.q2);
  const double gain = 1.0 + idx.delta_p;
  out.threshold_coeff = idx.nu_c * idx.nu_c / out.eps_sq - theta1 * report.q1 / (gain * gain);
  return out;
}

}  // namespace r2dnet
