#pragma once

// Small dense SDP in inequality form,
//   minimize c'w  subject to  G_k(w) = F_k0 + sum_l w_l F_kl > 0,
// solved by a log-det barrier method with damped Newton centering.

#include <functional>
#include <vector>

#include <Eigen/Core>

namespace r2dnet::detail {

struct AffineMatrix {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> coeffs;  // one per variable
};

struct BarrierProblem {
  Eigen::VectorXd cost;
  std::vector<AffineMatrix> constraints;
};

struct BarrierOptions {
  double mu0 = 1.0;
  double mu_factor = 10.0;
  double gap_tol = 1e-10;
  /// Stop once the proven lower bound on the optimum exceeds this value.
  double lower_bound_stop = 0.0;
  int max_iterations = 2000;
};

enum class BarrierStop { Accepted, Converged, LowerBoundAbove, Budget };

struct BarrierOutcome {
  Eigen::VectorXd w;
  BarrierStop stop = BarrierStop::Budget;
  int iterations = 0;
  double lower_bound = -1e300;
};

/// w0 must be strictly feasible. `accept` is called on every iterate and
/// ends the solve early when it returns true.
BarrierOutcome solve_barrier(const BarrierProblem& problem, const Eigen::VectorXd& w0,
                             const BarrierOptions& options,
                             const std::function<bool(const Eigen::VectorXd&)>& accept);

}  // namespace r2dnet::detail
