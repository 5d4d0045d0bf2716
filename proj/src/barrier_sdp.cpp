#include "barrier_sdp.hpp"

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>

namespace r2dnet::detail {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd evaluate(const AffineMatrix& g, const VectorXd& w) {
  MatrixXd out = g.constant;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) != 0.0) out.noalias() += w(k) * g.coeffs[static_cast<size_t>(k)];
  }
  return 0.5 * (out + out.transpose());
}

// -sum log det G_k(w), or nullopt outside the feasible region.
std::optional<double> barrier_value(const BarrierProblem& problem, const VectorXd& w) {
  double value = 0.0;
  for (const auto& g : problem.constraints) {
    Eigen::LLT<MatrixXd> llt(evaluate(g, w));
    if (llt.info() != Eigen::Success) return std::nullopt;
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) return std::nullopt;
      value -= 2.0 * std::log(diag(i));
    }
  }
  return value;
}

}  // namespace

BarrierOutcome solve_barrier(const BarrierProblem& problem, const VectorXd& w0,
                             const BarrierOptions& options,
                             const std::function<bool(const VectorXd&)>& accept) {
  const Eigen::Index n = w0.size();
  double degree = 0.0;
  for (const auto& g : problem.constraints) degree += static_cast<double>(g.constant.rows());

  BarrierOutcome out;
  out.w = w0;
  if (accept(out.w)) {
    out.stop = BarrierStop::Accepted;
    return out;
  }

  double mu = options.mu0;
  while (true) {
    // Centering: minimize mu c'w + barrier(w).
    while (true) {
      if (out.iterations >= options.max_iterations) {
        out.stop = BarrierStop::Budget;
        return out;
      }
      VectorXd grad = mu * problem.cost;
      MatrixXd hess = MatrixXd::Zero(n, n);
      std::vector<MatrixXd> solved(static_cast<size_t>(n));
      for (const auto& g : problem.constraints) {
        Eigen::LLT<MatrixXd> llt(evaluate(g, out.w));
        for (Eigen::Index k = 0; k < n; ++k) {
          solved[static_cast<size_t>(k)] = llt.solve(g.coeffs[static_cast<size_t>(k)]);
          grad(k) -= solved[static_cast<size_t>(k)].trace();
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          for (Eigen::Index l = k; l < n; ++l) {
            const double h = solved[static_cast<size_t>(k)]
                                 .cwiseProduct(solved[static_cast<size_t>(l)].transpose())
                                 .sum();
            hess(k, l) += h;
            if (l != k) hess(l, k) += h;
          }
        }
      }
      const VectorXd step = -hess.ldlt().solve(grad);
      const double decrement_sq = -grad.dot(step);
      if (!std::isfinite(decrement_sq) || decrement_sq / 2.0 < 1e-10) break;

      const double f0 = mu * problem.cost.dot(out.w) + *barrier_value(problem, out.w);
      double alpha = 1.0;
      bool moved = false;
      while (alpha > 1e-14) {
        const VectorXd trial = out.w + alpha * step;
        const auto barrier = barrier_value(problem, trial);
        if (barrier && mu * problem.cost.dot(trial) + *barrier <= f0 - 0.25 * alpha * decrement_sq) {
          out.w = trial;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++out.iterations;
      if (!moved) break;
      if (accept(out.w)) {
        out.stop = BarrierStop::Accepted;
        return out;
      }
    }

    const double gap = degree / mu;
    out.lower_bound = problem.cost.dot(out.w) - gap;
    if (out.lower_bound > options.lower_bound_stop) {
      out.stop = BarrierStop::LowerBoundAbove;
      return out;
    }
    if (gap < options.gap_tol) {
      out.stop = BarrierStop::Converged;
      return out;
    }
    mu *= options.mu_factor;
  }
}

}  // namespace r2dnet::detail
