#pragma once

#include <optional>

#include "r2dnet/roesser.hpp"
#include "r2dnet/trajectory.hpp"

namespace r2dnet {

/// Storage matrices of V = x_h' P_h x_h + x_v' P_v x_v.
struct LmiCertificate {
  Matrix p_h;
  Matrix p_v;
  double residual = 0.0;  // lambda_max of M(P_h, P_v)
};

/**
 * Dissipation inequality of a discrete Roesser model as a matrix function
 * affine in P = blockdiag(P_h, P_v):
 *
 *   M(P) = [[A'PA - P - C'QC,  A'PB - C'(S + QD)],
 *           [  *,              B'PB - D'QD - D'S - S'D - R]]
 *
 * [x; u]' M(P) [x; u] is the one-step storage increase minus the supply, so
 * M(P) <= 0 is the pointwise dissipation inequality for all states and inputs.
 */
class DissipationLmi {
 public:
  DissipationLmi(const DiscreteRoesser2D& disc, const QsrSupply& supply);

  Matrix evaluate(const Matrix& p_h, const Matrix& p_v) const;
  /// M(0, 0): the supply-only part.
  const Matrix& constant_term() const { return constant_; }

  int nh() const { return nh_; }
  int nv() const { return nv_; }
  int m() const { return m_; }
  int size() const { return nh_ + nv_ + m_; }

  /// max(1, ||M(0, 0)||_2); tolerances are relative to it.
  double scale() const { return scale_; }

 private:
  Matrix a_, b_, c_, d_;
  QsrSupply supply_;
  Matrix constant_;
  int nh_;
  int nv_;
  int m_;
  double scale_;
};

DissipationLmi build_dissipation_lmi(const DiscreteRoesser2D& disc, const QsrSupply& supply);

enum class FeasibilityStatus { Feasible, Infeasible, BudgetExceeded };

struct FeasibilityOptions {
  double tol = 1e-7;             // on lambda_max, relative to scale()
  int max_iterations = 2000;     // Newton steps
  double trace_bound = 1e6;      // tr(P_h) + tr(P_v) <= trace_bound * scale()
  double floor = 1e-8;           // P_h, P_v >= floor * scale() I
};

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  std::optional<LmiCertificate> certificate;
  double best_lambda_max = 0.0;  // smallest lambda_max(M) seen
  double lower_bound = 0.0;      // proven lower bound on min lambda_max(M)
  int iterations = 0;
};

/// Minimizes lambda_max(M(P)) over the box floor*I <= P, tr(P) <= bound with
/// a log-det barrier method. Any returned certificate has passed
/// validate_certificate.
FeasibilityResult lmi_feasible(const DissipationLmi& lmi, const FeasibilityOptions& options = {});

/// Independent eigenvalue check of a certificate; tol is relative to scale().
bool validate_certificate(const DissipationLmi& lmi, const LmiCertificate& cert,
                          double tol = 1e-7);

enum class RhoStatus { Ok, Clamped, Budget };

struct RhoMaximum {
  double rho = 0.0;
  RhoStatus status = RhoStatus::Ok;
  int solves = 0;
};

inline constexpr double kRhoSearchBound = 1e6;

/// Bisection for the largest rho with (-rho I, I/2, -nu I) feasible. For
/// nu < 0 the search starts at rho = -1/(4|nu|), the edge of the achievable
/// index domain; a result equal to that edge is reported as Clamped.
/// Throws InfeasibleEverywhere when the lower end is infeasible.
RhoMaximum maximize_rho(const DiscreteRoesser2D& disc, double nu, double tol_rho = 1e-3,
                        const FeasibilityOptions& options = {});

/// Checks the storage/supply inequality for every prefix rectangle
/// [0, N1') x [0, N2') of the trajectory, with absolute slack tol.
bool empirical_dissipativity_check(const Grid2DTrajectory& traj, const LmiCertificate& cert,
                                   const QsrSupply& supply, double tol);

/// sum of |x_h|^2 + |x_v|^2 + |u|^2 over the stored grid.
double trajectory_energy(const Grid2DTrajectory& traj);

}  // namespace r2dnet
