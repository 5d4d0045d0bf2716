#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "r2dnet/error.hpp"

namespace r2dnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Horizontal and vertical sampling periods of a sample-and-hold scheme.
struct SamplingSpec {
  double h1 = 0.0;
  double h2 = 0.0;

  /// Throws InvalidArgument unless both periods are finite and nonnegative.
  void validate() const;
};

/**
 * Block matrices of a linear Roesser model
 *
 *   x_h' = A11 x_h + A12 x_v + B1 u
 *   x_v' = A21 x_h + A22 x_v + B2 u
 *   y    = C1 x_h  + C2 x_v  + D u
 *
 * where ' is the partial derivative (continuous) or the forward shift
 * (discrete) along the horizontal resp. vertical coordinate.
 */
struct RoesserBlocks {
  Matrix a11, a12, a21, a22;
  Matrix b1, b2;
  Matrix c1, c2;
  Matrix d;

  int nh() const { return static_cast<int>(a11.rows()); }
  int nv() const { return static_cast<int>(a22.rows()); }
  int m() const { return static_cast<int>(b1.cols()); }
  int p() const { return static_cast<int>(c1.rows()); }

  /// Full state matrix [[A11, A12], [A21, A22]].
  Matrix a() const;
  /// Stacked input matrix [B1; B2].
  Matrix b() const;
  /// Output matrix [C1, C2].
  Matrix c() const;

  /// Checks dimension consistency and finiteness; throws on violation.
  void validate() const;
};

struct ContinuousRoesser2D : RoesserBlocks {};

struct DiscreteRoesser2D : RoesserBlocks {
  /// Present when the model was obtained by sampling a continuous model.
  std::optional<SamplingSpec> sampling;
};

/// Builds a model from full matrices partitioned at (nh, nv).
ContinuousRoesser2D make_continuous(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d, int nh);
DiscreteRoesser2D make_discrete(const Matrix& a, const Matrix& b, const Matrix& c,
                                const Matrix& d, int nh);

/// Supply-rate matrices of w(u, y) = y'Qy + 2 y'Su + u'Ru.
struct QsrSupply {
  Matrix q;  // p x p, symmetric
  Matrix s;  // p x m
  Matrix r;  // m x m, symmetric

  void validate() const;
  int p() const { return static_cast<int>(q.rows()); }
  int m() const { return static_cast<int>(r.rows()); }
};

/// IF-OFP levels: (-rho I, I/2, -nu I)-dissipativity.
struct PassivityIndices {
  double rho = 0.0;
  double nu = 0.0;
};

enum class IndexDomain { InOmega1, InOmega2, Outside };

/// Second-order hyperbolic PDE s_xt = a1 s_t + a2 s_x + a0 s + b f with
/// boundary samples s(0, t_j) = q(t_j), dq/dt(t_j), s(x_i, 0) = p(x_i).
struct Pde2ndOrderSpec {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double b = 0.0;
  std::vector<double> boundary_q;
  std::vector<double> boundary_dq;
  std::vector<double> boundary_p;
};

/// Boundary data of a 2-D grid: x_h(0, j) for j < n2 and x_v(i, 0) for i < n1.
struct BoundaryConditions {
  std::vector<Vector> xh0;
  std::vector<Vector> xv0;

  /// Constant boundary of the given lengths.
  static BoundaryConditions constant(const Vector& xh, int n2, const Vector& xv, int n1);
};

/// Roesser form of the PDE with r = s_t - a2 s as horizontal and s as
/// vertical state. Output defaults to y = r + s with no feedthrough.
ContinuousRoesser2D pde_to_roesser(const Pde2ndOrderSpec& spec);
ContinuousRoesser2D pde_to_roesser(const Pde2ndOrderSpec& spec, const Matrix& c1,
                                   const Matrix& c2, const Matrix& d);

/// x_h(0, j) = dq(t_j) - a2 q(t_j), x_v(i, 0) = p(x_i).
BoundaryConditions boundary_from_pde(const Pde2ndOrderSpec& spec);

QsrSupply indices_to_qsr(const PassivityIndices& idx, int dim);
/// (-I, 0, gamma^2 I): finite L2 gain gamma.
QsrSupply fgs_supply(double gamma, int dim);
/// Inverse of indices_to_qsr; throws NonCanonicalSupply when Q, R are not
/// scalar multiples of I or S != I/2 (tolerance 1e-9).
PassivityIndices qsr_to_indices(const QsrSupply& supply);

IndexDomain validate_index_domain(double rho, double nu);

/// Largest rho for which the static map y = k u is IF-OFP(rho, nu).
double static_gain_indices(double k, double nu);

double max_real_eig_a11(const ContinuousRoesser2D& model);

/// Margins (nu_c + rho_p, nu_p + rho_c) of the interconnection condition.
std::pair<double, double> feedback_margins(const PassivityIndices& plant,
                                           const PassivityIndices& controller);
bool feedback_indices_stable(const PassivityIndices& plant, const PassivityIndices& controller);

}  // namespace r2dnet
