#include "r2dnet/dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "barrier_sdp.hpp"

namespace r2dnet {

namespace {

double max_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sym + sym.transpose()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

double min_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (sym + sym.transpose()),
                                               Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

// Basis of n x n symmetric matrices: diagonal units, then symmetric
// off-diagonal pairs.
std::vector<Matrix> symmetric_basis(int n) {
  std::vector<Matrix> basis;
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      Matrix e = Matrix::Zero(n, n);
      e(k, l) = 1.0;
      e(l, k) = 1.0;
      basis.push_back(std::move(e));
    }
  }
  return basis;
}

Matrix from_params(const std::vector<Matrix>& basis, const Eigen::VectorXd& w, Eigen::Index offset,
                   int n) {
  Matrix out = Matrix::Zero(n, n);
  for (size_t k = 0; k < basis.size(); ++k) {
    out += w(offset + static_cast<Eigen::Index>(k)) * basis[k];
  }
  return out;
}

double quad(const Matrix& p, const Vector& x) { return x.dot(p * x); }

}  // namespace

DissipationLmi::DissipationLmi(const DiscreteRoesser2D& disc, const QsrSupply& supply)
    : supply_(supply), nh_(disc.nh()), nv_(disc.nv()), m_(disc.m()) {
  disc.validate();
  supply.validate();
  if (supply.p() != disc.p() || supply.m() != disc.m()) {
    throw Error(ErrorKind::DimensionMismatch, "supply does not match the model's input/output sizes");
  }
  a_ = disc.a();
  b_ = disc.b();
  c_ = disc.c();
  d_ = disc.d;
  constant_ = evaluate(Matrix::Zero(nh_, nh_), Matrix::Zero(nv_, nv_));
  scale_ = 1.0;
  if (constant_.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(constant_, Eigen::EigenvaluesOnly);
    scale_ = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
  }
}

Matrix DissipationLmi::evaluate(const Matrix& p_h, const Matrix& p_v) const {
  if (p_h.rows() != nh_ || p_h.cols() != nh_ || p_v.rows() != nv_ || p_v.cols() != nv_) {
    throw Error(ErrorKind::DimensionMismatch, "storage matrices do not match the model");
  }
  const int n = nh_ + nv_;
  Matrix p = Matrix::Zero(n, n);
  p.topLeftCorner(nh_, nh_) = p_h;
  p.bottomRightCorner(nv_, nv_) = p_v;
  const Matrix& q = supply_.q;
  const Matrix& s = supply_.s;
  const Matrix& r = supply_.r;

  Matrix out(n + m_, n + m_);
  out.topLeftCorner(n, n) = a_.transpose() * p * a_ - p - c_.transpose() * q * c_;
  out.topRightCorner(n, m_) = a_.transpose() * p * b_ - c_.transpose() * (s + q * d_);
  out.bottomLeftCorner(m_, n) = out.topRightCorner(n, m_).transpose();
  out.bottomRightCorner(m_, m_) = b_.transpose() * p * b_ - d_.transpose() * q * d_ -
                                  d_.transpose() * s - s.transpose() * d_ - r;
  return 0.5 * (out + out.transpose());
}

DissipationLmi build_dissipation_lmi(const DiscreteRoesser2D& disc, const QsrSupply& supply) {
  return DissipationLmi(disc, supply);
}

bool validate_certificate(const DissipationLmi& lmi, const LmiCertificate& cert, double tol) {
  if (cert.p_h.rows() != lmi.nh() || cert.p_h.cols() != lmi.nh() || cert.p_v.rows() != lmi.nv() ||
      cert.p_v.cols() != lmi.nv()) {
    return false;
  }
  if (!cert.p_h.allFinite() || !cert.p_v.allFinite()) return false;
  if (lmi.nh() > 0 && !(min_eigenvalue(cert.p_h) > 0.0)) return false;
  if (lmi.nv() > 0 && !(min_eigenvalue(cert.p_v) > 0.0)) return false;
  return max_eigenvalue(lmi.evaluate(cert.p_h, cert.p_v)) <= tol * lmi.scale();
}

FeasibilityResult lmi_feasible(const DissipationLmi& lmi, const FeasibilityOptions& options) {
  if (!(options.tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
  const int nh = lmi.nh();
  const int nv = lmi.nv();
  const int size = lmi.size();
  const double scale = lmi.scale();
  const double tol_abs = options.tol * scale;
  const double floor = options.floor * scale;
  const double trace_cap = options.trace_bound * scale;

  const auto basis_h = symmetric_basis(nh);
  const auto basis_v = symmetric_basis(nv);
  const Eigen::Index nz = static_cast<Eigen::Index>(basis_h.size() + basis_v.size());
  const Eigen::Index nvars = nz + 1;  // storage parameters, then t

  detail::BarrierProblem problem;
  problem.cost = Eigen::VectorXd::Zero(nvars);
  problem.cost(nz) = 1.0;

  // t I - M(P) > 0
  detail::AffineMatrix epigraph;
  epigraph.constant = -lmi.constant_term();
  for (const auto& e : basis_h) {
    epigraph.coeffs.push_back(-(lmi.evaluate(e, Matrix::Zero(nv, nv)) - lmi.constant_term()));
  }
  for (const auto& e : basis_v) {
    epigraph.coeffs.push_back(-(lmi.evaluate(Matrix::Zero(nh, nh), e) - lmi.constant_term()));
  }
  epigraph.coeffs.push_back(Matrix::Identity(size, size));
  problem.constraints.push_back(std::move(epigraph));

  // P_h - floor I > 0 and P_v - floor I > 0
  auto floor_constraint = [&](const std::vector<Matrix>& basis, int n, Eigen::Index offset) {
    detail::AffineMatrix g;
    g.constant = -floor * Matrix::Identity(n, n);
    g.coeffs.assign(static_cast<size_t>(nvars), Matrix::Zero(n, n));
    for (size_t k = 0; k < basis.size(); ++k) g.coeffs[static_cast<size_t>(offset) + k] = basis[k];
    return g;
  };
  if (nh > 0) problem.constraints.push_back(floor_constraint(basis_h, nh, 0));
  if (nv > 0) {
    problem.constraints.push_back(
        floor_constraint(basis_v, nv, static_cast<Eigen::Index>(basis_h.size())));
  }

  // tr(P_h) + tr(P_v) < trace_cap
  detail::AffineMatrix cap;
  cap.constant = Matrix::Constant(1, 1, trace_cap);
  cap.coeffs.assign(static_cast<size_t>(nvars), Matrix::Zero(1, 1));
  for (size_t k = 0; k < basis_h.size(); ++k) cap.coeffs[k](0, 0) = -basis_h[k].trace();
  for (size_t k = 0; k < basis_v.size(); ++k) {
    cap.coeffs[basis_h.size() + k](0, 0) = -basis_v[k].trace();
  }
  problem.constraints.push_back(std::move(cap));

  // Start from P = s0 I, which lies inside the box.
  const double s0 = std::min(std::max(1.0, 100.0 * floor), trace_cap / (4.0 * (nh + nv)));
  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(nvars);
  {
    Eigen::Index k = 0;
    for (int a = 0; a < nh; ++a) {
      for (int b = a; b < nh; ++b, ++k) w0(k) = (a == b) ? s0 : 0.0;
    }
    for (int a = 0; a < nv; ++a) {
      for (int b = a; b < nv; ++b, ++k) w0(k) = (a == b) ? s0 : 0.0;
    }
  }
  const Matrix p0h = s0 * Matrix::Identity(nh, nh);
  const Matrix p0v = s0 * Matrix::Identity(nv, nv);
  w0(nz) = max_eigenvalue(lmi.evaluate(p0h, p0v)) + scale;

  FeasibilityResult result;
  result.best_lambda_max = std::numeric_limits<double>::infinity();
  LmiCertificate best;
  auto storage = [&](const Eigen::VectorXd& w) {
    return std::make_pair(from_params(basis_h, w, 0, nh),
                          from_params(basis_v, w, static_cast<Eigen::Index>(basis_h.size()), nv));
  };
  auto accept = [&](const Eigen::VectorXd& w) {
    auto [p_h, p_v] = storage(w);
    const double lambda = max_eigenvalue(lmi.evaluate(p_h, p_v));
    if (lambda < result.best_lambda_max) {
      result.best_lambda_max = lambda;
      best = LmiCertificate{std::move(p_h), std::move(p_v), lambda};
    }
    return lambda <= 0.0;
  };

  detail::BarrierOptions barrier;
  barrier.mu0 = 1.0 / scale;
  barrier.gap_tol = 1e-3 * tol_abs;
  barrier.lower_bound_stop = tol_abs;
  barrier.max_iterations = options.max_iterations;
  const auto outcome = detail::solve_barrier(problem, w0, barrier, accept);
  result.iterations = outcome.iterations;
  result.lower_bound = outcome.lower_bound;

  if (result.best_lambda_max <= tol_abs && validate_certificate(lmi, best, options.tol)) {
    best.residual = max_eigenvalue(lmi.evaluate(best.p_h, best.p_v));
    result.status = FeasibilityStatus::Feasible;
    result.certificate = std::move(best);
    return result;
  }
  result.status = outcome.stop == detail::BarrierStop::Budget ? FeasibilityStatus::BudgetExceeded
                                                              : FeasibilityStatus::Infeasible;
  return result;
}

RhoMaximum maximize_rho(const DiscreteRoesser2D& disc, double nu, double tol_rho,
                        const FeasibilityOptions& options) {
  if (!(tol_rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "tol_rho must be positive");
  if (disc.m() != disc.p()) {
    throw Error(ErrorKind::DimensionMismatch, "passivity levels need a square model (m = p)");
  }
  RhoMaximum out;
  bool budget_hit = false;
  auto feasible = [&](double rho) {
    const DissipationLmi lmi(disc, indices_to_qsr(PassivityIndices{rho, nu}, disc.p()));
    const auto result = lmi_feasible(lmi, options);
    ++out.solves;
    if (result.status == FeasibilityStatus::BudgetExceeded) budget_hit = true;
    return result.status == FeasibilityStatus::Feasible;
  };

  const double rho_lo = nu < 0.0 ? -1.0 / (4.0 * std::abs(nu)) : -kRhoSearchBound;
  double lo = rho_lo;
  double hi = kRhoSearchBound;
  if (!feasible(lo)) {
    throw Error(ErrorKind::InfeasibleEverywhere,
                "no storage certifies rho = " + std::to_string(lo) + " at nu = " + std::to_string(nu));
  }
  if (feasible(hi)) {
    out.rho = hi;
    out.status = budget_hit ? RhoStatus::Budget : RhoStatus::Ok;
    return out;
  }
  while (hi - lo > tol_rho) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  out.rho = lo;
  if (budget_hit) {
    out.status = RhoStatus::Budget;
  } else if (nu < 0.0 && lo == rho_lo) {
    out.status = RhoStatus::Clamped;
  }
  return out;
}

bool empirical_dissipativity_check(const Grid2DTrajectory& traj, const LmiCertificate& cert,
                                   const QsrSupply& supply, double tol) {
  const int n1 = traj.n1;
  const int n2 = traj.n2;
  if (n1 == 0 || n2 == 0) return true;

  // supply_sum(a, b) = sum of the supply over i < a, j < b.
  Matrix supply_sum = Matrix::Zero(n1 + 1, n2 + 1);
  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      const Vector& y = traj.y(i, j);
      const Vector& u = traj.u(i, j);
      const double w = y.dot(supply.q * y) + 2.0 * y.dot(supply.s * u) + u.dot(supply.r * u);
      supply_sum(i + 1, j + 1) = w + supply_sum(i, j + 1) + supply_sum(i + 1, j) - supply_sum(i, j);
    }
  }
  // vertical(a, b) = sum_{i < a} [V_v(x_v(i, b)) - V_v(x_v(i, 0))]
  Matrix vertical = Matrix::Zero(n1 + 1, n2 + 1);
  for (int b = 0; b <= n2; ++b) {
    for (int i = 0; i < n1; ++i) {
      vertical(i + 1, b) = vertical(i, b) + quad(cert.p_v, traj.xv(i, b)) - quad(cert.p_v, traj.xv(i, 0));
    }
  }
  // horizontal(a, b) = sum_{j < b} [V_h(x_h(a, j)) - V_h(x_h(0, j))]
  Matrix horizontal = Matrix::Zero(n1 + 1, n2 + 1);
  for (int a = 0; a <= n1; ++a) {
    for (int j = 0; j < n2; ++j) {
      horizontal(a, j + 1) =
          horizontal(a, j) + quad(cert.p_h, traj.xh(a, j)) - quad(cert.p_h, traj.xh(0, j));
    }
  }
  for (int a = 1; a <= n1; ++a) {
    for (int b = 1; b <= n2; ++b) {
      if (vertical(a, b) + horizontal(a, b) > supply_sum(a, b) + tol) return false;
    }
  }
  return true;
}

double trajectory_energy(const Grid2DTrajectory& traj) {
  double energy = 0.0;
  for (int i = 0; i < traj.n1; ++i) {
    for (int j = 0; j < traj.n2; ++j) {
      energy += traj.xh(i, j).squaredNorm() + traj.xv(i, j).squaredNorm() + traj.u(i, j).squaredNorm();
    }
  }
  return energy;
}

}  // namespace r2dnet
