#include "r2dnet/roesser.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace r2dnet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NonCanonicalSupply: return "NonCanonicalSupply";
    case ErrorKind::ZeroGain: return "ZeroGain";
    case ErrorKind::InfeasibleEverywhere: return "InfeasibleEverywhere";
    case ErrorKind::QNotNegative: return "QNotNegative";
    case ErrorKind::AlgebraicLoop: return "AlgebraicLoop";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
  }
  return "Unknown";
}

namespace {

void expect_shape(const Matrix& mat, int rows, int cols, const char* name) {
  if (mat.rows() != rows || mat.cols() != cols) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(name) + " is " + std::to_string(mat.rows()) + "x" +
                    std::to_string(mat.cols()) + ", expected " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  if (!mat.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue, std::string(name) + " has non-finite entries");
  }
}

bool is_symmetric(const Matrix& mat, double tol) {
  return mat.rows() == mat.cols() && (mat - mat.transpose()).cwiseAbs().maxCoeff() <= tol;
}

// Scalar c with mat == c I, if any.
std::optional<double> identity_multiple(const Matrix& mat, double tol) {
  if (mat.rows() != mat.cols() || mat.rows() == 0) return std::nullopt;
  const double c = mat(0, 0);
  const Matrix residual = mat - c * Matrix::Identity(mat.rows(), mat.cols());
  if (residual.cwiseAbs().maxCoeff() > tol) return std::nullopt;
  return c;
}

template <class Model>
Model partition(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, int nh) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n || nh < 0 || nh > n || b.rows() != n || c.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "full matrices are not conformable");
  }
  const int nv = n - nh;
  Model model;
  model.a11 = a.topLeftCorner(nh, nh);
  model.a12 = a.topRightCorner(nh, nv);
  model.a21 = a.bottomLeftCorner(nv, nh);
  model.a22 = a.bottomRightCorner(nv, nv);
  model.b1 = b.topRows(nh);
  model.b2 = b.bottomRows(nv);
  model.c1 = c.leftCols(nh);
  model.c2 = c.rightCols(nv);
  model.d = d;
  model.validate();
  return model;
}

}  // namespace

void SamplingSpec::validate() const {
  if (!std::isfinite(h1) || !std::isfinite(h2) || h1 < 0.0 || h2 < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "sampling periods must be finite and nonnegative");
  }
}

Matrix RoesserBlocks::a() const {
  Matrix full(nh() + nv(), nh() + nv());
  full << a11, a12, a21, a22;
  return full;
}

Matrix RoesserBlocks::b() const {
  Matrix full(nh() + nv(), m());
  full << b1, b2;
  return full;
}

Matrix RoesserBlocks::c() const {
  Matrix full(p(), nh() + nv());
  full << c1, c2;
  return full;
}

void RoesserBlocks::validate() const {
  const int h = nh();
  const int v = nv();
  const int inputs = m();
  const int outputs = p();
  if (h + v == 0) throw Error(ErrorKind::DimensionMismatch, "model has no states");
  expect_shape(a11, h, h, "A11");
  expect_shape(a12, h, v, "A12");
  expect_shape(a21, v, h, "A21");
  expect_shape(a22, v, v, "A22");
  expect_shape(b1, h, inputs, "B1");
  expect_shape(b2, v, inputs, "B2");
  expect_shape(c1, outputs, h, "C1");
  expect_shape(c2, outputs, v, "C2");
  expect_shape(d, outputs, inputs, "D");
}

ContinuousRoesser2D make_continuous(const Matrix& a, const Matrix& b, const Matrix& c,
                                    const Matrix& d, int nh) {
  return partition<ContinuousRoesser2D>(a, b, c, d, nh);
}

DiscreteRoesser2D make_discrete(const Matrix& a, const Matrix& b, const Matrix& c,
                                const Matrix& d, int nh) {
  return partition<DiscreteRoesser2D>(a, b, c, d, nh);
}

void QsrSupply::validate() const {
  if (q.rows() != q.cols() || r.rows() != r.cols() || s.rows() != q.rows() ||
      s.cols() != r.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "supply matrices are not conformable");
  }
  if (!q.allFinite() || !s.allFinite() || !r.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue, "supply has non-finite entries");
  }
  if (!is_symmetric(q, 1e-12) || !is_symmetric(r, 1e-12)) {
    throw Error(ErrorKind::InvalidArgument, "Q and R must be symmetric");
  }
}

BoundaryConditions BoundaryConditions::constant(const Vector& xh, int n2, const Vector& xv,
                                                int n1) {
  BoundaryConditions bc;
  bc.xh0.assign(static_cast<size_t>(n2), xh);
  bc.xv0.assign(static_cast<size_t>(n1), xv);
  return bc;
}

ContinuousRoesser2D pde_to_roesser(const Pde2ndOrderSpec& spec) {
  return pde_to_roesser(spec, Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

ContinuousRoesser2D pde_to_roesser(const Pde2ndOrderSpec& spec, const Matrix& c1,
                                   const Matrix& c2, const Matrix& d) {
  ContinuousRoesser2D model;
  model.a11 = Matrix::Constant(1, 1, spec.a1);
  model.a12 = Matrix::Constant(1, 1, spec.a1 * spec.a2 + spec.a0);
  model.a21 = Matrix::Constant(1, 1, 1.0);
  model.a22 = Matrix::Constant(1, 1, spec.a2);
  model.b1 = Matrix::Constant(1, 1, spec.b);
  model.b2 = Matrix::Zero(1, 1);
  model.c1 = c1;
  model.c2 = c2;
  model.d = d;
  model.validate();
  return model;
}

BoundaryConditions boundary_from_pde(const Pde2ndOrderSpec& spec) {
  if (spec.boundary_q.size() != spec.boundary_dq.size()) {
    throw Error(ErrorKind::DimensionMismatch, "q and dq/dt boundary sequences differ in length");
  }
  BoundaryConditions bc;
  bc.xh0.reserve(spec.boundary_q.size());
  for (size_t j = 0; j < spec.boundary_q.size(); ++j) {
    const double r0 = spec.boundary_dq[j] - spec.a2 * spec.boundary_q[j];
    if (!std::isfinite(r0)) throw Error(ErrorKind::NonFiniteValue, "non-finite q boundary");
    bc.xh0.push_back(Vector::Constant(1, r0));
  }
  bc.xv0.reserve(spec.boundary_p.size());
  for (double value : spec.boundary_p) {
    if (!std::isfinite(value)) throw Error(ErrorKind::NonFiniteValue, "non-finite p boundary");
    bc.xv0.push_back(Vector::Constant(1, value));
  }
  return bc;
}

QsrSupply indices_to_qsr(const PassivityIndices& idx, int dim) {
  if (dim <= 0) throw Error(ErrorKind::InvalidArgument, "supply dimension must be positive");
  const Matrix eye = Matrix::Identity(dim, dim);
  return QsrSupply{-idx.rho * eye, 0.5 * eye, -idx.nu * eye};
}

QsrSupply fgs_supply(double gamma, int dim) {
  if (dim <= 0) throw Error(ErrorKind::InvalidArgument, "supply dimension must be positive");
  const Matrix eye = Matrix::Identity(dim, dim);
  return QsrSupply{-eye, Matrix::Zero(dim, dim), gamma * gamma * eye};
}

PassivityIndices qsr_to_indices(const QsrSupply& supply) {
  constexpr double tol = 1e-9;
  const auto q = identity_multiple(supply.q, tol);
  const auto r = identity_multiple(supply.r, tol);
  const bool half_identity =
      supply.s.rows() == supply.s.cols() && supply.s.rows() == supply.q.rows() &&
      (supply.s - 0.5 * Matrix::Identity(supply.s.rows(), supply.s.cols())).cwiseAbs().maxCoeff() <=
          tol;
  if (!q || !r || !half_identity || supply.q.rows() != supply.r.rows()) {
    throw Error(ErrorKind::NonCanonicalSupply, "supply is not of the form (qI, I/2, rI)");
  }
  return PassivityIndices{-*q, -*r};
}

IndexDomain validate_index_domain(double rho, double nu) {
  const double product = rho * nu;
  if (product < 0.25) return IndexDomain::InOmega1;
  if (product == 0.25 && rho > 0.0) return IndexDomain::InOmega2;
  return IndexDomain::Outside;
}

double static_gain_indices(double k, double nu) {
  if (k == 0.0) throw Error(ErrorKind::ZeroGain, "static gain must be nonzero");
  // -rho k^2 u^2 + k u^2 - nu u^2 >= 0 for all u.
  return (k - nu) / (k * k);
}

double max_real_eig_a11(const ContinuousRoesser2D& model) {
  if (model.a11.size() == 0) throw Error(ErrorKind::DimensionMismatch, "A11 is empty");
  if (!model.a11.allFinite()) throw Error(ErrorKind::NonFiniteValue, "A11 has non-finite entries");
  Eigen::EigenSolver<Matrix> solver(model.a11, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NonFiniteValue, "eigenvalue computation failed");
  }
  return solver.eigenvalues().real().maxCoeff();
}

std::pair<double, double> feedback_margins(const PassivityIndices& plant,
                                           const PassivityIndices& controller) {
  return {controller.nu + plant.rho, plant.nu + controller.rho};
}

bool feedback_indices_stable(const PassivityIndices& plant, const PassivityIndices& controller) {
  const auto [first, second] = feedback_margins(plant, controller);
  return first > 0.0 && second > 0.0;
}

}  // namespace r2dnet
