#include "r2dnet/discretize.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

namespace r2dnet {

namespace {

double min_eigenvalue(const Matrix& mat) {
  const Matrix sym = 0.5 * (mat + mat.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double max_singular_value(const Matrix& mat) {
  if (mat.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(mat);
  return svd.singularValues()(0);
}

// exp(A h) and phi(A, h) from one augmented exponential.
std::pair<Matrix, Matrix> exp_and_phi(const Matrix& a, double h) {
  const Eigen::Index n = a.rows();
  if (n == 0) return {Matrix(0, 0), Matrix(0, 0)};
  Matrix augmented = Matrix::Zero(2 * n, 2 * n);
  augmented.topLeftCorner(n, n) = a * h;
  augmented.topRightCorner(n, n) = Matrix::Identity(n, n) * h;
  const Matrix expo = augmented.exp();
  if (!expo.allFinite()) {
    throw Error(ErrorKind::NonFiniteValue, "matrix exponential overflowed");
  }
  return {expo.topLeftCorner(n, n), expo.topRightCorner(n, n)};
}

void check_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorKind::InvalidArgument, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

Matrix phi_integral(const Matrix& a, double h) {
  if (a.rows() != a.cols()) throw Error(ErrorKind::DimensionMismatch, "matrix must be square");
  if (!a.allFinite() || !std::isfinite(h)) {
    throw Error(ErrorKind::NonFiniteValue, "non-finite input to phi_integral");
  }
  if (h < 0.0) throw Error(ErrorKind::InvalidArgument, "integration length must be nonnegative");
  return exp_and_phi(a, h).second;
}

DiscreteRoesser2D sample_exact(const ContinuousRoesser2D& model, const SamplingSpec& sampling) {
  model.validate();
  sampling.validate();
  const auto [exp_h, phi_h] = exp_and_phi(model.a11, sampling.h1);
  const auto [exp_v, phi_v] = exp_and_phi(model.a22, sampling.h2);

  DiscreteRoesser2D disc;
  disc.a11 = exp_h;
  disc.a12 = phi_h * model.a12;
  disc.a21 = phi_v * model.a21;
  disc.a22 = exp_v;
  disc.b1 = phi_h * model.b1;
  disc.b2 = phi_v * model.b2;
  disc.c1 = model.c1;
  disc.c2 = model.c2;
  disc.d = model.d;
  disc.sampling = sampling;
  disc.validate();
  return disc;
}

double sampling_penalty(const SmoothnessBounds& bounds, const SamplingSpec& sampling,
                        SamplingPenalty form) {
  if (bounds.alpha1 < 0.0 || bounds.alpha2 < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "smoothness bounds must be nonnegative");
  }
  sampling.validate();
  if (form == SamplingPenalty::Linear) {
    return 2.0 * (bounds.alpha1 * sampling.h1 + bounds.alpha2 * sampling.h2);
  }
  const double t1 = bounds.alpha1 * sampling.h1;
  const double t2 = bounds.alpha2 * sampling.h2;
  return 2.0 * (t1 * t1 + t2 * t2);
}

double sample_deviation_bound(const SmoothnessBounds& bounds, const SamplingSpec& sampling,
                              double input_energy) {
  if (input_energy < 0.0) throw Error(ErrorKind::InvalidArgument, "input energy is negative");
  return sampling_penalty(bounds, sampling, SamplingPenalty::Squared) * input_energy;
}

SampledDissipativityCheck sampled_dissipativity_check(const QsrSupply& continuous_supply,
                                                      const QsrSupply& sampled_supply,
                                                      const SamplingSpec& sampling,
                                                      const SmoothnessBounds& bounds,
                                                      const SamplingSlack& slack,
                                                      SamplingPenalty form) {
  continuous_supply.validate();
  sampled_supply.validate();
  if (continuous_supply.p() != sampled_supply.p() || continuous_supply.m() != sampled_supply.m()) {
    throw Error(ErrorKind::DimensionMismatch, "continuous and sampled supplies differ in size");
  }
  check_positive(slack.xi1, "xi1");
  check_positive(slack.xi2, "xi2");
  check_positive(slack.xi3, "xi3");

  const QsrSupply& c = continuous_supply;
  const QsrSupply& s = sampled_supply;
  const double smax_q = max_singular_value(s.q);
  const double smax_ds = max_singular_value(s.s - c.s);
  const double smax_s = max_singular_value(s.s);
  const double penalty = sampling_penalty(bounds, sampling, form);

  SampledDissipativityCheck out;
  out.margin1 = min_eigenvalue(s.q - c.q) - slack.xi1 * smax_q * smax_q -
                slack.xi2 * smax_ds * smax_ds;
  out.margin2 = min_eigenvalue(s.r - c.r) -
                penalty * (std::abs(min_eigenvalue(s.q)) + 1.0 / slack.xi1 + 1.0 / slack.xi3) -
                slack.xi3 * smax_s * smax_s - 1.0 / slack.xi2;
  out.holds = out.margin1 >= 0.0 && out.margin2 >= 0.0;
  return out;
}

std::optional<SamplingSlack> search_sampling_slack(const QsrSupply& continuous_supply,
                                                   const QsrSupply& sampled_supply,
                                                   const SamplingSpec& sampling,
                                                   const SmoothnessBounds& bounds,
                                                   SamplingPenalty form) {
  constexpr int kPoints = 13;
  double grid[kPoints];
  for (int k = 0; k < kPoints; ++k) grid[k] = std::pow(10.0, -6.0 + k);
  for (double xi1 : grid) {
    for (double xi2 : grid) {
      for (double xi3 : grid) {
        const SamplingSlack slack{xi1, xi2, xi3};
        if (sampled_dissipativity_check(continuous_supply, sampled_supply, sampling, bounds, slack,
                                        form)
                .holds) {
          return slack;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace r2dnet
