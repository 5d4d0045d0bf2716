#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "r2dnet/discretize.hpp"
#include "r2dnet/dissipativity.hpp"
#include "r2dnet/sim2d.hpp"

using namespace r2dnet;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

DiscreteRoesser2D heat_exchanger(double h1 = 0.1, double h2 = 0.1) {
  Pde2ndOrderSpec s;
  s.a0 = 1;
  s.a1 = 1;
  s.a2 = -1;
  s.b = 1;
  return sample_exact(pde_to_roesser(s), {h1, h2});
}

QsrSupply levels(double rho, double nu) { return indices_to_qsr({rho, nu}, 1); }

DiscreteRoesser2D zero_model() {
  return make_discrete(Matrix::Zero(2, 2), Matrix::Zero(2, 1), Matrix::Zero(1, 2), m1(0), 1);
}

}  // namespace

TEST_CASE("zero model gives M = blockdiag(-P, 0)") {
  const auto lmi = build_dissipation_lmi(zero_model(), levels(0, 0));
  const Matrix m = lmi.evaluate(m1(2.0), m1(3.0));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, 0) = -2.0;
  expected(1, 1) = -3.0;
  CHECK((m - expected).norm() == 0.0);
  CHECK(lmi.constant_term().isZero());
}

TEST_CASE("LMI quadratic form matches the one-step storage balance") {
  const auto disc = heat_exchanger();
  const auto supply = levels(-1.317, -0.1);
  const auto lmi = build_dissipation_lmi(disc, supply);
  std::mt19937 rng(2);
  std::normal_distribution<double> dist(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double ph = std::abs(dist(rng)) + 0.1, pv = std::abs(dist(rng)) + 0.1;
    const double xh = dist(rng), xv = dist(rng), u = dist(rng);
    const double xh1 = disc.a11(0, 0) * xh + disc.a12(0, 0) * xv + disc.b1(0, 0) * u;
    const double xv1 = disc.a21(0, 0) * xh + disc.a22(0, 0) * xv + disc.b2(0, 0) * u;
    const double y = xh + xv;
    const double lhs = ph * xh1 * xh1 + pv * xv1 * xv1 - ph * xh * xh - pv * xv * xv;
    const double w = 1.317 * y * y + y * u + 0.1 * u * u;
    const Vector z = (Vector(3) << xh, xv, u).finished();
    CHECK(z.dot(lmi.evaluate(m1(ph), m1(pv)) * z) == doctest::Approx(lhs - w).epsilon(1e-12));
  }
}

TEST_CASE("no feedthrough reduces the input block") {
  const auto disc = heat_exchanger();
  const auto lmi = build_dissipation_lmi(disc, levels(0.3, 0.7));
  const Matrix m = lmi.evaluate(m1(1.5), m1(0.5));
  const Matrix b = disc.b();
  const Matrix p = (Matrix(2, 2) << 1.5, 0, 0, 0.5).finished();
  CHECK(m(2, 2) == doctest::Approx((b.transpose() * p * b)(0, 0) + 0.7));
}

TEST_CASE("lmi_feasible trivial and infeasible cases") {
  const auto zero = lmi_feasible(build_dissipation_lmi(zero_model(), levels(0, 0)));
  CHECK(zero.status == FeasibilityStatus::Feasible);
  REQUIRE(zero.certificate.has_value());

  // The supply (-I, 0, -I) is negative for every nonzero signal.
  const auto bad = lmi_feasible(build_dissipation_lmi(heat_exchanger(), QsrSupply{m1(-1), m1(0), m1(-1)}));
  CHECK(bad.status == FeasibilityStatus::Infeasible);
  CHECK_FALSE(bad.certificate.has_value());
}

TEST_CASE("heat exchanger feasibility brackets the reported level") {
  const auto disc = heat_exchanger();
  const auto at = [&](double rho) { return lmi_feasible(build_dissipation_lmi(disc, levels(rho, -0.1))); };
  const auto yes = at(-1.4);
  CHECK(yes.status == FeasibilityStatus::Feasible);
  REQUIRE(yes.certificate.has_value());
  CHECK(validate_certificate(build_dissipation_lmi(disc, levels(-1.4, -0.1)), *yes.certificate));
  CHECK(yes.certificate->residual <= 1e-7);
  CHECK(at(-1.2).status == FeasibilityStatus::Infeasible);
}

TEST_CASE("budget exhaustion is distinguished from infeasibility") {
  FeasibilityOptions tight;
  tight.max_iterations = 1;
  const auto r = lmi_feasible(build_dissipation_lmi(heat_exchanger(), levels(-1.32, -0.1)), tight);
  CHECK(r.status == FeasibilityStatus::BudgetExceeded);
}

TEST_CASE("validate_certificate") {
  const auto lmi = build_dissipation_lmi(zero_model(), levels(0, 0));
  CHECK(validate_certificate(lmi, {m1(1), m1(1), 0.0}));
  CHECK_FALSE(validate_certificate(lmi, {m1(-1), m1(1), 0.0}));
  CHECK_FALSE(validate_certificate(lmi, {Matrix::Identity(2, 2), m1(1), 0.0}));
}

TEST_CASE("zero-supply feasibility is invariant under scaling") {
  const Matrix a = (Matrix(2, 2) << 0.5, 0.2, -0.1, 0.4).finished();
  const auto disc = make_discrete(a, Matrix::Ones(2, 1), Matrix::Ones(1, 2), m1(0), 1);
  const auto lmi = build_dissipation_lmi(disc, QsrSupply{m1(0), m1(0), m1(0)});
  const LmiCertificate cert{m1(1.0), m1(1.3), 0.0};
  const Matrix base = lmi.evaluate(cert.p_h, cert.p_v);
  for (double c : {1e-3, 0.5, 2.0, 1e4}) {
    CHECK(validate_certificate(lmi, {c * cert.p_h, c * cert.p_v, 0.0}, 0.0) ==
          validate_certificate(lmi, cert, 0.0));
    CHECK((lmi.evaluate(c * cert.p_h, c * cert.p_v) - c * base).norm() <= 1e-12 * c);
  }
}

TEST_CASE("maximize_rho reproduces the heat exchanger level") {
  const auto r = maximize_rho(heat_exchanger(), -0.1);
  CHECK(r.status == RhoStatus::Ok);
  CHECK(r.rho == doctest::Approx(-1.317).epsilon(0.05 / 1.317));
}

TEST_CASE("maximize_rho clamps for coarse sampling") {
  const auto r = maximize_rho(heat_exchanger(0.3, 3.0), -0.1);
  CHECK(r.status == RhoStatus::Clamped);
  CHECK(r.rho == -2.5);
}

TEST_CASE("feasible set is down-closed in rho") {
  const auto disc = heat_exchanger();
  const double top = maximize_rho(disc, -0.1).rho;
  for (double rho : {top - 1e-3, top - 0.1, top - 0.5, top - 1.0, -2.5}) {
    CHECK(lmi_feasible(build_dissipation_lmi(disc, levels(rho, -0.1))).status == FeasibilityStatus::Feasible);
  }
}

TEST_CASE("decoupled stable scalar model: rho shrinks as sampling coarsens") {
  const auto cont = make_continuous((Matrix(2, 2) << -1, 0, 0, -2).finished(), (Matrix(2, 1) << 1, 1).finished(),
                                    Matrix::Ones(1, 2), m1(0), 1);
  double last = 1e300;
  for (double h : {0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double rho = maximize_rho(sample_exact(cont, {h, h}), 0.0).rho;
    CHECK(rho <= last + 1e-3);
    last = rho;
  }
}

TEST_CASE("maximize_rho reports infeasible everywhere") {
  // With B = 0 and x = 0 the supply reduces to -nu u^2 < 0, whatever rho is.
  const auto disc = make_discrete((Matrix(2, 2) << 3, 0, 0, 3).finished(), Matrix::Zero(2, 1), Matrix::Ones(1, 2),
                                  m1(0), 1);
  try {
    maximize_rho(disc, 0.5);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InfeasibleEverywhere);
  }
}

TEST_CASE("empirical dissipativity check") {
  const auto zero = zero_model();
  const auto bc = BoundaryConditions::constant(Vector::Zero(1), 4, Vector::Zero(1), 3);
  const auto traj = simulate_open_loop(zero, bc, {}, 3, 4);
  CHECK(empirical_dissipativity_check(traj, {m1(1), m1(1), 0}, levels(0, 0), 0.0));

  const auto grow = make_discrete((Matrix(2, 2) << 1.2, 0, 0, 1.2).finished(), Matrix::Zero(2, 1),
                                  Matrix::Ones(1, 2), m1(0), 1);
  const auto bc1 = BoundaryConditions::constant(Vector::Ones(1), 5, Vector::Ones(1), 5);
  const auto run = simulate_open_loop(grow, bc1, {}, 5, 5);
  CHECK_FALSE(empirical_dissipativity_check(run, {m1(1), m1(1), 0}, QsrSupply{m1(0), m1(0.5), m1(0)}, 1e-9));
}

TEST_CASE("certificate holds on heat exchanger trajectories") {
  const auto disc = heat_exchanger();
  const auto supply = levels(-1.4, -0.1);
  const auto cert = lmi_feasible(build_dissipation_lmi(disc, supply)).certificate;
  REQUIRE(cert.has_value());
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> field(8 * 12);
    for (auto& v : field) v = dist(rng);
    const InputField u = [&field](int i, int j) { return Vector::Constant(1, field[i * 12 + j]); };
    const auto bc = BoundaryConditions::constant(Vector::Constant(1, dist(rng)), 12, Vector::Constant(1, dist(rng)), 8);
    const auto traj = simulate_open_loop(disc, bc, u, 8, 12);
    const double energy = trajectory_energy(traj);
    CHECK(empirical_dissipativity_check(traj, *cert, supply, 1e-9 * energy));
  }
}
