#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "r2dnet/discretize.hpp"

using namespace r2dnet;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

ContinuousRoesser2D heat_exchanger() {
  Pde2ndOrderSpec s;
  s.a0 = 1;
  s.a1 = 1;
  s.a2 = -1;
  s.b = 1;
  return pde_to_roesser(s);
}

Matrix random_matrix(std::mt19937& rng, int n, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
  }
  return a;
}

QsrSupply scalar_supply(double q, double s, double r) { return QsrSupply{m1(q), m1(s), m1(r)}; }

}  // namespace

TEST_CASE("phi_integral closed forms") {
  CHECK(phi_integral(Matrix::Zero(2, 2), 0.1).isApprox(0.1 * Matrix::Identity(2, 2), 1e-15));
  CHECK(phi_integral(m1(1.0), 0.1)(0, 0) == doctest::Approx(std::exp(0.1) - 1.0).epsilon(1e-14));
  const double h = 0.7;
  const Matrix nil = (Matrix(2, 2) << 0, 1, 0, 0).finished();
  const Matrix expected = (Matrix(2, 2) << h, h * h / 2, 0, h).finished();
  CHECK((phi_integral(nil, h) - expected).norm() < 1e-14);
}

TEST_CASE("phi_integral agrees with Simpson quadrature") {
  std::mt19937 rng(21);
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 4;
    const Matrix a = random_matrix(rng, n, 1.0);
    const double h = 0.05 + 0.1 * k;
    const Matrix ref = oracle::simpson_phi(a, h);
    CHECK((phi_integral(a, h) - ref).norm() <= 1e-8 * (1.0 + ref.norm()));
  }
}

TEST_CASE("phi identity phi(A,h) A = exp(Ah) - I") {
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> hdist(0.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const int n = 1 + k % 4;
    const Matrix a = random_matrix(rng, n, 1.0);
    const double h = hdist(rng);
    const Matrix phi = phi_integral(a, h);
    const Matrix e = oracle::taylor_expm(a * h);
    const Matrix target = e - Matrix::Identity(n, n);
    const double tol = 1e-10 * (1.0 + a.norm() * h) * std::max(1.0, e.norm());
    CHECK((phi * a - target).norm() <= tol);
    CHECK((a * phi - target).norm() <= tol);
  }
}

TEST_CASE("sample_exact on the heat exchanger") {
  const auto d = sample_exact(heat_exchanger(), {0.1, 0.1});
  CHECK(d.a11(0, 0) == doctest::Approx(1.1051709).epsilon(1e-7));
  CHECK(d.a12(0, 0) == 0.0);
  CHECK(d.a21(0, 0) == doctest::Approx(0.0951626).epsilon(1e-6));
  CHECK(d.a22(0, 0) == doctest::Approx(0.9048374).epsilon(1e-7));
  CHECK(d.b1(0, 0) == doctest::Approx(0.1051709).epsilon(1e-6));
  CHECK(d.b2(0, 0) == 0.0);
  CHECK(d.c() == (Matrix(1, 2) << 1, 1).finished());
  CHECK(d.d(0, 0) == 0.0);
  REQUIRE(d.sampling.has_value());
  CHECK(d.sampling->h1 == 0.1);
}

TEST_CASE("sample_exact block formulas against the oracle") {
  std::mt19937 rng(8);
  for (int k = 0; k < 10; ++k) {
    const int nh = 1 + k % 2, nv = 1 + (k / 2) % 2, n = nh + nv;
    const Matrix a = random_matrix(rng, n, 0.8);
    const Matrix b = random_matrix(rng, n, 1.0).leftCols(1);
    const auto cont = make_continuous(a, b, Matrix::Ones(1, n), m1(0), nh);
    const double h1 = 0.2, h2 = 0.35;
    const auto d = sample_exact(cont, {h1, h2});
    const Matrix p1 = oracle::simpson_phi(cont.a11, h1);
    const Matrix p2 = oracle::simpson_phi(cont.a22, h2);
    CHECK((d.a11 - oracle::taylor_expm(cont.a11 * h1)).norm() < 1e-10);
    CHECK((d.a22 - oracle::taylor_expm(cont.a22 * h2)).norm() < 1e-10);
    CHECK((d.a12 - p1 * cont.a12).norm() < 1e-8);
    CHECK((d.a21 - p2 * cont.a21).norm() < 1e-8);
    CHECK((d.b1 - p1 * cont.b1).norm() < 1e-8);
    CHECK((d.b2 - p2 * cont.b2).norm() < 1e-8);
  }
}

TEST_CASE("sample_exact at zero step and with singular A11") {
  const auto d = sample_exact(heat_exchanger(), {0.0, 0.0});
  CHECK(d.a().isApprox(Matrix::Identity(2, 2)));
  CHECK(d.b().isZero());

  const auto cont = make_continuous(Matrix::Zero(2, 2), (Matrix(2, 1) << 1, 0).finished(), Matrix::Ones(1, 2),
                                    m1(0), 1);
  CHECK(sample_exact(cont, {1.0, 1.0}).b1(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("sample_exact approaches identity linearly as h shrinks") {
  const auto cont = heat_exchanger();
  double previous = 0.0;
  for (double h : {1e-2, 1e-3, 1e-4}) {
    const auto d = sample_exact(cont, {h, h});
    const double da = (d.a() - Matrix::Identity(2, 2)).norm() / h;
    const double db = d.b().norm() / h;
    CHECK(db == doctest::Approx(1.0).epsilon(2e-2));
    if (previous > 0.0) CHECK(da == doctest::Approx(previous).epsilon(2e-2));
    previous = da;
  }
}

TEST_CASE("decoupled sampling has the semigroup property") {
  std::mt19937 rng(4);
  for (int k = 0; k < 10; ++k) {
    Matrix a = Matrix::Zero(3, 3);
    a.topLeftCorner(2, 2) = random_matrix(rng, 2, 1.0);
    a(2, 2) = -0.5;
    const auto cont = make_continuous(a, Matrix::Ones(3, 1), Matrix::Ones(1, 3), m1(0), 2);
    const auto once = sample_exact(cont, {0.3, 0.1});
    const auto twice = sample_exact(cont, {0.6, 0.1});
    CHECK((once.a11 * once.a11 - twice.a11).norm() < 1e-9);
  }
}

TEST_CASE("sample_exact overflow is reported") {
  const auto cont = make_continuous((Matrix(2, 2) << 1, 0, 0, 1).finished(), Matrix::Ones(2, 1),
                                    Matrix::Ones(1, 2), m1(0), 1);
  CHECK_THROWS_AS(sample_exact(cont, {1e4, 1.0}), Error);
}

TEST_CASE("sample_deviation_bound") {
  CHECK(sample_deviation_bound({0, 0}, {0.3, 0.2}, 5.0) == 0.0);
  CHECK(sample_deviation_bound({1, 1}, {0.1, 0.1}, 1.0) == doctest::Approx(0.04));
  CHECK(sample_deviation_bound({2, 0}, {0.5, 0.1}, 3.0) == doctest::Approx(6.0));
  CHECK(sampling_penalty({1, 1}, {0.1, 0.1}, SamplingPenalty::Linear) == doctest::Approx(0.4));
}

TEST_CASE("sample_deviation_bound is monotone in every argument") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> dist(0.0, 2.0);
  for (int k = 0; k < 300; ++k) {
    const SmoothnessBounds b{dist(rng), dist(rng)};
    const SamplingSpec s{dist(rng), dist(rng)};
    const double e = dist(rng);
    const double base = sample_deviation_bound(b, s, e);
    const double bump = dist(rng);
    CHECK(sample_deviation_bound({b.alpha1 + bump, b.alpha2}, s, e) >= base);
    CHECK(sample_deviation_bound({b.alpha1, b.alpha2 + bump}, s, e) >= base);
    CHECK(sample_deviation_bound(b, {s.h1 + bump, s.h2}, e) >= base);
    CHECK(sample_deviation_bound(b, {s.h1, s.h2 + bump}, e) >= base);
    CHECK(sample_deviation_bound(b, s, e + bump) >= base);
  }
}

TEST_CASE("sampled dissipativity check examples") {
  const auto same = scalar_supply(-1, 0.5, 0.3);
  for (double xi : {1e-6, 1e-2, 1.0, 1e3}) {
    const auto r = sampled_dissipativity_check(same, same, {0.1, 0.1}, {1, 1}, {xi, 1, 1});
    CHECK_FALSE(r.holds);
    CHECK(r.margin1 < 0.0);
  }

  const auto cont = scalar_supply(-2, 0.5, 0);
  const auto at = [&](double c) {
    return sampled_dissipativity_check(cont, scalar_supply(-1, 0.5, c), {0.1, 0.1}, {1, 1}, {1, 1, 1});
  };
  CHECK(at(1.37).margin1 == doctest::Approx(0.0));
  CHECK(at(1.37).margin2 == doctest::Approx(0.0));
  CHECK(at(1.38).holds);
  CHECK_FALSE(at(1.36).holds);

  const auto r0 = sampled_dissipativity_check(scalar_supply(-3, 0.5, 0), scalar_supply(-1, 0.5, 5), {0, 0},
                                              {7, 9}, {1e-3, 1, 1});
  const auto r1 = sampled_dissipativity_check(scalar_supply(-3, 0.5, 0), scalar_supply(-1, 0.5, 5), {0, 0},
                                              {0, 0}, {1e-3, 1, 1});
  CHECK(r0.margin1 > 0.0);
  CHECK(r0.margin2 == r1.margin2);

  CHECK_THROWS_AS(sampled_dissipativity_check(cont, cont, {0.1, 0.1}, {1, 1}, {0, 1, 1}), Error);
}

TEST_CASE("linear sampling penalty variant") {
  const auto cont = scalar_supply(-2, 0.5, 0);
  const auto r = sampled_dissipativity_check(cont, scalar_supply(-1, 0.5, 2.0), {0.1, 0.1}, {1, 1}, {1, 1, 1},
                                             SamplingPenalty::Linear);
  // 2 - 0.4 * 3 - 0.25 - 1
  CHECK(r.margin2 == doctest::Approx(-0.45));
}

TEST_CASE("sampled dissipativity margins decrease with the sampling periods") {
  const auto cont = scalar_supply(-2, 0.5, 0);
  const auto samp = scalar_supply(-1, 0.5, 3);
  double last1 = 1e300, last2 = 1e300;
  for (double h = 0.0; h <= 1.0; h += 0.05) {
    const auto r = sampled_dissipativity_check(cont, samp, {h, 0.5 * h}, {1, 2}, {1, 1, 1});
    CHECK(r.margin1 <= last1);
    CHECK(r.margin2 <= last2);
    last1 = r.margin1;
    last2 = r.margin2;
  }
}

TEST_CASE("slack search") {
  const auto same = scalar_supply(-1, 0.5, 0.3);
  CHECK_FALSE(search_sampling_slack(same, same, {0.1, 0.1}, {1, 1}).has_value());

  const auto found = search_sampling_slack(scalar_supply(-2, 0.5, 0), scalar_supply(-1, 0.5, 2), {0.1, 0.1}, {1, 1});
  REQUIRE(found.has_value());
  CHECK(sampled_dissipativity_check(scalar_supply(-2, 0.5, 0), scalar_supply(-1, 0.5, 2), {0.1, 0.1}, {1, 1}, *found)
            .holds);
  CHECK(found->xi1 <= 1.0);

  const auto strong =
      search_sampling_slack(scalar_supply(-11, 0.5, 0), scalar_supply(-1, 0.5, 10), {0.01, 0.01}, {1, 1});
  CHECK(strong.has_value());
}
