#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "r2dnet/quantize.hpp"

using namespace r2dnet;

TEST_CASE("theta and delta conversions") {
  CHECK(theta_from_delta(0.04) == doctest::Approx(0.96 / 1.04).epsilon(1e-15));
  CHECK(theta_from_delta(0.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(theta_from_delta(1e-12) < 1.0);
  CHECK(theta_from_delta(1e-12) > 1.0 - 1e-11);
  CHECK_THROWS_AS(theta_from_delta(0.0), Error);
  CHECK_THROWS_AS(theta_from_delta(1.0), Error);

  const auto q = LogQuantizerSpec::from_theta(0.5);
  CHECK(std::abs(q.delta() * (1.0 + q.theta()) - (1.0 - q.theta())) < 1e-14);
  CHECK_THROWS_AS(LogQuantizerSpec::from_theta(1.0), Error);
  CHECK_THROWS_AS(LogQuantizerSpec::from_theta(0.5, -1.0), Error);
}

TEST_CASE("quantize examples") {
  const auto q = LogQuantizerSpec::from_theta(0.5);
  CHECK(quantize(q, 0.0) == 0.0);
  CHECK(quantize(q, 1.0) == 1.0);
  CHECK(quantize(q, 1.6) == 2.0);
  CHECK(quantize(q, -1.0) == -1.0);
  CHECK(quantize(q, 0.4) == 0.5);
  const Vector v = quantize_vec(q, (Vector(2) << 1.6, 0.4).finished());
  CHECK(v(0) == 2.0);
  CHECK(v(1) == 0.5);
  CHECK(quantize_vec(q, Vector::Zero(2)).isZero());
}

TEST_CASE("interval boundaries are open on the left and closed on the right") {
  const auto q = LogQuantizerSpec::from_theta(0.5);
  const double delta = q.delta();
  // Right edge of level 1: 1 / (1 - delta) = 1.5 belongs to level 1.
  CHECK(quantize(q, 1.0 / (1.0 - delta)) == 1.0);
  CHECK(quantize(q, std::nextafter(1.0 / (1.0 - delta), 10.0)) == 2.0);
  const double upper_half = 0.5 / (1.0 - delta);
  CHECK(upper_half == doctest::Approx(0.75));
  CHECK(quantize(q, upper_half) == 0.5);
  CHECK(quantize(q, std::nextafter(upper_half, 10.0)) == 1.0);
}

TEST_CASE("dead zone") {
  const auto q = LogQuantizerSpec::from_theta(0.5, 0.1);
  CHECK(quantize(q, 0.1) == 0.0);
  CHECK(quantize(q, -0.05) == 0.0);
  CHECK(quantize(q, 0.11) == 0.125);
}

TEST_CASE("quantizer properties on random samples") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> theta_dist(0.05, 0.99);
  std::uniform_real_distribution<double> log_mag(-30.0, 30.0);
  std::bernoulli_distribution sign;
  for (int d = 0; d < 5; ++d) {
    const auto q = LogQuantizerSpec::from_theta(theta_dist(rng));
    const double delta = q.delta();
    double prev_v = -1e300, prev_q = -1e300;
    std::vector<double> samples;
    for (int k = 0; k < 4000; ++k) samples.push_back((sign(rng) ? 1 : -1) * std::exp(log_mag(rng)));
    std::sort(samples.begin(), samples.end());
    for (double v : samples) {
      const double out = quantize(q, v);
      CHECK(std::abs(out - v) <= delta * std::abs(v) + 1e-12);
      CHECK((1.0 - delta) * v * v <= v * out * (1.0 + 1e-15));
      CHECK(v * out <= (1.0 + delta) * v * v * (1.0 + 1e-15));
      CHECK(out * out <= (1.0 + delta) * (1.0 + delta) * v * v * (1.0 + 1e-15));
      CHECK(quantize(q, -v) == -out);
      if (v >= prev_v) CHECK(out >= prev_q);
      prev_v = v;
      prev_q = out;
    }
    for (int i = -50; i <= 50; ++i) {
      const double level = std::pow(q.theta(), i);
      CHECK(quantize(q, level) == level);
    }
  }
}
