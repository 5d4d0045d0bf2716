#include "r2dnet/quantize.hpp"

#include <cmath>

namespace r2dnet {

namespace {

void check_dead_zone(double dead_zone) {
  if (!(dead_zone >= 0.0) || !std::isfinite(dead_zone)) {
    throw Error(ErrorKind::InvalidArgument, "dead zone must be finite and nonnegative");
  }
}

}  // namespace

double theta_from_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "delta must lie in (0, 1)");
  }
  return (1.0 - delta) / (1.0 + delta);
}

LogQuantizerSpec LogQuantizerSpec::from_theta(double theta, double dead_zone) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "theta must lie in (0, 1)");
  }
  check_dead_zone(dead_zone);
  return LogQuantizerSpec(theta, (1.0 - theta) / (1.0 + theta), dead_zone);
}

LogQuantizerSpec LogQuantizerSpec::from_delta(double delta, double dead_zone) {
  const double theta = theta_from_delta(delta);
  check_dead_zone(dead_zone);
  return LogQuantizerSpec(theta, delta, dead_zone);
}

double quantize(const LogQuantizerSpec& spec, double v) {
  if (v == 0.0 || std::abs(v) <= spec.dead_zone()) return 0.0;
  if (v < 0.0) return -quantize(spec, -v);

  const double theta = spec.theta();
  const double scale = 1.0 / (1.0 - spec.delta());
  // Level i owns (upper(i + 1), upper(i)]; only upper() is ever evaluated so
  // neighbouring intervals share a bit-identical boundary.
  auto upper = [&](double i) { return std::pow(theta, i) * scale; };

  // The intervals tile exactly in log space, so the log estimate is off by
  // at most one level; the loops below settle boundary rounding.
  double i = std::floor(std::log(v / scale) / std::log(theta));
  while (v > upper(i)) i -= 1.0;
  while (v <= upper(i + 1.0)) i += 1.0;
  return std::pow(theta, i);
}

Vector quantize_vec(const LogQuantizerSpec& spec, const Vector& v) {
  Vector out(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = quantize(spec, v(k));
  return out;
}

}  // namespace r2dnet
