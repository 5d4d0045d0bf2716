#pragma once

#include "r2dnet/roesser.hpp"

namespace r2dnet {

/// Static logarithmic quantizer with levels theta^i, i in Z, and optional
/// dead zone. delta = (1 - theta) / (1 + theta) is the sector bound.
class LogQuantizerSpec {
 public:
  static LogQuantizerSpec from_theta(double theta, double dead_zone = 0.0);
  static LogQuantizerSpec from_delta(double delta, double dead_zone = 0.0);

  double theta() const { return theta_; }
  double delta() const { return delta_; }
  double dead_zone() const { return dead_zone_; }

 private:
  LogQuantizerSpec(double theta, double delta, double dead_zone)
      : theta_(theta), delta_(delta), dead_zone_(dead_zone) {}

  double theta_;
  double delta_;
  double dead_zone_;
};

double theta_from_delta(double delta);

/// Q(v) = theta^i for theta^i / (1 + delta) < v <= theta^i / (1 - delta),
/// 0 for v = 0 or |v| <= dead zone, and -Q(-v) for v < 0.
double quantize(const LogQuantizerSpec& spec, double v);

Vector quantize_vec(const LogQuantizerSpec& spec, const Vector& v);

}  // namespace r2dnet
