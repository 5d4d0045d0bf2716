#pragma once

#include <optional>

#include "r2dnet/roesser.hpp"

namespace r2dnet {

/// Energy-gain bounds from the input to the horizontal (alpha1) and
/// vertical (alpha2) partial derivatives of the output.
struct SmoothnessBounds {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
};

/// Free positive constants of the sampled-dissipativity condition.
struct SamplingSlack {
  double xi1 = 1.0;
  double xi2 = 1.0;
  double xi3 = 1.0;
};

/// How the inter-sample output deviation enters the sampled-dissipativity
/// condition. The squared form 2(a1^2 h1^2 + a2^2 h2^2) is the one the
/// deviation bound actually delivers; the linear form 2(a1 h1 + a2 h2)
/// is the alternative reading kept for comparison.
enum class SamplingPenalty { Squared, Linear };

inline constexpr SamplingPenalty kDefaultSamplingPenalty = SamplingPenalty::Squared;

struct SampledDissipativityCheck {
  bool holds = false;
  double margin1 = 0.0;
  double margin2 = 0.0;
};

/// Integral of exp(A s) for s in [0, h], via the exponential of the
/// augmented matrix [[A, I], [0, 0]] h. Valid for singular A.
Matrix phi_integral(const Matrix& a, double h);

/// Exact sample-and-hold discretization of a continuous Roesser model.
DiscreteRoesser2D sample_exact(const ContinuousRoesser2D& model, const SamplingSpec& sampling);

/// Upper bound on the inter-sample output deviation energy.
double sample_deviation_bound(const SmoothnessBounds& bounds, const SamplingSpec& sampling,
                              double input_energy);

double sampling_penalty(const SmoothnessBounds& bounds, const SamplingSpec& sampling,
                        SamplingPenalty form = kDefaultSamplingPenalty);

/// Sufficient condition for the sampled model to inherit
/// (Q^, S^, R^)-dissipativity from a (Q, S, R)-dissipative continuous model:
///   margin1 = lmin(Q^ - Q) - xi1 smax(Q^)^2 - xi2 smax(S^ - S)^2
///   margin2 = lmin(R^ - R) - penalty (|lmin(Q^)| + 1/xi1 + 1/xi3)
///             - xi3 smax(S^)^2 - 1/xi2
/// holds iff both margins are nonnegative.
SampledDissipativityCheck sampled_dissipativity_check(
    const QsrSupply& continuous_supply, const QsrSupply& sampled_supply,
    const SamplingSpec& sampling, const SmoothnessBounds& bounds, const SamplingSlack& slack,
    SamplingPenalty form = kDefaultSamplingPenalty);

/// First slack triple, in lexicographic (xi1, xi2, xi3) order over the
/// log grid 10^-6 .. 10^6 (13 points per axis), for which the check holds.
std::optional<SamplingSlack> search_sampling_slack(
    const QsrSupply& continuous_supply, const QsrSupply& sampled_supply,
    const SamplingSpec& sampling, const SmoothnessBounds& bounds,
    SamplingPenalty form = kDefaultSamplingPenalty);

}  // namespace r2dnet
