#pragma once

#include <vector>

#include "msm2/model.hpp"

// n-step probability propagation for second-order chains.
//
// Because the law depends on the last two states, multi-step probabilities
// are computed on the pair process: starting from unit mass on the pair
// (prev, current), each step pushes the mass of pair (h, j) to pairs (j, k)
// with weight P(k | h, j), and the final state distribution is the marginal
// of the second coordinate.  The public interface conditions on exactly two
// consecutive past states; conditioning on non-consecutive history is not a
// well-defined operation for this model and is deliberately absent.

namespace msm2 {

/// Law of the state on day s + n + 2 given (prev, current) on days
/// (s, s + 1): entry l is P(X_{s+n+2} = l | X_{s+1} = current, X_s = prev).
/// Horizon n = 1 is the first genuinely second-order case (the day after
/// next); the day immediately after `current` is just the tensor row itself.
///
/// With a fully supported tensor `probabilities` sums to 1.  If mass reaches
/// a pair whose row is unsupported (possible with estimated tensors on
/// sparse data), that mass cannot be propagated further and is dropped;
/// `lost_mass` accounts for it exactly: sum(probabilities) + lost_mass = 1.
struct NStepDistribution {
  std::vector<double> probabilities;
  double lost_mass = 0.0;
};

/// Preconditions: n >= 1 and (prev, current) supported; throws
/// std::invalid_argument / std::domain_error otherwise.
NStepDistribution n_step_distribution(const TransitionTensor& tensor, int prev,
                                      int current, int n);

/// P(X_{s+n+2} = target) for n = 1..n_max, computed in one forward pass;
/// values[i] equals n_step_distribution(..., i + 1) at target.
struct PredictionCurve {
  int prev = 0;
  int current = 0;
  int target = 0;
  std::vector<double> values;  // values[i] = probability at horizon i + 1
  double lost_mass = 0.0;      // lost mass at the final horizon
};

PredictionCurve prediction_curve(const TransitionTensor& tensor, int prev,
                                 int current, int target, int n_max);

/// Marginal state distribution on a given day (day 1 is the first day) for a
/// chain started from `init`.  Day 1 returns initial_dist, day 2 the
/// one-step marginal, later days propagate the pair process.
std::vector<double> state_occupation(const TransitionTensor& tensor,
                                     const ChainInitialization& init, int day);

/// n-step matrix of a first-order chain (plain matrix power; n >= 0).
Matrix first_order_n_step(const Matrix& transition, int n);

}  // namespace msm2
