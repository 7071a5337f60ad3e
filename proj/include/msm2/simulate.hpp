#pragma once

#include <cstdint>
#include <vector>

#include "msm2/model.hpp"

namespace msm2 {

enum class ChainOrder { First, Second };

/// Everything needed to draw a cohort: the state space, the transition law,
/// the law of the first two days, cohort size, truncation day and seed.
///
/// With ChainOrder::First every step after day 1 uses the first_step matrix,
/// which gives a genuinely first-order chain — useful as the null model when
/// studying the Markov test.
struct SimulationConfig {
  StateSpace space;
  TransitionTensor tensor;
  ChainInitialization init;
  int n_subjects = 0;
  int t_max = 0;  // last day that can be recorded
  std::uint64_t seed = 0;
  ChainOrder order = ChainOrder::Second;

  /// Throws ConfigError when the cohort cannot be simulated: sizes < 1,
  /// t_max < 2, invalid tensor/init, or (second order) some pair reachable
  /// from the initialization with a transient current state is unsupported —
  /// a trajectory hitting it would have nowhere to go.
  void check_valid() const;
};

/// Draws subject `subject_index` (0-based).  Each subject consumes its own
/// counter-based stream (seed, stream = subject_index), so the draw is a
/// pure function of (config, subject_index): cohorts can be generated in
/// parallel, in any order, with identical results.  Trajectories start on
/// day 1 and stop at absorption or after day t_max, whichever comes first.
Trajectory sample_trajectory(const SimulationConfig& config, int subject_index);

/// The full cohort, subjects 0..n_subjects-1 in order.  `simulate_cohort`
/// parallelizes over subjects with OpenMP; `simulate_cohort_serial` is the
/// reference loop used to cross-check it.  Both call check_valid() first.
std::vector<Trajectory> simulate_cohort(const SimulationConfig& config);
std::vector<Trajectory> simulate_cohort_serial(const SimulationConfig& config);

}  // namespace msm2
