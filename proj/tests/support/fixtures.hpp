#pragma once

// Shared test fixtures: a hospital-course state space with a dataset tuned to
// reproduce known estimator outputs exactly, random fully-supported tensors
// for oracle sweeps, and small chains with known first- and second-order
// behaviour for calibrating the Markov test.

#include <cstdint>
#include <vector>

#include "msm2/model.hpp"
#include "msm2/simulate.hpp"

namespace fixtures {

/// Seven-state hospital course: 1 NSP, 2 SP, 3 Recov, 4 NIMV, 5 IMV,
/// 6 Disch, 7 Death (0-based internally).  Transient states carry
/// self-loops; 6 and 7 absorb.
msm2::StateSpace hospital_space();

/// Length-3 trajectories whose triple counts hit exact targets:
/// at-risk and event totals for histories starting (1,1), (1,2), (2,2),
/// (2,3), (2,4), (2,5) match a fixed table of integers (see the .cpp), so
/// ratio estimates are known fractions.
std::vector<msm2::Trajectory> hospital_dataset();

/// The partial tensor implied by hospital_dataset(): the estimated rows for
/// previous states 1 and 2, point-mass rows for every observed entry into an
/// absorbing state, and the absorbing self-pairs.  All other histories are
/// unsupported.
msm2::TransitionTensor hospital_partial_tensor();

/// Cohort mixing direct admissions into state 2 with entries via state 1:
/// 171 subjects 1 -> 2 -> 3 and 52 subjects 2 -> 3, so the move 2 -> 3
/// splits 171 via state 1 (76.68%) and 52 admissions (23.32%).
std::vector<msm2::Trajectory> admissions_dataset();

/// Random tensor with every (h, j) pair supported (no absorbing states),
/// entries bounded away from zero.  Deterministic in (m, seed).
msm2::TransitionTensor random_full_tensor(int m, std::uint64_t seed);

/// Matching random initialization (positive everywhere).
msm2::ChainInitialization random_initialization(int m, std::uint64_t seed);

/// Three fully-connected transient states.
msm2::StateSpace open_three_state_space();

/// First-order simulation config on the three-state space (the Markov null).
msm2::SimulationConfig first_order_config(int n_subjects, int t_max,
                                          std::uint64_t seed);

/// Second-order config whose 2 -> 3 hazard swings with the previous state
/// (0.50 / 0.10 / 0.30 for previous 1 / 2 / 3).
msm2::SimulationConfig second_order_config(int n_subjects, int t_max,
                                           std::uint64_t seed);

/// Four fully-connected transient states and a config with all tensor
/// entries >= 0.05, for estimator recovery sweeps.
msm2::StateSpace open_four_state_space();
msm2::SimulationConfig four_state_config(int n_subjects, int t_max,
                                         std::uint64_t seed);

/// Four subjects, one event, split half and half by the day-1 state: the
/// log-rank process at grid time 1 has U = 0.5, variance 0.25, standardized
/// value 1 when conditioning on state 3.
struct HandLogrank {
  msm2::StateSpace space;
  std::vector<msm2::Trajectory> dataset;
  int from = 0, to = 1, cond = 2;
};
HandLogrank hand_logrank_fixture();

}  // namespace fixtures
