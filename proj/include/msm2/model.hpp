#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "msm2/matrix.hpp"

// Core model types for discrete-time multistate processes observed daily:
// the labelled state space with its legal-move structure, subject
// trajectories, the second-order transition tensor, and the lifting of a
// second-order chain to a first-order chain on pairs of states.
//
// Convention: all indices in this API are 0-based.  File formats (CSV, JSON)
// and user-facing messages use 1-based state numbers; the IO layer converts.

namespace msm2 {

/// Labelled finite state space with an adjacency relation (which one-day
/// moves are legal) and a designated set of absorbing states.
///
/// Absorbing states carry exactly their self-loop in the adjacency; the
/// constructor adds the self-loop if absent and rejects any other outgoing
/// edge from an absorbing state.
class StateSpace {
 public:
  /// `edges` lists legal moves (from, to), 0-based.  Transient states that
  /// may repeat across consecutive days need an explicit self-loop.
  StateSpace(std::vector<std::string> labels,
             const std::vector<std::pair<int, int>>& edges,
             const std::vector<int>& absorbing);

  /// Convenience for data written in the 1-based convention of the file
  /// formats.
  static StateSpace from_one_based(std::vector<std::string> labels,
                                   const std::vector<std::pair<int, int>>& edges,
                                   const std::vector<int>& absorbing);

  int num_states() const { return m_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int s) const { return labels_[s]; }

  bool edge(int from, int to) const {
    return adjacency_[static_cast<std::size_t>(from) * m_ + to] != 0;
  }
  bool is_absorbing(int s) const { return absorbing_[s] != 0; }
  const std::vector<int>& absorbing_states() const { return absorbing_list_; }

  /// States reachable from `s` in one legal move, ascending.
  std::vector<int> successors(int s) const;
  /// States with a legal move into `s`, ascending.
  std::vector<int> predecessors(int s) const;

  /// 0-based index of a label; throws ValidationError if unknown.
  int index_of(const std::string& label) const;

 private:
  int m_ = 0;
  std::vector<std::string> labels_;
  std::vector<std::uint8_t> adjacency_;
  std::vector<std::uint8_t> absorbing_;
  std::vector<int> absorbing_list_;
};

/// One subject's observed path: the state on each consecutive day starting at
/// `start_day` (days are 1-based and gap-free by construction; the CSV reader
/// rejects gaps).
struct Trajectory {
  std::string subject_id;
  int start_day = 1;
  std::vector<int> states;  // 0-based state per day

  int length() const { return static_cast<int>(states.size()); }
  int day_of(int index) const { return start_day + index; }
  int last_day() const { return start_day + length() - 1; }
};

/// A structural problem found in one trajectory.
struct Violation {
  enum class Kind {
    IllegalTransition,    // consecutive states without an adjacency edge
    StateAfterAbsorption, // a different state follows an absorbing state
    EmptyTrajectory,
  };
  Kind kind;
  std::size_t trajectory_index = 0;
  std::string subject_id;
  int day = 0;  // day of the offending entry (0 for empty trajectories)
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Indices of trajectories with at least one violation, ascending.
  std::vector<std::size_t> flagged;

  bool ok() const { return violations.empty(); }
};

/// Checks every trajectory against the state space.  Out-of-range states,
/// start days < 1 and an entirely empty dataset throw ValidationError
/// immediately; adjacency violations, states after absorption and empty
/// trajectories are collected in the report.  With `strict` any violation
/// throws instead.  Each trajectory is judged on its own, so the outcome per
/// trajectory does not depend on the rest of the dataset.
ValidationReport validate_dataset(const std::vector<Trajectory>& dataset,
                                  const StateSpace& space, bool strict = false);

/// Second-order transition law P(next = k | prev = h, current = j), stored as
/// one matrix per conditioning previous state h: matrices[h](j, k).
///
/// Each (h, j) pair carries an explicit support flag.  A supported row sums
/// to 1; an unsupported row is all zero.  The flag — not the zero row —
/// distinguishes "this history cannot occur / was never observed" from a row
/// that is legitimately part of the law, so lookups on unsupported histories
/// can be rejected instead of silently returning zeros.
struct TransitionTensor {
  int m = 0;
  std::vector<Matrix> matrices;        // m matrices, each m x m
  std::vector<std::uint8_t> support;   // support[h * m + j]

  static TransitionTensor zeros(int m);

  bool supported(int h, int j) const {
    return support[static_cast<std::size_t>(h) * m + j] != 0;
  }
  double prob(int h, int j, int k) const { return matrices[h](j, k); }

  void set_row(int h, int j, std::span<const double> row, bool is_supported);

  /// Structural validity: entries in [0,1], supported rows sum to 1 within
  /// tol, unsupported rows all zero.
  void check_valid(double tol = 1e-12) const;
  /// Additionally checks consistency with a state space: probability only on
  /// adjacency edges, and absorbing states frozen in place (for absorbing h
  /// the only supportable row is (h, h) with all mass on h).
  void check_valid(const StateSpace& space, double tol = 1e-12) const;
};

/// Law of the first two days: X(1) ~ initial_dist, X(2) | X(1)=h ~ row h of
/// first_step.  Rows of first_step for states with initial mass must be
/// stochastic; other rows may be zero.
struct ChainInitialization {
  std::vector<double> initial_dist;
  Matrix first_step;

  void check_valid(double tol = 1e-12) const;
};

/// First-order chain on the pair space (prev, current) equivalent to the
/// second-order chain: pair (h, j) moves to (j, k) with probability
/// P(k | h, j), and the initial pair distribution is
/// nu[(h, j)] = initial_dist[h] * first_step(h, j).  Rows of unsupported
/// pairs are zero.
struct LiftedChain {
  int m = 0;                    // number of base states; pair space is m*m
  Matrix matrix;                // (m*m) x (m*m)
  std::vector<double> initial;  // length m*m

  int pair_index(int prev, int current) const { return prev * m + current; }
};

LiftedChain lift_to_pairs(const TransitionTensor& tensor,
                          const ChainInitialization& init);

}  // namespace msm2
