#pragma once

#include <cstdint>
#include <vector>

#include "msm2/model.hpp"

// Estimation of the second-order transition law from daily trajectory data.
//
// The raw material is a pair of counting processes indexed by day:
//   at_risk(h, j, s)    — subjects whose states on days (s-2, s-1) were
//                         (h, j) and whose day s is observed, i.e. histories
//                         that are about to produce a move recorded on day s;
//   events(h, j, l, s)  — among those, the ones that landed in l on day s.
// A subject whose record stops on day s-1 is not at risk for day s, so
// sum_l events(h, j, l, s) == at_risk(h, j, s) for every day.

namespace msm2 {

/// Day-indexed counts for one dataset.  Days are absolute (trajectories may
/// start on different days); slots before day 3 are structurally zero.
class PathCounts {
 public:
  int num_states() const { return m_; }
  int max_day() const { return max_day_; }
  std::int64_t num_subjects() const { return subjects_; }

  std::int64_t at_risk(int h, int j, int day) const;
  std::int64_t events(int h, int j, int l, int day) const;

  std::int64_t at_risk_total(int h, int j) const;
  std::int64_t events_total(int h, int j, int l) const;

  /// First / last day with at_risk(h, j, day) > 0; 0 when never at risk.
  int first_day(int h, int j) const;
  int last_day(int h, int j) const;

  /// Occurrences of the pair (h, j) on consecutive days, regardless of
  /// whether a next day was observed (at_risk additionally requires one).
  std::int64_t pair_seen(int h, int j) const;
  /// Occurrences of state h on any observed day.
  std::int64_t state_seen(int h) const;

 private:
  friend PathCounts count_paths(const std::vector<Trajectory>&,
                                const StateSpace&);
  friend PathCounts count_paths_serial(const std::vector<Trajectory>&,
                                       const StateSpace&);

  int m_ = 0;
  int max_day_ = 0;
  std::int64_t subjects_ = 0;
  std::vector<std::int64_t> y_;          // [(day) * m * m + h * m + j]
  std::vector<std::int64_t> n_;          // [((day) * m * m + h * m + j) * m + l]
  std::vector<std::int64_t> y_total_;    // [h * m + j]
  std::vector<std::int64_t> n_total_;    // [(h * m + j) * m + l]
  std::vector<std::int64_t> pair_seen_;  // [h * m + j]
  std::vector<std::int64_t> state_seen_; // [h]
  std::vector<int> first_day_;           // [h * m + j]
  std::vector<int> last_day_;            // [h * m + j]
};

/// Tallies the counting processes.  `count_paths` splits the dataset across
/// OpenMP threads and merges integer tallies (result independent of thread
/// count); `count_paths_serial` is the plain reference implementation used
/// to cross-check it.
PathCounts count_paths(const std::vector<Trajectory>& dataset,
                       const StateSpace& space);
PathCounts count_paths_serial(const std::vector<Trajectory>& dataset,
                              const StateSpace& space);

/// Occupation-time ratio estimate: total events over total at-risk days,
///   sum_s events(h,j,l,s) / sum_s at_risk(h,j,s).
/// Throws std::domain_error when the pair was never at risk.
double estimate_ratio(const PathCounts& counts, int h, int j, int l);

/// The same estimate in exact rational form (numerator/denominator as
/// tallied, not reduced).
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 0;
};
Fraction ratio_fraction(const PathCounts& counts, int h, int j, int l);

/// Day-conditional estimate: the average of the daily ratios
///   events(h,j,l,s) / at_risk(h,j,s)
/// over the days in [first_day, last_day] with positive at-risk count.
/// Weighs every day equally, whereas estimate_ratio weighs days by exposure.
/// Both coincide when the daily ratios are constant across days.
double estimate_conditional(const PathCounts& counts, int h, int j, int l);

enum class EstimateMethod { Ratio, Conditional };

/// A fitted tensor plus fit diagnostics.
struct TensorEstimate {
  TransitionTensor tensor;
  EstimateMethod method = EstimateMethod::Ratio;
  std::vector<std::int64_t> at_risk_totals;  // [h * m + j]
  /// Rows estimated from fewer at-risk days than the support threshold;
  /// their entries are kept (not zeroed) but flagged for the caller.
  std::vector<std::uint8_t> thin;            // [h * m + j]
  std::int64_t support_threshold = 10;
  /// |row sum - 1| per supported row, a diagnostic for the day-conditional
  /// method whose rows are averages and are deliberately not renormalized.
  std::vector<double> row_sum_deviation;     // [h * m + j]
};

/// Fits every observed history (h, j):
///   - transient j with at-risk days: the chosen estimator per target l;
///   - absorbing j observed after h: the row is the point mass on j (the
///     subject can only stay);
///   - absorbing h observed at all: only (h, h) is supported, point mass on h;
///   - histories never observed: unsupported zero rows (no error — a state
///     that never occurs simply leaves its slice of the tensor empty).
TensorEstimate estimate_tensor(const PathCounts& counts,
                               const StateSpace& space, EstimateMethod method,
                               std::int64_t support_threshold = 10);

/// First-order transition matrix estimate: transitions h -> j on consecutive
/// observed days over days at risk in h.  Rows of observed absorbing states
/// are point masses; rows of unseen states are zero.
Matrix estimate_first_order(const std::vector<Trajectory>& dataset,
                            const StateSpace& space);

/// Empirical law of the first two days (start-day distribution and first
/// move), for driving simulations from a fitted model.  Rows of first_step
/// for observed absorbing starters are point masses.
ChainInitialization estimate_initialization(
    const std::vector<Trajectory>& dataset, const StateSpace& space);

/// Two-step path table: for each observed direct move j -> l (j != l), how
/// the j-sojourn had been entered — from which previous state, or present
/// from the first observed day ("admission").  Only moves out of states j
/// that are enterable from some other state are reported; for states only
/// ever entered at admission the split is vacuous.
struct TwoStepPathRow {
  int via = -1;  // previous state, or kAdmission
  std::int64_t count = 0;
};

struct TwoStepPathSummary {
  static constexpr int kAdmission = -1;

  int from = 0;
  int to = 0;
  std::int64_t total = 0;
  std::vector<TwoStepPathRow> rows;  // via ascending, admission last
};

std::vector<TwoStepPathSummary> two_step_paths(
    const std::vector<Trajectory>& dataset, const StateSpace& space);

}  // namespace msm2
