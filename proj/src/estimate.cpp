#include "msm2/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msm2/errors.hpp"

namespace msm2 {

namespace {

struct Tally {
  std::vector<std::int64_t> y, n, pair_seen, state_seen;

  explicit Tally(int m, int max_day) {
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    y.assign(static_cast<std::size_t>(max_day + 1) * mm, 0);
    n.assign(static_cast<std::size_t>(max_day + 1) * mm * m, 0);
    pair_seen.assign(mm, 0);
    state_seen.assign(m, 0);
  }

  void add(const Tally& other) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += other.y[i];
    for (std::size_t i = 0; i < n.size(); ++i) n[i] += other.n[i];
    for (std::size_t i = 0; i < pair_seen.size(); ++i)
      pair_seen[i] += other.pair_seen[i];
    for (std::size_t i = 0; i < state_seen.size(); ++i)
      state_seen[i] += other.state_seen[i];
  }

  void scan(const Trajectory& traj, int m) {
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    const int len = traj.length();
    for (int i = 0; i < len; ++i) ++state_seen[traj.states[i]];
    for (int i = 0; i + 1 < len; ++i)
      ++pair_seen[static_cast<std::size_t>(traj.states[i]) * m +
                  traj.states[i + 1]];
    // A triple (h, j, l) landing on day s contributes one at-risk count for
    // (h, j) on day s and one event for l; a pair with no observed next day
    // contributes to neither.
    for (int i = 0; i + 2 < len; ++i) {
      const int h = traj.states[i];
      const int j = traj.states[i + 1];
      const int l = traj.states[i + 2];
      const int day = traj.day_of(i + 2);
      const std::size_t hj = static_cast<std::size_t>(h) * m + j;
      ++y[static_cast<std::size_t>(day) * mm + hj];
      ++n[(static_cast<std::size_t>(day) * mm + hj) * m + l];
    }
  }
};

struct DayTotals {
  std::vector<std::int64_t> y_total, n_total;
  std::vector<int> first_day, last_day;
};

DayTotals totals_from(const Tally& tally, int m, int max_day) {
  const std::size_t mm = static_cast<std::size_t>(m) * m;
  DayTotals t;
  t.y_total.assign(mm, 0);
  t.n_total.assign(mm * m, 0);
  t.first_day.assign(mm, 0);
  t.last_day.assign(mm, 0);
  for (int day = 0; day <= max_day; ++day) {
    for (std::size_t hj = 0; hj < mm; ++hj) {
      const std::int64_t yd = tally.y[static_cast<std::size_t>(day) * mm + hj];
      if (yd == 0) continue;
      t.y_total[hj] += yd;
      if (t.first_day[hj] == 0) t.first_day[hj] = day;
      t.last_day[hj] = day;
      for (int l = 0; l < m; ++l)
        t.n_total[hj * m + l] +=
            tally.n[(static_cast<std::size_t>(day) * mm + hj) * m + l];
    }
  }
  return t;
}

int dataset_max_day(const std::vector<Trajectory>& dataset) {
  int max_day = 0;
  for (const Trajectory& t : dataset)
    if (!t.states.empty()) max_day = std::max(max_day, t.last_day());
  return max_day;
}

void check_dataset(const std::vector<Trajectory>& dataset,
                   const StateSpace& space) {
  if (dataset.empty()) throw ValidationError("empty dataset");
  const int m = space.num_states();
  for (const Trajectory& t : dataset) {
    if (t.start_day < 1)
      throw ValidationError("subject \"" + t.subject_id +
                            "\": start day must be >= 1");
    for (int s : t.states)
      if (s < 0 || s >= m)
        throw ValidationError("subject \"" + t.subject_id +
                              "\": state index out of range");
  }
}

}  // namespace

std::int64_t PathCounts::at_risk(int h, int j, int day) const {
  if (day < 0 || day > max_day_) return 0;
  return y_[static_cast<std::size_t>(day) * m_ * m_ +
            static_cast<std::size_t>(h) * m_ + j];
}

std::int64_t PathCounts::events(int h, int j, int l, int day) const {
  if (day < 0 || day > max_day_) return 0;
  return n_[(static_cast<std::size_t>(day) * m_ * m_ +
             static_cast<std::size_t>(h) * m_ + j) *
                m_ +
            l];
}

std::int64_t PathCounts::at_risk_total(int h, int j) const {
  return y_total_[static_cast<std::size_t>(h) * m_ + j];
}

std::int64_t PathCounts::events_total(int h, int j, int l) const {
  return n_total_[(static_cast<std::size_t>(h) * m_ + j) * m_ + l];
}

int PathCounts::first_day(int h, int j) const {
  return first_day_[static_cast<std::size_t>(h) * m_ + j];
}

int PathCounts::last_day(int h, int j) const {
  return last_day_[static_cast<std::size_t>(h) * m_ + j];
}

std::int64_t PathCounts::pair_seen(int h, int j) const {
  return pair_seen_[static_cast<std::size_t>(h) * m_ + j];
}

std::int64_t PathCounts::state_seen(int h) const { return state_seen_[h]; }

PathCounts count_paths_serial(const std::vector<Trajectory>& dataset,
                              const StateSpace& space) {
  check_dataset(dataset, space);
  const int m = space.num_states();
  const int max_day = dataset_max_day(dataset);
  Tally tally(m, max_day);
  for (const Trajectory& traj : dataset) tally.scan(traj, m);

  PathCounts counts;
  counts.m_ = m;
  counts.max_day_ = max_day;
  counts.subjects_ = static_cast<std::int64_t>(dataset.size());
  DayTotals totals = totals_from(tally, m, max_day);
  counts.y_ = std::move(tally.y);
  counts.n_ = std::move(tally.n);
  counts.pair_seen_ = std::move(tally.pair_seen);
  counts.state_seen_ = std::move(tally.state_seen);
  counts.y_total_ = std::move(totals.y_total);
  counts.n_total_ = std::move(totals.n_total);
  counts.first_day_ = std::move(totals.first_day);
  counts.last_day_ = std::move(totals.last_day);
  return counts;
}

PathCounts count_paths(const std::vector<Trajectory>& dataset,
                       const StateSpace& space) {
  check_dataset(dataset, space);
  const int m = space.num_states();
  const int max_day = dataset_max_day(dataset);
  const std::int64_t n = static_cast<std::int64_t>(dataset.size());

  Tally total(m, max_day);
#ifdef _OPENMP
#pragma omp parallel
  {
    Tally local(m, max_day);
#pragma omp for schedule(static) nowait
    for (std::int64_t i = 0; i < n; ++i) local.scan(dataset[i], m);
    // Integer tallies: the merge order cannot change the result.
#pragma omp critical(msm2_count_paths_merge)
    total.add(local);
  }
#else
  for (std::int64_t i = 0; i < n; ++i) total.scan(dataset[i], m);
#endif

  PathCounts counts;
  counts.m_ = m;
  counts.max_day_ = max_day;
  counts.subjects_ = n;
  DayTotals totals = totals_from(total, m, max_day);
  counts.y_ = std::move(total.y);
  counts.n_ = std::move(total.n);
  counts.pair_seen_ = std::move(total.pair_seen);
  counts.state_seen_ = std::move(total.state_seen);
  counts.y_total_ = std::move(totals.y_total);
  counts.n_total_ = std::move(totals.n_total);
  counts.first_day_ = std::move(totals.first_day);
  counts.last_day_ = std::move(totals.last_day);
  return counts;
}

namespace {

void check_pair_at_risk(const PathCounts& counts, int h, int j) {
  const int m = counts.num_states();
  if (h < 0 || h >= m || j < 0 || j >= m)
    throw std::invalid_argument("state index out of range");
  if (counts.at_risk_total(h, j) == 0)
    throw std::domain_error("history (" + std::to_string(h + 1) + "," +
                            std::to_string(j + 1) + ") was never at risk");
}

}  // namespace

double estimate_ratio(const PathCounts& counts, int h, int j, int l) {
  check_pair_at_risk(counts, h, j);
  return static_cast<double>(counts.events_total(h, j, l)) /
         static_cast<double>(counts.at_risk_total(h, j));
}

Fraction ratio_fraction(const PathCounts& counts, int h, int j, int l) {
  check_pair_at_risk(counts, h, j);
  return {counts.events_total(h, j, l), counts.at_risk_total(h, j)};
}

double estimate_conditional(const PathCounts& counts, int h, int j, int l) {
  check_pair_at_risk(counts, h, j);
  double acc = 0.0;
  std::int64_t days = 0;
  for (int day = counts.first_day(h, j); day <= counts.last_day(h, j); ++day) {
    const std::int64_t y = counts.at_risk(h, j, day);
    if (y == 0) continue;
    acc += static_cast<double>(counts.events(h, j, l, day)) /
           static_cast<double>(y);
    ++days;
  }
  return acc / static_cast<double>(days);
}

TensorEstimate estimate_tensor(const PathCounts& counts,
                               const StateSpace& space, EstimateMethod method,
                               std::int64_t support_threshold) {
  const int m = space.num_states();
  if (counts.num_states() != m)
    throw std::invalid_argument("counts do not match state space");

  TensorEstimate est;
  est.method = method;
  est.tensor = TransitionTensor::zeros(m);
  est.support_threshold = support_threshold;
  est.at_risk_totals.assign(static_cast<std::size_t>(m) * m, 0);
  est.thin.assign(static_cast<std::size_t>(m) * m, 0);
  est.row_sum_deviation.assign(static_cast<std::size_t>(m) * m, 0.0);

  std::vector<double> row(m);
  for (int h = 0; h < m; ++h) {
    for (int j = 0; j < m; ++j) {
      const std::size_t hj = static_cast<std::size_t>(h) * m + j;
      std::fill(row.begin(), row.end(), 0.0);

      if (space.is_absorbing(h)) {
        // Only the frozen history (h, h) exists for an absorbing h, and only
        // if the state shows up in the data at all.
        if (j == h && counts.state_seen(h) > 0) {
          row[h] = 1.0;
          est.tensor.set_row(h, j, row, true);
        }
        continue;
      }
      if (space.is_absorbing(j)) {
        // Entering an absorbing state ends the evolution; the row is the
        // point mass on j whenever the entry h -> j was observed.
        if (counts.pair_seen(h, j) > 0 && space.edge(h, j)) {
          row[j] = 1.0;
          est.tensor.set_row(h, j, row, true);
        }
        continue;
      }

      const std::int64_t at_risk = counts.at_risk_total(h, j);
      est.at_risk_totals[hj] = at_risk;
      if (at_risk == 0) continue;  // never observed with a next day: no row

      for (int l = 0; l < m; ++l) {
        if (!space.edge(j, l)) continue;  // no probability off the adjacency
        row[l] = method == EstimateMethod::Ratio
                     ? estimate_ratio(counts, h, j, l)
                     : estimate_conditional(counts, h, j, l);
      }
      est.tensor.set_row(h, j, row, true);
      est.thin[hj] = at_risk < support_threshold ? 1 : 0;
      double sum = 0.0;
      for (double v : row) sum += v;
      est.row_sum_deviation[hj] = std::abs(sum - 1.0);
    }
  }
  return est;
}

Matrix estimate_first_order(const std::vector<Trajectory>& dataset,
                            const StateSpace& space) {
  check_dataset(dataset, space);
  const int m = space.num_states();
  std::vector<std::int64_t> moves(static_cast<std::size_t>(m) * m, 0);
  std::vector<std::int64_t> at_risk(m, 0);
  std::vector<std::int64_t> seen(m, 0);
  for (const Trajectory& traj : dataset) {
    for (int i = 0; i < traj.length(); ++i) ++seen[traj.states[i]];
    for (int i = 0; i + 1 < traj.length(); ++i) {
      ++at_risk[traj.states[i]];
      ++moves[static_cast<std::size_t>(traj.states[i]) * m +
              traj.states[i + 1]];
    }
  }
  Matrix out(m, m);
  for (int h = 0; h < m; ++h) {
    if (space.is_absorbing(h)) {
      if (seen[h] > 0) out(h, h) = 1.0;
      continue;
    }
    if (at_risk[h] == 0) continue;
    for (int j = 0; j < m; ++j)
      out(h, j) = static_cast<double>(moves[static_cast<std::size_t>(h) * m + j]) /
                  static_cast<double>(at_risk[h]);
  }
  return out;
}

ChainInitialization estimate_initialization(
    const std::vector<Trajectory>& dataset, const StateSpace& space) {
  check_dataset(dataset, space);
  const int m = space.num_states();
  std::vector<std::int64_t> starts(m, 0);
  std::vector<std::int64_t> with_second(m, 0);
  std::vector<std::int64_t> first_move(static_cast<std::size_t>(m) * m, 0);
  std::int64_t n = 0;
  for (const Trajectory& traj : dataset) {
    if (traj.states.empty()) continue;
    ++n;
    const int h = traj.states.front();
    ++starts[h];
    if (traj.length() >= 2) {
      ++with_second[h];
      ++first_move[static_cast<std::size_t>(h) * m + traj.states[1]];
    }
  }
  if (n == 0) throw ValidationError("no non-empty trajectories");

  ChainInitialization init;
  init.initial_dist.assign(m, 0.0);
  init.first_step = Matrix(m, m);
  for (int h = 0; h < m; ++h) {
    init.initial_dist[h] =
        static_cast<double>(starts[h]) / static_cast<double>(n);
    if (space.is_absorbing(h)) {
      if (starts[h] > 0) init.first_step(h, h) = 1.0;
      continue;
    }
    if (with_second[h] == 0) continue;
    for (int j = 0; j < m; ++j)
      init.first_step(h, j) =
          static_cast<double>(first_move[static_cast<std::size_t>(h) * m + j]) /
          static_cast<double>(with_second[h]);
  }
  return init;
}

std::vector<TwoStepPathSummary> two_step_paths(
    const std::vector<Trajectory>& dataset, const StateSpace& space) {
  check_dataset(dataset, space);
  const int m = space.num_states();

  // counts[(j, l)][via] with via = -1 for admission entries.
  std::map<std::pair<int, int>, std::map<int, std::int64_t>> counts;
  for (const Trajectory& traj : dataset) {
    for (int i = 0; i + 1 < traj.length(); ++i) {
      const int j = traj.states[i];
      const int l = traj.states[i + 1];
      if (j == l) continue;
      // Walk back to the start of the current j-sojourn to find how it was
      // entered; a sojourn starting on the first observed day counts as an
      // admission entry.
      int b = i;
      while (b > 0 && traj.states[b - 1] == j) --b;
      const int via =
          b == 0 ? TwoStepPathSummary::kAdmission : traj.states[b - 1];
      ++counts[{j, l}][via];
    }
  }

  std::vector<TwoStepPathSummary> out;
  for (const auto& [move, via_counts] : counts) {
    const auto [j, l] = move;
    // The split is only informative for states enterable from elsewhere.
    bool enterable = false;
    for (int k = 0; k < m && !enterable; ++k)
      enterable = k != j && space.edge(k, j);
    if (!enterable) continue;

    TwoStepPathSummary summary;
    summary.from = j;
    summary.to = l;
    for (const auto& [via, c] : via_counts) {
      if (via == TwoStepPathSummary::kAdmission) continue;
      summary.rows.push_back({via, c});
      summary.total += c;
    }
    if (auto it = via_counts.find(TwoStepPathSummary::kAdmission);
        it != via_counts.end()) {
      summary.rows.push_back({TwoStepPathSummary::kAdmission, it->second});
      summary.total += it->second;
    }
    out.push_back(std::move(summary));
  }
  return out;
}

}  // namespace msm2
