#include "msm2/simulate.hpp"

#include <cstdio>
#include <deque>
#include <set>
#include <string>

#include "msm2/errors.hpp"
#include "msm2/rng.hpp"

namespace msm2 {

namespace {

// Inverse-CDF draw over a probability row in stored order.  Rounding can
// leave the running sum a hair short of 1, so the last positive entry
// catches any leftover of u.
int sample_row(std::span<const double> row, double u) {
  double cum = 0.0;
  int last = -1;
  for (int k = 0; k < static_cast<int>(row.size()); ++k) {
    const double p = row[k];
    if (p <= 0.0) continue;
    last = k;
    cum += p;
    if (u < cum) return k;
  }
  if (last < 0) throw ConfigError("cannot sample from an all-zero row");
  return last;
}

std::string subject_id(int index, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "S%0*d", width, index + 1);
  return buf;
}

int id_width(int n_subjects) {
  int width = 1, p = 1;
  while (n_subjects > p * 10 - 1 && width < 18) {
    p *= 10;
    ++width;
  }
  return width < 6 ? 6 : width;
}

}  // namespace

void SimulationConfig::check_valid() const {
  if (n_subjects < 1) throw ConfigError("n_subjects must be >= 1");
  if (t_max < 2) throw ConfigError("t_max must be >= 2");
  const int m = space.num_states();
  if (tensor.m != m && order == ChainOrder::Second)
    throw ConfigError("tensor size does not match state space");
  if (static_cast<int>(init.initial_dist.size()) != m)
    throw ConfigError("initialization size does not match state space");
  try {
    init.check_valid();
    if (order == ChainOrder::Second) tensor.check_valid(space);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }

  if (order == ChainOrder::First) return;

  // Walk the pairs reachable from the initialization.  Any reachable pair
  // with a transient current state must be supported, or a simulated subject
  // could land on a history with no defined next step.
  std::set<std::pair<int, int>> seen;
  std::deque<std::pair<int, int>> queue;
  for (int h = 0; h < m; ++h) {
    if (init.initial_dist[h] <= 0.0) continue;
    for (int j = 0; j < m; ++j)
      if (init.first_step(h, j) > 0.0 && seen.insert({h, j}).second)
        queue.push_back({h, j});
  }
  while (!queue.empty()) {
    const auto [h, j] = queue.front();
    queue.pop_front();
    if (space.is_absorbing(j)) continue;  // trajectory ends on entering j
    if (!tensor.supported(h, j))
      throw ConfigError("pair (" + std::to_string(h + 1) + "," +
                        std::to_string(j + 1) +
                        ") is reachable from the initialization but not "
                        "supported by the tensor");
    for (int k = 0; k < m; ++k)
      if (tensor.prob(h, j, k) > 0.0 && seen.insert({j, k}).second)
        queue.push_back({j, k});
  }
}

Trajectory sample_trajectory(const SimulationConfig& config,
                             int subject_index) {
  rng::Stream stream(config.seed,
                     static_cast<std::uint64_t>(subject_index));
  Trajectory traj;
  traj.subject_id = subject_id(subject_index, id_width(config.n_subjects));
  traj.start_day = 1;

  const int x1 = sample_row(config.init.initial_dist, stream.uniform());
  traj.states.push_back(x1);
  if (config.space.is_absorbing(x1) || config.t_max < 2) return traj;

  const int x2 = sample_row(config.init.first_step.row(x1), stream.uniform());
  traj.states.push_back(x2);

  while (static_cast<int>(traj.states.size()) < config.t_max) {
    const int cur = traj.states.back();
    if (config.space.is_absorbing(cur)) break;
    int next;
    if (config.order == ChainOrder::First) {
      next = sample_row(config.init.first_step.row(cur), stream.uniform());
    } else {
      const int prev = traj.states[traj.states.size() - 2];
      if (!config.tensor.supported(prev, cur))
        throw ConfigError("simulation reached unsupported pair (" +
                          std::to_string(prev + 1) + "," +
                          std::to_string(cur + 1) + ")");
      next = sample_row(config.tensor.matrices[prev].row(cur),
                        stream.uniform());
    }
    traj.states.push_back(next);
  }
  return traj;
}

std::vector<Trajectory> simulate_cohort_serial(const SimulationConfig& config) {
  config.check_valid();
  std::vector<Trajectory> out(config.n_subjects);
  for (int i = 0; i < config.n_subjects; ++i)
    out[i] = sample_trajectory(config, i);
  return out;
}

std::vector<Trajectory> simulate_cohort(const SimulationConfig& config) {
  config.check_valid();
  std::vector<Trajectory> out(config.n_subjects);
  // Each subject has its own stream, so iteration order is irrelevant.
#pragma omp parallel for schedule(static)
  for (int i = 0; i < config.n_subjects; ++i)
    out[i] = sample_trajectory(config, i);
  return out;
}

}  // namespace msm2
