#include "support/fixtures.hpp"

#include <cstdio>
#include <string>

#include "msm2/rng.hpp"

namespace fixtures {

using msm2::ChainInitialization;
using msm2::Matrix;
using msm2::SimulationConfig;
using msm2::StateSpace;
using msm2::Trajectory;
using msm2::TransitionTensor;

StateSpace hospital_space() {
  return StateSpace::from_one_based(
      {"NSP", "SP", "Recov", "NIMV", "IMV", "Disch", "Death"},
      {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5},          // stays
       {1, 2}, {1, 6}, {1, 7},                          // out of NSP
       {2, 3}, {2, 4}, {2, 5}, {2, 7},                  // out of SP
       {3, 6}, {3, 7},                                  // out of Recov
       {4, 3}, {4, 5}, {4, 7},                          // out of NIMV
       {5, 3}, {5, 7}},                                 // out of IMV
      {6, 7});
}

namespace {

struct TripleCount {
  int h, j, l;  // 1-based states of a three-day path
  int count;
};

// Each subject contributes exactly one at-risk day for (h, j) and one event
// landing in l, so totals below are exact by construction.
constexpr TripleCount kHospitalTriples[] = {
    // history (1,1): 10577 at-risk days
    {1, 1, 1, 8919},
    {1, 1, 2, 257},
    {1, 1, 6, 1369},
    {1, 1, 7, 32},
    // history (1,2): 411
    {1, 2, 2, 253},
    {1, 2, 3, 3},
    {1, 2, 4, 92},
    {1, 2, 5, 62},
    {1, 2, 7, 1},
    // history (2,2): 2668
    {2, 2, 2, 2307},
    {2, 2, 3, 220},
    {2, 2, 4, 68},
    {2, 2, 5, 49},
    {2, 2, 7, 24},
    // history (2,3): 223
    {2, 3, 3, 207},
    {2, 3, 6, 16},
    // history (2,4): 214
    {2, 4, 3, 6},
    {2, 4, 4, 159},
    {2, 4, 5, 45},
    {2, 4, 7, 4},
    // history (2,5): 166
    {2, 5, 3, 3},
    {2, 5, 5, 160},
    {2, 5, 7, 3},
};

}  // namespace

std::vector<Trajectory> hospital_dataset() {
  std::vector<Trajectory> out;
  int serial = 0;
  char buf[16];
  for (const TripleCount& t : kHospitalTriples) {
    for (int c = 0; c < t.count; ++c) {
      std::snprintf(buf, sizeof(buf), "H%05d", ++serial);
      Trajectory traj;
      traj.subject_id = buf;
      traj.start_day = 1;
      traj.states = {t.h - 1, t.j - 1, t.l - 1};
      out.push_back(std::move(traj));
    }
  }
  return out;
}

TransitionTensor hospital_partial_tensor() {
  TransitionTensor t = TransitionTensor::zeros(7);
  const auto set = [&](int h, int j, std::vector<double> row) {
    t.set_row(h - 1, j - 1, row, true);
  };
  // Previous state 1: histories (1,1), (1,2) estimated; entries into the
  // absorbing states are frozen there.
  set(1, 1, {8919.0 / 10577, 257.0 / 10577, 0, 0, 0, 1369.0 / 10577,
             32.0 / 10577});
  set(1, 2, {0, 253.0 / 411, 3.0 / 411, 92.0 / 411, 62.0 / 411, 0, 1.0 / 411});
  set(1, 6, {0, 0, 0, 0, 0, 1, 0});
  set(1, 7, {0, 0, 0, 0, 0, 0, 1});
  // Previous state 2.
  set(2, 2, {0, 2307.0 / 2668, 220.0 / 2668, 68.0 / 2668, 49.0 / 2668, 0,
             24.0 / 2668});
  set(2, 3, {0, 0, 207.0 / 223, 0, 0, 16.0 / 223, 0});
  set(2, 4, {0, 0, 6.0 / 214, 159.0 / 214, 45.0 / 214, 0, 4.0 / 214});
  set(2, 5, {0, 0, 3.0 / 166, 0, 160.0 / 166, 0, 3.0 / 166});
  set(2, 7, {0, 0, 0, 0, 0, 0, 1});
  // Observed entries into the absorbing states are frozen there.
  set(3, 6, {0, 0, 0, 0, 0, 1, 0});
  set(4, 7, {0, 0, 0, 0, 0, 0, 1});
  set(5, 7, {0, 0, 0, 0, 0, 0, 1});
  // Absorbing states stay put.
  set(6, 6, {0, 0, 0, 0, 0, 1, 0});
  set(7, 7, {0, 0, 0, 0, 0, 0, 1});
  return t;
}

std::vector<Trajectory> admissions_dataset() {
  std::vector<Trajectory> out;
  int serial = 0;
  char buf[16];
  const auto add = [&](std::vector<int> states_1based, int count) {
    for (int c = 0; c < count; ++c) {
      std::snprintf(buf, sizeof(buf), "A%04d", ++serial);
      Trajectory traj;
      traj.subject_id = buf;
      traj.start_day = 1;
      for (int s : states_1based) traj.states.push_back(s - 1);
      out.push_back(std::move(traj));
    }
  };
  add({1, 2, 3}, 171);  // entered state 2 from state 1, then moved to 3
  add({2, 3}, 52);      // admitted directly into state 2
  return out;
}

TransitionTensor random_full_tensor(int m, std::uint64_t seed) {
  msm2::rng::Stream stream(seed, 0);
  TransitionTensor t = TransitionTensor::zeros(m);
  std::vector<double> row(m);
  for (int h = 0; h < m; ++h) {
    for (int j = 0; j < m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < m; ++k) {
        row[k] = 0.05 + stream.uniform();
        sum += row[k];
      }
      for (int k = 0; k < m; ++k) row[k] /= sum;
      t.set_row(h, j, row, true);
    }
  }
  return t;
}

ChainInitialization random_initialization(int m, std::uint64_t seed) {
  msm2::rng::Stream stream(seed, 1);
  ChainInitialization init;
  init.initial_dist.assign(m, 0.0);
  double sum = 0.0;
  for (int h = 0; h < m; ++h) {
    init.initial_dist[h] = 0.05 + stream.uniform();
    sum += init.initial_dist[h];
  }
  for (int h = 0; h < m; ++h) init.initial_dist[h] /= sum;
  init.first_step = Matrix(m, m);
  for (int h = 0; h < m; ++h) {
    double rs = 0.0;
    for (int j = 0; j < m; ++j) {
      init.first_step(h, j) = 0.05 + stream.uniform();
      rs += init.first_step(h, j);
    }
    for (int j = 0; j < m; ++j) init.first_step(h, j) /= rs;
  }
  return init;
}

StateSpace open_three_state_space() {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) edges.emplace_back(a, b);
  return StateSpace({"s1", "s2", "s3"}, edges, {});
}

namespace {

ChainInitialization three_state_init() {
  ChainInitialization init;
  init.initial_dist = {0.5, 0.3, 0.2};
  init.first_step = Matrix(3, 3);
  const double rows[3][3] = {
      {0.40, 0.40, 0.20}, {0.30, 0.45, 0.25}, {0.25, 0.35, 0.40}};
  for (int h = 0; h < 3; ++h)
    for (int j = 0; j < 3; ++j) init.first_step(h, j) = rows[h][j];
  return init;
}

}  // namespace

SimulationConfig first_order_config(int n_subjects, int t_max,
                                    std::uint64_t seed) {
  SimulationConfig config{
      .space = open_three_state_space(),
      .tensor = TransitionTensor::zeros(3),
      .init = three_state_init(),
      .n_subjects = n_subjects,
      .t_max = t_max,
      .seed = seed,
      .order = msm2::ChainOrder::First,
  };
  return config;
}

SimulationConfig second_order_config(int n_subjects, int t_max,
                                     std::uint64_t seed) {
  TransitionTensor t = TransitionTensor::zeros(3);
  // Row (h, j) over the next state; the 2 -> 3 hazard (row j = 2) moves
  // strongly with the previous state h: 0.50 / 0.10 / 0.30.
  const double rows[3][3][3] = {
      {{0.40, 0.40, 0.20}, {0.15, 0.35, 0.50}, {0.30, 0.40, 0.30}},
      {{0.50, 0.30, 0.20}, {0.30, 0.60, 0.10}, {0.25, 0.25, 0.50}},
      {{0.45, 0.35, 0.20}, {0.20, 0.50, 0.30}, {0.40, 0.30, 0.30}}};
  for (int h = 0; h < 3; ++h)
    for (int j = 0; j < 3; ++j)
      t.set_row(h, j, rows[h][j], true);

  ChainInitialization init;
  init.initial_dist = {0.5, 0.3, 0.2};
  init.first_step = Matrix(3, 3);
  const double fs[3][3] = {
      {0.40, 0.40, 0.20}, {0.35, 0.40, 0.25}, {0.30, 0.30, 0.40}};
  for (int h = 0; h < 3; ++h)
    for (int j = 0; j < 3; ++j) init.first_step(h, j) = fs[h][j];

  return SimulationConfig{
      .space = open_three_state_space(),
      .tensor = std::move(t),
      .init = std::move(init),
      .n_subjects = n_subjects,
      .t_max = t_max,
      .seed = seed,
      .order = msm2::ChainOrder::Second,
  };
}

StateSpace open_four_state_space() {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) edges.emplace_back(a, b);
  return StateSpace({"q1", "q2", "q3", "q4"}, edges, {});
}

SimulationConfig four_state_config(int n_subjects, int t_max,
                                   std::uint64_t seed) {
  return SimulationConfig{
      .space = open_four_state_space(),
      .tensor = random_full_tensor(4, 20240),
      .init = random_initialization(4, 20240),
      .n_subjects = n_subjects,
      .t_max = t_max,
      .seed = seed,
      .order = msm2::ChainOrder::Second,
  };
}

HandLogrank hand_logrank_fixture() {
  HandLogrank f{.space = StateSpace::from_one_based(
                    {"A", "B", "C"}, {{1, 1}, {1, 2}, {3, 1}, {3, 3}}, {2}),
                .dataset = {},
                .from = 0,
                .to = 1,
                .cond = 2};
  const auto traj = [](const char* id, std::vector<int> states_1based) {
    Trajectory t;
    t.subject_id = id;
    t.start_day = 1;
    for (int s : states_1based) t.states.push_back(s - 1);
    return t;
  };
  // One A -> B move on day 3; two of the four at-risk subjects sat in C on
  // day 1, and the mover is one of them.
  f.dataset = {traj("h1", {3, 1, 2}), traj("h2", {3, 1, 1}),
               traj("h3", {1, 1, 1}), traj("h4", {1, 1, 1})};
  return f;
}

}  // namespace fixtures
