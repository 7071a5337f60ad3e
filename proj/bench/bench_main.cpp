// Micro-benchmark comparing the OpenMP kernels against their serial
// reference implementations: cohort simulation, path counting, and the wild
// bootstrap.  Each pair is also cross-checked for identical results, so a
// speedup never comes at the cost of the deterministic contract.
//
// Usage: msm2_bench [n_subjects] [t_max] [resamples]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msm2/estimate.hpp"
#include "msm2/markov_test.hpp"
#include "msm2/model.hpp"
#include "msm2/rng.hpp"
#include "msm2/simulate.hpp"

namespace {

using msm2::ChainInitialization;
using msm2::ChainOrder;
using msm2::Matrix;
using msm2::PathCounts;
using msm2::SimulationConfig;
using msm2::StateSpace;
using msm2::TransitionTensor;

double time_once(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

/// Best of three runs, to take scheduling noise out of the ratio.
double best_of_three(const std::function<void()>& body) {
  double best = time_once(body);
  for (int i = 0; i < 2; ++i) best = std::min(best, time_once(body));
  return best;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-14s  serial %8.3fs   parallel %8.3fs   speedup %5.2fx   %s\n",
              name, serial, parallel, serial / parallel,
              identical ? "results identical" : "RESULTS DIFFER");
}

SimulationConfig bench_config(int n_subjects, int t_max) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) edges.emplace_back(a, b);
  const StateSpace space({"s1", "s2", "s3", "s4"}, edges, {});
  const int m = 4;
  TransitionTensor tensor = TransitionTensor::zeros(m);
  msm2::rng::Stream stream(987654, 0);
  for (int h = 0; h < m; ++h)
    for (int j = 0; j < m; ++j) {
      std::vector<double> row(m);
      double total = 0.0;
      for (int k = 0; k < m; ++k) total += row[k] = 0.05 + stream.uniform();
      for (double& v : row) v /= total;
      tensor.set_row(h, j, row, true);
    }
  ChainInitialization init;
  init.initial_dist.assign(m, 1.0 / m);
  init.first_step = Matrix(m, m);
  for (int h = 0; h < m; ++h)
    for (int j = 0; j < m; ++j) init.first_step(h, j) = 1.0 / m;
  return {space, tensor, init, n_subjects, t_max, 424242, ChainOrder::Second};
}

bool same_report(const msm2::MarkovTestReport& a,
                 const msm2::MarkovTestReport& b) {
  if (a.conditions.size() != b.conditions.size()) return false;
  for (std::size_t i = 0; i < a.conditions.size(); ++i)
    if (a.conditions[i].p_mean_abs != b.conditions[i].p_mean_abs ||
        a.conditions[i].p_weighted_abs != b.conditions[i].p_weighted_abs ||
        a.conditions[i].p_max_abs != b.conditions[i].p_max_abs)
      return false;
  return a.overall.p_mean_of_mean_abs == b.overall.p_mean_of_mean_abs &&
         a.overall.p_max_of_max_abs == b.overall.p_max_of_max_abs;
}

}  // namespace

int main(int argc, char** argv) {
  const int n_subjects = argc > 1 ? std::atoi(argv[1]) : 50000;
  const int t_max = argc > 2 ? std::atoi(argv[2]) : 60;
  const int resamples = argc > 3 ? std::atoi(argv[3]) : 2000;

#ifdef _OPENMP
  std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel kernels run serially\n");
#endif
  std::printf("cohort: %d subjects x %d days, bootstrap: %d resamples\n\n",
              n_subjects, t_max, resamples);

  const SimulationConfig config = bench_config(n_subjects, t_max);

  std::vector<msm2::Trajectory> cohort, cohort_serial;
  const double sim_par =
      best_of_three([&] { cohort = msm2::simulate_cohort(config); });
  const double sim_ser =
      best_of_three([&] { cohort_serial = msm2::simulate_cohort_serial(config); });
  bool sim_same = cohort.size() == cohort_serial.size();
  for (std::size_t i = 0; sim_same && i < cohort.size(); ++i)
    sim_same = cohort[i].subject_id == cohort_serial[i].subject_id &&
               cohort[i].start_day == cohort_serial[i].start_day &&
               cohort[i].states == cohort_serial[i].states;
  report("simulate", sim_ser, sim_par, sim_same);

  PathCounts counts, counts_serial;
  const double count_par =
      best_of_three([&] { counts = msm2::count_paths(cohort, config.space); });
  const double count_ser = best_of_three(
      [&] { counts_serial = msm2::count_paths_serial(cohort, config.space); });
  bool count_same = true;
  const int m = config.space.num_states();
  for (int h = 0; h < m && count_same; ++h)
    for (int j = 0; j < m && count_same; ++j) {
      count_same = counts.at_risk_total(h, j) == counts_serial.at_risk_total(h, j);
      for (int l = 0; l < m && count_same; ++l)
        count_same = counts.events_total(h, j, l) ==
                     counts_serial.events_total(h, j, l);
    }
  report("count paths", count_ser, count_par, count_same);

  const std::vector<double> grid = msm2::TestGrid{1.0, 11.0, 0.5}.points();
  msm2::MarkovTestReport rep_par, rep_ser;
  const double boot_par = best_of_three([&] {
    rep_par = msm2::wild_bootstrap_test(cohort, config.space, 1, 2, grid, {},
                                        resamples, 777);
  });
  const double boot_ser = best_of_three([&] {
    rep_ser = msm2::wild_bootstrap_test_serial(cohort, config.space, 1, 2, grid,
                                               {}, resamples, 777);
  });
  report("bootstrap", boot_ser, boot_par, same_report(rep_par, rep_ser));
  return 0;
}
