#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "msm2/errors.hpp"
#include "msm2/estimate.hpp"
#include "msm2/model.hpp"
#include "msm2/simulate.hpp"
#include "support/fixtures.hpp"

using namespace msm2;

namespace {

Trajectory traj(std::string id, std::vector<int> one_based) {
  Trajectory t;
  t.subject_id = std::move(id);
  for (int s : one_based) t.states.push_back(s - 1);
  return t;
}

void check_counts_equal(const PathCounts& a, const PathCounts& b) {
  REQUIRE(a.num_states() == b.num_states());
  REQUIRE(a.max_day() == b.max_day());
  CHECK(a.num_subjects() == b.num_subjects());
  const int m = a.num_states();
  for (int h = 0; h < m; ++h) {
    CHECK(a.state_seen(h) == b.state_seen(h));
    for (int j = 0; j < m; ++j) {
      CHECK(a.at_risk_total(h, j) == b.at_risk_total(h, j));
      CHECK(a.pair_seen(h, j) == b.pair_seen(h, j));
      CHECK(a.first_day(h, j) == b.first_day(h, j));
      CHECK(a.last_day(h, j) == b.last_day(h, j));
      for (int day = 0; day <= a.max_day(); ++day)
        CHECK(a.at_risk(h, j, day) == b.at_risk(h, j, day));
      for (int l = 0; l < m; ++l) {
        CHECK(a.events_total(h, j, l) == b.events_total(h, j, l));
        for (int day = 0; day <= a.max_day(); ++day)
          CHECK(a.events(h, j, l, day) == b.events(h, j, l, day));
      }
    }
  }
}

}  // namespace

TEST_CASE("hospital counting processes hit the exact totals") {
  const StateSpace space = fixtures::hospital_space();
  const auto data = fixtures::hospital_dataset();
  const PathCounts counts = count_paths(data, space);

  CHECK(counts.num_subjects() == 14259);
  CHECK(counts.max_day() == 3);

  // History (NSP, NSP): all at-risk exposure sits on day 3.
  CHECK(counts.at_risk_total(0, 0) == 10577);
  CHECK(counts.at_risk(0, 0, 3) == 10577);
  CHECK(counts.at_risk(0, 0, 2) == 0);
  CHECK(counts.first_day(0, 0) == 3);
  CHECK(counts.last_day(0, 0) == 3);
  CHECK(counts.events_total(0, 0, 0) == 8919);
  CHECK(counts.events_total(0, 0, 1) == 257);
  CHECK(counts.events_total(0, 0, 5) == 1369);
  CHECK(counts.events_total(0, 0, 6) == 32);
  CHECK(counts.events_total(0, 0, 2) == 0);

  // Events always exhaust the at-risk set: a subject at risk on a day has
  // that day's landing state recorded.
  for (int h = 0; h < 7; ++h)
    for (int j = 0; j < 7; ++j)
      for (int day = 0; day <= counts.max_day(); ++day) {
        std::int64_t events = 0;
        for (int l = 0; l < 7; ++l) events += counts.events(h, j, l, day);
        CHECK(events == counts.at_risk(h, j, day));
      }

  CHECK(counts.at_risk_total(1, 1) == 2668);
  CHECK(counts.at_risk_total(1, 2) == 223);
  CHECK(counts.at_risk_total(1, 3) == 214);
  CHECK(counts.at_risk_total(1, 4) == 166);
  CHECK(counts.at_risk_total(0, 1) == 411);

  // A pair on the last two observed days is seen but never at risk.
  CHECK(counts.pair_seen(2, 2) == 207);
  CHECK(counts.at_risk_total(2, 2) == 0);

  const Fraction f = ratio_fraction(counts, 0, 0, 0);
  CHECK(f.num == 8919);
  CHECK(f.den == 10577);
  CHECK(estimate_ratio(counts, 0, 0, 0) == 8919.0 / 10577);
  CHECK(estimate_ratio(counts, 0, 1, 3) == 92.0 / 411);

  // With all exposure on one day the two estimators are the same number.
  for (int l : {1, 2, 3, 4, 6})
    CHECK(estimate_conditional(counts, 1, 1, l) ==
          estimate_ratio(counts, 1, 1, l));
}

TEST_CASE("parallel and serial counting agree field by field") {
  const StateSpace hospital = fixtures::hospital_space();
  const auto data = fixtures::hospital_dataset();
  check_counts_equal(count_paths(data, hospital),
                     count_paths_serial(data, hospital));

  const SimulationConfig config = fixtures::four_state_config(500, 12, 31);
  const auto cohort = simulate_cohort(config);
  check_counts_equal(count_paths(cohort, config.space),
                     count_paths_serial(cohort, config.space));
}

TEST_CASE("pooled and day-conditional estimators weigh days differently") {
  const StateSpace space = fixtures::hospital_space();
  std::vector<Trajectory> data;
  data.push_back(traj("A", {1, 2, 3}));
  data.push_back(traj("B", {1, 2, 2}));
  for (int i = 0; i < 8; ++i)
    data.push_back(traj("C" + std::to_string(i), {1, 1, 2, 2}));

  const PathCounts counts = count_paths(data, space);
  // (NSP, SP) is at risk on day 3 (2 subjects, 1 move to Recov) and on
  // day 4 (8 subjects, none moving).
  CHECK(counts.at_risk(0, 1, 3) == 2);
  CHECK(counts.at_risk(0, 1, 4) == 8);

  // Pooled: 1 move in 10 exposure days.  Day-conditional: average of the
  // daily rates 1/2 and 0/8.
  CHECK(estimate_ratio(counts, 0, 1, 2) == 0.1);
  CHECK(estimate_conditional(counts, 0, 1, 2) == 0.25);
  CHECK(estimate_ratio(counts, 0, 1, 1) == 0.9);
  CHECK(estimate_conditional(counts, 0, 1, 1) == 0.75);

  // Both estimators produce stochastic rows because daily events exhaust
  // the daily at-risk set.
  const TensorEstimate ratio = estimate_tensor(counts, space,
                                               EstimateMethod::Ratio);
  const TensorEstimate cond = estimate_tensor(counts, space,
                                              EstimateMethod::Conditional);
  for (const TensorEstimate* est : {&ratio, &cond})
    for (int h = 0; h < 7; ++h)
      for (int j = 0; j < 7; ++j)
        if (est->tensor.supported(h, j))
          CHECK(est->tensor.matrices[h].row_sum(j) ==
                doctest::Approx(1.0).epsilon(1e-12));

  // When the daily rates are constant the estimators coincide.
  std::vector<Trajectory> constant;
  constant.push_back(traj("D1", {1, 2, 3}));
  constant.push_back(traj("D2", {1, 2, 2}));
  constant.push_back(traj("D3", {1, 1, 2, 3}));
  constant.push_back(traj("D4", {1, 1, 2, 2}));
  const PathCounts cc = count_paths(constant, space);
  CHECK(estimate_conditional(cc, 0, 1, 2) == estimate_ratio(cc, 0, 1, 2));
  CHECK(estimate_ratio(cc, 0, 1, 2) == 0.5);

  // Thin-support flag: (NSP, NSP) has only 8 at-risk days here.
  CHECK(counts.at_risk_total(0, 0) == 8);
  CHECK(ratio.thin[0 * 7 + 0] == 1);
  CHECK(ratio.thin[0 * 7 + 1] == 0);
  CHECK(ratio.tensor.supported(0, 0));  // flagged, not dropped
}

TEST_CASE("fitting the hospital dataset reproduces the known tensor") {
  const StateSpace space = fixtures::hospital_space();
  const PathCounts counts = count_paths(fixtures::hospital_dataset(), space);
  const TensorEstimate est =
      estimate_tensor(counts, space, EstimateMethod::Ratio);
  const TransitionTensor want = fixtures::hospital_partial_tensor();

  CHECK_NOTHROW(est.tensor.check_valid(space));
  for (int h = 0; h < 7; ++h) {
    for (int j = 0; j < 7; ++j)
      CHECK(est.tensor.supported(h, j) == want.supported(h, j));
    CHECK(est.tensor.matrices[h] == want.matrices[h]);
  }
  CHECK(est.at_risk_totals[0 * 7 + 0] == 10577);
  for (int h = 0; h < 7; ++h)
    for (int j = 0; j < 7; ++j) CHECK(est.thin[h * 7 + j] == 0);
}

TEST_CASE("estimator errors") {
  const StateSpace space = fixtures::hospital_space();
  const PathCounts counts = count_paths(fixtures::hospital_dataset(), space);
  CHECK_THROWS_AS((void)estimate_ratio(counts, 2, 2, 2), std::domain_error);
  CHECK_THROWS_AS((void)estimate_ratio(counts, 7, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)count_paths({}, space), ValidationError);
  CHECK_THROWS_AS((void)count_paths({traj("oob", {1, 8})}, space),
                  ValidationError);
  Trajectory bad = traj("bad", {1, 1});
  bad.start_day = 0;
  CHECK_THROWS_AS((void)count_paths({bad}, space), ValidationError);

  const StateSpace three = fixtures::open_three_state_space();
  CHECK_THROWS_AS(
      (void)estimate_tensor(counts, three, EstimateMethod::Ratio),
      std::invalid_argument);
}

TEST_CASE("first-order matrix estimate") {
  const StateSpace space = fixtures::hospital_space();
  std::vector<Trajectory> data;
  for (int i = 0; i < 6; ++i) data.push_back(traj("a" + std::to_string(i), {1, 1}));
  for (int i = 0; i < 4; ++i) data.push_back(traj("b" + std::to_string(i), {1, 2}));
  data.push_back(traj("c", {2, 7}));

  const Matrix p = estimate_first_order(data, space);
  CHECK(p(0, 0) == 0.6);
  CHECK(p(0, 1) == 0.4);
  CHECK(p(1, 6) == 1.0);
  CHECK(p(6, 6) == 1.0);  // Death was observed, so its row is frozen
  CHECK(p.row_sum(5) == 0.0);  // Disch never appears
  CHECK(p.row_sum(2) == 0.0);  // Recov never appears
  CHECK(rows_stochastic_or_zero(p, 1e-12));
}

TEST_CASE("initialization estimate on the admissions cohort") {
  const StateSpace space = fixtures::hospital_space();
  const auto data = fixtures::admissions_dataset();
  const ChainInitialization init = estimate_initialization(data, space);

  CHECK(init.initial_dist[0] == 171.0 / 223);
  CHECK(init.initial_dist[1] == 52.0 / 223);
  CHECK(init.initial_dist[2] == 0.0);
  CHECK(init.first_step(0, 1) == 1.0);
  CHECK(init.first_step(1, 2) == 1.0);
  CHECK_NOTHROW(init.check_valid());
}

TEST_CASE("two-step path split on the admissions cohort") {
  const StateSpace space = fixtures::hospital_space();
  const auto summaries = two_step_paths(fixtures::admissions_dataset(), space);

  // Moves out of NSP are not split: nothing else can enter NSP, so every
  // NSP sojourn is an admission and the table would be vacuous.
  REQUIRE(summaries.size() == 1);
  const TwoStepPathSummary& s = summaries[0];
  CHECK(s.from == 1);
  CHECK(s.to == 2);
  CHECK(s.total == 223);
  REQUIRE(s.rows.size() == 2);
  CHECK(s.rows[0].via == 0);
  CHECK(s.rows[0].count == 171);
  CHECK(s.rows[1].via == TwoStepPathSummary::kAdmission);
  CHECK(s.rows[1].count == 52);
}

TEST_CASE("two-step entry attribution walks back through the sojourn") {
  const StateSpace space = fixtures::hospital_space();
  std::vector<Trajectory> data;
  data.push_back(traj("long", {1, 2, 2, 2, 3}));  // entered SP from NSP
  data.push_back(traj("direct", {2, 2, 3}));      // SP from admission
  data.push_back(traj("stay", {2, 2}));           // no move out: no row

  const auto summaries = two_step_paths(data, space);
  REQUIRE(summaries.size() == 1);
  CHECK(summaries[0].from == 1);
  CHECK(summaries[0].to == 2);
  CHECK(summaries[0].total == 2);
  REQUIRE(summaries[0].rows.size() == 2);
  CHECK(summaries[0].rows[0].via == 0);
  CHECK(summaries[0].rows[0].count == 1);
  CHECK(summaries[0].rows[1].via == TwoStepPathSummary::kAdmission);
  CHECK(summaries[0].rows[1].count == 1);
}

TEST_CASE("estimation error shrinks like the square root of the sample") {
  const auto rms_error = [](int n_subjects, std::uint64_t seed) {
    const SimulationConfig config = fixtures::four_state_config(n_subjects, 15, seed);
    const auto cohort = simulate_cohort(config);
    const PathCounts counts = count_paths(cohort, config.space);
    const TensorEstimate est =
        estimate_tensor(counts, config.space, EstimateMethod::Ratio);
    double sq = 0.0;
    int cells = 0;
    for (int h = 0; h < 4; ++h)
      for (int j = 0; j < 4; ++j) {
        REQUIRE(est.tensor.supported(h, j));
        for (int k = 0; k < 4; ++k) {
          const double diff = est.tensor.prob(h, j, k) -
                              config.tensor.prob(h, j, k);
          sq += diff * diff;
          ++cells;
        }
      }
    return std::sqrt(sq / cells);
  };

  const double coarse = rms_error(800, 71);
  const double fine = rms_error(16 * 800, 71);
  // A 16x sample should cut the root-mean-square error by about 4; allow a
  // generous band around that.
  CHECK(coarse / fine > 2.0);
  CHECK(coarse / fine < 8.0);
}
