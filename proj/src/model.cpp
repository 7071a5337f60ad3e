#include "msm2/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "msm2/errors.hpp"

namespace msm2 {

namespace {

std::string state_name(const std::vector<std::string>& labels, int s) {
  // 1-based index plus label, the form used in all user-facing messages.
  std::ostringstream os;
  os << (s + 1);
  if (s >= 0 && s < static_cast<int>(labels.size()))
    os << " (" << labels[s] << ")";
  return os.str();
}

}  // namespace

StateSpace::StateSpace(std::vector<std::string> labels,
                       const std::vector<std::pair<int, int>>& edges,
                       const std::vector<int>& absorbing)
    : m_(static_cast<int>(labels.size())), labels_(std::move(labels)) {
  if (m_ < 2) throw ValidationError("state space needs at least 2 states");
  {
    std::set<std::string> seen;
    for (const auto& l : labels_) {
      if (l.empty()) throw ValidationError("empty state label");
      if (!seen.insert(l).second)
        throw ValidationError("duplicate state label \"" + l + "\"");
    }
  }

  absorbing_.assign(m_, 0);
  for (int a : absorbing) {
    if (a < 0 || a >= m_)
      throw ValidationError("absorbing state index out of range");
    absorbing_[a] = 1;
  }
  for (int s = 0; s < m_; ++s)
    if (absorbing_[s]) absorbing_list_.push_back(s);

  adjacency_.assign(static_cast<std::size_t>(m_) * m_, 0);
  for (auto [from, to] : edges) {
    if (from < 0 || from >= m_ || to < 0 || to >= m_)
      throw ValidationError("adjacency edge index out of range");
    if (absorbing_[from] && to != from)
      throw ValidationError("absorbing state " + state_name(labels_, from) +
                            " cannot have an outgoing edge");
    adjacency_[static_cast<std::size_t>(from) * m_ + to] = 1;
  }
  // Absorbing states always allow (exactly) staying put.
  for (int a : absorbing_list_)
    adjacency_[static_cast<std::size_t>(a) * m_ + a] = 1;

  for (int s = 0; s < m_; ++s) {
    if (absorbing_[s]) continue;
    bool any = false;
    for (int t = 0; t < m_ && !any; ++t) any = edge(s, t);
    if (!any)
      throw ValidationError("transient state " + state_name(labels_, s) +
                            " has no outgoing edge");
  }
}

StateSpace StateSpace::from_one_based(
    std::vector<std::string> labels,
    const std::vector<std::pair<int, int>>& edges,
    const std::vector<int>& absorbing) {
  std::vector<std::pair<int, int>> e0;
  e0.reserve(edges.size());
  for (auto [f, t] : edges) e0.emplace_back(f - 1, t - 1);
  std::vector<int> a0;
  a0.reserve(absorbing.size());
  for (int a : absorbing) a0.push_back(a - 1);
  return StateSpace(std::move(labels), e0, a0);
}

std::vector<int> StateSpace::successors(int s) const {
  std::vector<int> out;
  for (int t = 0; t < m_; ++t)
    if (edge(s, t)) out.push_back(t);
  return out;
}

std::vector<int> StateSpace::predecessors(int s) const {
  std::vector<int> out;
  for (int t = 0; t < m_; ++t)
    if (edge(t, s)) out.push_back(t);
  return out;
}

int StateSpace::index_of(const std::string& label) const {
  for (int s = 0; s < m_; ++s)
    if (labels_[s] == label) return s;
  throw ValidationError("unknown state label \"" + label + "\"");
}

ValidationReport validate_dataset(const std::vector<Trajectory>& dataset,
                                  const StateSpace& space, bool strict) {
  if (dataset.empty()) throw ValidationError("empty dataset");
  const int m = space.num_states();

  ValidationReport report;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Trajectory& traj = dataset[i];
    if (traj.start_day < 1)
      throw ValidationError("subject \"" + traj.subject_id +
                            "\": start day must be >= 1");
    if (traj.states.empty()) {
      report.violations.push_back({Violation::Kind::EmptyTrajectory, i,
                                   traj.subject_id, 0,
                                   "subject \"" + traj.subject_id +
                                       "\": empty trajectory"});
      continue;
    }
    bool flagged = false;
    for (int idx = 0; idx < traj.length(); ++idx) {
      const int s = traj.states[idx];
      if (s < 0 || s >= m) {
        std::ostringstream os;
        os << "subject \"" << traj.subject_id << "\": state index "
           << (s + 1) << " out of range on day " << traj.day_of(idx);
        throw ValidationError(os.str());
      }
      if (idx == 0) continue;
      const int prev = traj.states[idx - 1];
      if (space.is_absorbing(prev) && s != prev) {
        // A repeat of the absorbing state is tolerated (some sources pad
        // records); moving to anything else is not.
        std::ostringstream os;
        os << "subject \"" << traj.subject_id << "\": state after absorption"
           << " on day " << traj.day_of(idx) << " (" << space.label(prev)
           << " -> " << space.label(s) << ")";
        report.violations.push_back({Violation::Kind::StateAfterAbsorption, i,
                                     traj.subject_id, traj.day_of(idx),
                                     os.str()});
        flagged = true;
      } else if (!space.edge(prev, s)) {
        std::ostringstream os;
        os << "subject \"" << traj.subject_id << "\": illegal transition "
           << space.label(prev) << " -> " << space.label(s) << " on day "
           << traj.day_of(idx);
        report.violations.push_back({Violation::Kind::IllegalTransition, i,
                                     traj.subject_id, traj.day_of(idx),
                                     os.str()});
        flagged = true;
      }
    }
    if (flagged && (report.flagged.empty() || report.flagged.back() != i))
      report.flagged.push_back(i);
  }
  // Empty trajectories are flagged too.
  for (const Violation& v : report.violations)
    if (v.kind == Violation::Kind::EmptyTrajectory)
      report.flagged.push_back(v.trajectory_index);
  std::sort(report.flagged.begin(), report.flagged.end());
  report.flagged.erase(
      std::unique(report.flagged.begin(), report.flagged.end()),
      report.flagged.end());

  if (strict && !report.ok())
    throw ValidationError(report.violations.front().message +
                          (report.violations.size() > 1
                               ? " (and " +
                                     std::to_string(report.violations.size() -
                                                    1) +
                                     " more violations)"
                               : ""));
  return report;
}

TransitionTensor TransitionTensor::zeros(int m) {
  TransitionTensor t;
  t.m = m;
  t.matrices.assign(m, Matrix(m, m));
  t.support.assign(static_cast<std::size_t>(m) * m, 0);
  return t;
}

void TransitionTensor::set_row(int h, int j, std::span<const double> row,
                               bool is_supported) {
  for (int k = 0; k < m; ++k) matrices[h](j, k) = row[k];
  support[static_cast<std::size_t>(h) * m + j] = is_supported ? 1 : 0;
}

namespace {

void check_tensor_rows(const TransitionTensor& t, double tol) {
  if (t.m < 1 || static_cast<int>(t.matrices.size()) != t.m ||
      t.support.size() != static_cast<std::size_t>(t.m) * t.m)
    throw ValidationError("tensor has inconsistent dimensions");
  for (int h = 0; h < t.m; ++h) {
    if (t.matrices[h].rows() != t.m || t.matrices[h].cols() != t.m)
      throw ValidationError("tensor matrix has wrong shape");
    for (int j = 0; j < t.m; ++j) {
      double sum = 0.0;
      for (int k = 0; k < t.m; ++k) {
        const double v = t.prob(h, j, k);
        if (!(v >= -tol) || v > 1.0 + tol) {
          std::ostringstream os;
          os << "tensor entry (" << (h + 1) << "," << (j + 1) << ","
             << (k + 1) << ") = " << v << " outside [0,1]";
          throw ValidationError(os.str());
        }
        sum += v;
      }
      if (t.supported(h, j)) {
        if (std::abs(sum - 1.0) > tol) {
          std::ostringstream os;
          os << "supported row (" << (h + 1) << "," << (j + 1)
             << ") sums to " << sum << ", expected 1";
          throw ValidationError(os.str());
        }
      } else if (std::abs(sum) > tol) {
        std::ostringstream os;
        os << "unsupported row (" << (h + 1) << "," << (j + 1)
           << ") is not zero";
        throw ValidationError(os.str());
      }
    }
  }
}

}  // namespace

void TransitionTensor::check_valid(double tol) const {
  check_tensor_rows(*this, tol);
}

void TransitionTensor::check_valid(const StateSpace& space, double tol) const {
  if (space.num_states() != m)
    throw ValidationError("tensor size does not match state space");
  check_tensor_rows(*this, tol);
  for (int h = 0; h < m; ++h) {
    for (int j = 0; j < m; ++j) {
      if (supported(h, j) && !space.edge(h, j)) {
        std::ostringstream os;
        os << "supported row (" << (h + 1) << "," << (j + 1)
           << ") but " << space.label(h) << " -> " << space.label(j)
           << " is not a legal move";
        throw ValidationError(os.str());
      }
      for (int k = 0; k < m; ++k) {
        if (prob(h, j, k) > tol && !space.edge(j, k)) {
          std::ostringstream os;
          os << "tensor puts probability on illegal move " << space.label(j)
             << " -> " << space.label(k);
          throw ValidationError(os.str());
        }
      }
      if (space.is_absorbing(h)) {
        // A subject that reached an absorbing state stays: the only
        // supportable history is (h, h) and it must keep all mass on h.
        if (j != h && supported(h, j))
          throw ValidationError("row (" + std::to_string(h + 1) + "," +
                                std::to_string(j + 1) +
                                ") supported but state " + space.label(h) +
                                " is absorbing");
        if (j == h && supported(h, j) &&
            std::abs(prob(h, h, h) - 1.0) > tol)
          throw ValidationError("absorbing state " + space.label(h) +
                                " must stay put with probability 1");
      }
    }
  }
}

void ChainInitialization::check_valid(double tol) const {
  const int m = static_cast<int>(initial_dist.size());
  if (m < 1 || first_step.rows() != m || first_step.cols() != m)
    throw ValidationError("initialization has inconsistent dimensions");
  double sum = 0.0;
  for (double v : initial_dist) {
    if (v < -tol || v > 1.0 + tol)
      throw ValidationError("initial distribution entry outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > tol)
    throw ValidationError("initial distribution does not sum to 1");
  for (int h = 0; h < m; ++h) {
    double rs = 0.0;
    for (int j = 0; j < m; ++j) {
      const double v = first_step(h, j);
      if (v < -tol || v > 1.0 + tol)
        throw ValidationError("first-step entry outside [0,1]");
      rs += v;
    }
    if (initial_dist[h] > tol) {
      if (std::abs(rs - 1.0) > tol)
        throw ValidationError("first-step row " + std::to_string(h + 1) +
                              " does not sum to 1");
    } else if (std::abs(rs) > tol && std::abs(rs - 1.0) > tol) {
      throw ValidationError("first-step row " + std::to_string(h + 1) +
                            " must be stochastic or zero");
    }
  }
}

LiftedChain lift_to_pairs(const TransitionTensor& tensor,
                          const ChainInitialization& init) {
  const int m = tensor.m;
  if (static_cast<int>(init.initial_dist.size()) != m)
    throw ValidationError("initialization size does not match tensor");
  LiftedChain chain;
  chain.m = m;
  chain.matrix = Matrix(m * m, m * m);
  chain.initial.assign(static_cast<std::size_t>(m) * m, 0.0);
  for (int h = 0; h < m; ++h) {
    for (int j = 0; j < m; ++j) {
      chain.initial[chain.pair_index(h, j)] =
          init.initial_dist[h] * init.first_step(h, j);
      if (!tensor.supported(h, j)) continue;
      for (int k = 0; k < m; ++k)
        chain.matrix(chain.pair_index(h, j), chain.pair_index(j, k)) =
            tensor.prob(h, j, k);
    }
  }
  return chain;
}

}  // namespace msm2
