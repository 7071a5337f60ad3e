#include "msm2/propagate.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace msm2 {

namespace {

// One application of the tensor to a distribution over (prev, current)
// pairs.  Mass sitting on an unsupported pair has no defined continuation
// and is added to `lost` instead of being propagated.
void step_pairs(const TransitionTensor& t, const std::vector<double>& w,
                std::vector<double>& next, double& lost) {
  const int m = t.m;
  std::fill(next.begin(), next.end(), 0.0);
  for (int h = 0; h < m; ++h) {
    for (int j = 0; j < m; ++j) {
      const double mass = w[static_cast<std::size_t>(h) * m + j];
      if (mass == 0.0) continue;
      if (!t.supported(h, j)) {
        lost += mass;
        continue;
      }
      const auto row = t.matrices[h].row(j);
      double* out = next.data() + static_cast<std::size_t>(j) * m;
      for (int k = 0; k < m; ++k) out[k] += mass * row[k];
    }
  }
}

void check_state(const TransitionTensor& t, int s, const char* what) {
  if (s < 0 || s >= t.m)
    throw std::invalid_argument(std::string(what) + " state index " +
                                std::to_string(s + 1) + " out of range");
}

}  // namespace

NStepDistribution n_step_distribution(const TransitionTensor& tensor, int prev,
                                      int current, int n) {
  check_state(tensor, prev, "previous");
  check_state(tensor, current, "current");
  if (n < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!tensor.supported(prev, current))
    throw std::domain_error("history (" + std::to_string(prev + 1) + "," +
                            std::to_string(current + 1) +
                            ") is not supported by the tensor");

  const int m = tensor.m;
  std::vector<double> w(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> next(w.size());
  w[static_cast<std::size_t>(prev) * m + current] = 1.0;
  double lost = 0.0;
  // The pair (prev, current) spans days (s, s+1); the state n days after
  // day s+1 is reached after n + 1 one-day moves of the pair process.
  for (int step = 0; step < n + 1; ++step) {
    step_pairs(tensor, w, next, lost);
    w.swap(next);
  }
  NStepDistribution out;
  out.probabilities.assign(m, 0.0);
  for (int k = 0; k < m; ++k)
    for (int l = 0; l < m; ++l)
      out.probabilities[l] += w[static_cast<std::size_t>(k) * m + l];
  out.lost_mass = lost;
  return out;
}

PredictionCurve prediction_curve(const TransitionTensor& tensor, int prev,
                                 int current, int target, int n_max) {
  check_state(tensor, prev, "previous");
  check_state(tensor, current, "current");
  check_state(tensor, target, "target");
  if (n_max < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!tensor.supported(prev, current))
    throw std::domain_error("history (" + std::to_string(prev + 1) + "," +
                            std::to_string(current + 1) +
                            ") is not supported by the tensor");

  const int m = tensor.m;
  PredictionCurve curve;
  curve.prev = prev;
  curve.current = current;
  curve.target = target;
  curve.values.reserve(n_max);

  std::vector<double> w(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> next(w.size());
  w[static_cast<std::size_t>(prev) * m + current] = 1.0;
  double lost = 0.0;
  for (int step = 1; step <= n_max + 1; ++step) {
    step_pairs(tensor, w, next, lost);
    w.swap(next);
    if (step >= 2) {
      // After `step` moves the pair process covers horizon n = step - 1.
      double p = 0.0;
      for (int k = 0; k < m; ++k)
        p += w[static_cast<std::size_t>(k) * m + target];
      curve.values.push_back(p);
    }
  }
  curve.lost_mass = lost;
  return curve;
}

std::vector<double> state_occupation(const TransitionTensor& tensor,
                                     const ChainInitialization& init,
                                     int day) {
  if (day < 1) throw std::invalid_argument("day must be >= 1");
  const int m = tensor.m;
  if (static_cast<int>(init.initial_dist.size()) != m)
    throw std::invalid_argument("initialization size does not match tensor");
  if (day == 1) return init.initial_dist;

  std::vector<double> w(static_cast<std::size_t>(m) * m, 0.0);
  std::vector<double> next(w.size());
  for (int h = 0; h < m; ++h)
    for (int j = 0; j < m; ++j)
      w[static_cast<std::size_t>(h) * m + j] =
          init.initial_dist[h] * init.first_step(h, j);
  double lost = 0.0;
  for (int step = 0; step < day - 2; ++step) {
    step_pairs(tensor, w, next, lost);
    w.swap(next);
  }
  std::vector<double> out(m, 0.0);
  for (int h = 0; h < m; ++h)
    for (int j = 0; j < m; ++j)
      out[j] += w[static_cast<std::size_t>(h) * m + j];
  return out;
}

Matrix first_order_n_step(const Matrix& transition, int n) {
  if (transition.rows() != transition.cols())
    throw std::invalid_argument("transition matrix must be square");
  if (n < 0) throw std::invalid_argument("n must be >= 0");
  Matrix out = Matrix::identity(transition.rows());
  for (int i = 0; i < n; ++i) out = out.multiply(transition);
  return out;
}

}  // namespace msm2
