#include "ranklip/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ranklip/rng.hpp"

namespace ranklip {

Vector project_l2(const Vector& w, double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_l2: radius must be >= 0");
  const double norm = vector_norm(w, NormExponent::L2);
  if (norm <= radius) return w;
  if (radius == 0.0) return Vector::Zero(w.size());
  return w * (radius / norm);
}

Vector project_l1(const Vector& w, double radius) {
  if (radius < 0.0) throw std::invalid_argument("project_l1: radius must be >= 0");
  if (vector_norm(w, NormExponent::L1) <= radius) return w;
  if (radius == 0.0) return Vector::Zero(w.size());

  // threshold for the simplex projection of |w|
  std::vector<double> magnitudes(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) magnitudes[static_cast<std::size_t>(i)] = std::abs(w[i]);
  std::sort(magnitudes.begin(), magnitudes.end(), std::greater<>());
  double cumulative = 0.0;
  double threshold = 0.0;
  for (std::size_t j = 0; j < magnitudes.size(); ++j) {
    cumulative += magnitudes[j];
    const double candidate = (cumulative - radius) / static_cast<double>(j + 1);
    if (magnitudes[j] - candidate > 0.0) threshold = candidate;
  }
  Vector out(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double shrunk = std::max(std::abs(w[i]) - threshold, 0.0);
    out[i] = w[i] >= 0.0 ? shrunk : -shrunk;
  }
  return out;
}

Vector project_onto_ball(const Vector& w, const BallConstraint& ball) {
  return ball.family == NormFamily::L2 ? project_l2(w, ball.radius) : project_l1(w, ball.radius);
}

double smooth_eta(double weight_radius, double smoothness, double optimistic_risk, long steps) {
  if (weight_radius <= 0.0) throw std::invalid_argument("smooth_eta: weight_radius must be > 0");
  if (smoothness <= 0.0) throw std::invalid_argument("smooth_eta: smoothness must be > 0");
  if (optimistic_risk < 0.0) throw std::invalid_argument("smooth_eta: optimistic_risk must be >= 0");
  if (steps < 1) throw std::invalid_argument("smooth_eta: steps must be >= 1");
  const double hw = smoothness * weight_radius;
  const double root = std::sqrt(4.0 * hw * hw +
                                2.0 * smoothness * optimistic_risk * static_cast<double>(steps));
  return weight_radius / (4.0 * hw + 2.0 * root);
}

Vector online_to_batch_average(const std::vector<Vector>& trajectory) {
  if (trajectory.empty()) throw std::invalid_argument("online_to_batch_average: empty trajectory");
  Vector sum = Vector::Zero(trajectory.front().size());
  for (const auto& w : trajectory) {
    if (w.size() != sum.size())
      throw std::invalid_argument("online_to_batch_average: inconsistent dimensions");
    sum += w;
  }
  return sum / static_cast<double>(trajectory.size());
}

namespace {

void check_dataset(const Dataset& data, const char* where) {
  if (data.instances.empty()) throw std::invalid_argument(std::string(where) + ": empty dataset");
  const auto rows = data.instances.front().features.rows();
  const auto cols = data.instances.front().features.cols();
  for (const auto& instance : data.instances) {
    if (instance.features.rows() != rows || instance.features.cols() != cols ||
        instance.relevance.size() != rows) {
      throw std::invalid_argument(std::string(where) + ": inconsistent instance dimensions");
    }
  }
}

Vector weight_gradient(const RankingInstance& instance, const Vector& w, const ScoreLoss& loss) {
  return instance.features.transpose() * loss.gradient(instance.features * w, instance.relevance);
}

double batch_risk(const Dataset& data, const Vector& w, const ScoreLoss& loss) {
  std::vector<double> losses;
  losses.reserve(data.instances.size());
  for (const auto& instance : data.instances) {
    losses.push_back(loss.value(instance.features * w, instance.relevance));
  }
  return neumaier_sum(losses) / static_cast<double>(losses.size());
}

Vector batch_gradient(const Dataset& data, const Vector& w, const ScoreLoss& loss) {
  Vector grad = Vector::Zero(w.size());
  for (const auto& instance : data.instances) grad += weight_gradient(instance, w, loss);
  return grad / static_cast<double>(data.instances.size());
}

}  // namespace

TrainResult ogd_train(const Dataset& data, const BallConstraint& ball, const OgdConfig& config,
                      const ScoreLoss& loss) {
  check_dataset(data, "ogd_train");
  if (config.passes < 1) throw std::invalid_argument("ogd_train: passes must be >= 1");
  if (config.schedule == StepSchedule::Fixed && config.eta < 0.0)
    throw std::invalid_argument("ogd_train: eta must be >= 0");

  const long n = data.size();
  const long total_steps = n * config.passes;
  const double eta = config.schedule == StepSchedule::Fixed
                         ? config.eta
                         : smooth_eta(ball.radius, config.smoothness, config.optimistic_risk,
                                      total_steps);

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  Vector w = Vector::Zero(data.feature_dim());
  Vector iterate_sum = Vector::Zero(data.feature_dim());
  TrainResult result;
  result.per_step_losses.reserve(static_cast<std::size_t>(total_steps));

  Rng shuffle_rng(mix_seed(config.seed, 0x5fu));
  for (int pass = 0; pass < config.passes; ++pass) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);
      }
    }
    for (std::size_t idx : order) {
      const auto& instance = data.instances[idx];
      result.per_step_losses.push_back(loss.value(instance.features * w, instance.relevance));
      iterate_sum += w;
      w = project_onto_ball(w - eta * weight_gradient(instance, w, loss), ball);
    }
  }

  result.final_weights = w;
  result.averaged_weights = iterate_sum / static_cast<double>(total_steps);

  double average_losses_sum = 0.0;
  for (int pass = 0; pass < config.passes; ++pass) {
    for (const auto& instance : data.instances) {
      average_losses_sum +=
          loss.value(instance.features * result.averaged_weights, instance.relevance);
    }
  }
  result.cumulative_regret_proxy =
      neumaier_sum(result.per_step_losses) - average_losses_sum;
  return result;
}

ErmResult erm_train(const Dataset& data, const BallConstraint& ball, double tolerance,
                    int max_iters, const ScoreLoss& loss) {
  check_dataset(data, "erm_train");
  if (tolerance <= 0.0) throw std::invalid_argument("erm_train: tolerance must be > 0");
  if (max_iters < 1) throw std::invalid_argument("erm_train: max_iters must be >= 1");

  ErmResult result;
  Vector w = Vector::Zero(data.feature_dim());
  double risk = batch_risk(data, w, loss);

  for (int iter = 0; iter < max_iters; ++iter) {
    result.iterations = iter + 1;
    const Vector grad = batch_gradient(data, w, loss);
    const Vector unit_step = project_onto_ball(w - grad, ball);
    result.projected_gradient_norm = vector_norm(w - unit_step, NormExponent::L2);
    if (result.projected_gradient_norm <= tolerance) {
      result.converged = true;
      break;
    }

    // backtracking on the projection arc: halve from 1.0 until the
    // sufficient-decrease test accepts
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Vector candidate = project_onto_ball(w - step * grad, ball);
      const Vector move = candidate - w;
      const double candidate_risk = batch_risk(data, candidate, loss);
      if (candidate_risk <= risk - 1e-4 / step * move.squaredNorm()) {
        w = candidate;
        risk = candidate_risk;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step collapsed below resolution
  }

  result.weights = w;
  result.final_risk = risk;
  return result;
}

}  // namespace ranklip
