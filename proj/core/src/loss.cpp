#include "ranklip/loss.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ranklip {

namespace {

void check_pair(const Vector& scores, const Vector& relevance, const char* where) {
  if (scores.size() != relevance.size()) {
    throw std::invalid_argument(std::string(where) + ": scores and relevance dimensions differ");
  }
  if (scores.size() < 2) {
    throw std::invalid_argument(std::string(where) + ": need at least two documents");
  }
  if (!scores.allFinite() || !relevance.allFinite()) {
    throw std::invalid_argument(std::string(where) + ": non-finite entry");
  }
}

}  // namespace

double listnet_loss(const Vector& scores, const Vector& relevance) {
  check_pair(scores, relevance, "listnet_loss");
  const double lse = stable_logsumexp(scores);
  const Vector label_weights = softmax(relevance);
  // <softmax(y), lse - s> accumulated with compensation: the terms
  // lse - s_j are all non-negative, so the result is too.
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    const double term = label_weights[j] * (lse - scores[j]);
    const double t = sum + term;
    comp += (sum >= term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

Vector listnet_gradient(const Vector& scores, const Vector& relevance) {
  check_pair(scores, relevance, "listnet_gradient");
  return softmax(scores) - softmax(relevance);
}

Matrix listnet_hessian(const Vector& scores, const Vector& relevance) {
  check_pair(scores, relevance, "listnet_hessian");
  const Vector p = softmax(scores);
  Matrix h = -p * p.transpose();
  h.diagonal() += p;
  return h;
}

LossEvaluation listnet_evaluate(const Vector& scores, const Vector& relevance,
                                bool with_hessian) {
  LossEvaluation out;
  out.value = listnet_loss(scores, relevance);
  out.gradient = listnet_gradient(scores, relevance);
  if (with_hessian) out.hessian = listnet_hessian(scores, relevance);
  return out;
}

double gradient_dual_norm(const Vector& scores, const Vector& relevance) {
  return vector_norm(listnet_gradient(scores, relevance), NormExponent::L1);
}

double hessian_abs_sum(const Vector& scores, const Vector& relevance) {
  const Matrix h = listnet_hessian(scores, relevance);
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index j = 0; j < h.rows(); ++j) {
    for (Eigen::Index k = 0; k < h.cols(); ++k) {
      const double a = std::abs(h(j, k));
      const double t = sum + a;
      comp += (sum >= a) ? (sum - t) + a : (a - t) + sum;
      sum = t;
    }
  }
  return sum + comp;
}

double uniform_loss_bound(const ClassSpec& spec, int docs_per_query) {
  if (spec.weight_radius < 0.0 || spec.row_norm_bound < 0.0) {
    throw std::invalid_argument("uniform_loss_bound: radii must be non-negative");
  }
  if (docs_per_query < 2) {
    throw std::invalid_argument("uniform_loss_bound: need at least two documents");
  }
  return 2.0 * spec.weight_radius * spec.row_norm_bound + std::log(static_cast<double>(docs_per_query));
}

double uniform_loss_bound(const ClassSpec& spec) {
  return uniform_loss_bound(spec, spec.docs_per_query);
}

double self_bounding_gap(const Vector& s1, const Vector& s2,
                         const Vector& relevance, double smoothness) {
  check_pair(s1, relevance, "self_bounding_gap");
  check_pair(s2, relevance, "self_bounding_gap");
  if (smoothness < 0.0) throw std::invalid_argument("self_bounding_gap: smoothness must be >= 0");
  const double v1 = listnet_loss(s1, relevance);
  const double v2 = listnet_loss(s2, relevance);
  const double spread = vector_norm(s1 - s2, NormExponent::LInf);
  const double diff = v1 - v2;
  return 6.0 * smoothness * (v1 + v2) * spread * spread - diff * diff;
}

LossProfile listnet_profile(const ClassSpec& spec) {
  return {2.0, 2.0, uniform_loss_bound(spec)};
}

double ListNetLoss::value(const Vector& scores, const Vector& relevance) const {
  return listnet_loss(scores, relevance);
}

Vector ListNetLoss::gradient(const Vector& scores, const Vector& relevance) const {
  return listnet_gradient(scores, relevance);
}

}  // namespace ranklip
