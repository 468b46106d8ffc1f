#pragma once

#include <optional>

#include "ranklip/function_class.hpp"
#include "ranklip/linalg.hpp"

namespace ranklip {

struct LossEvaluation {
  double value = 0.0;
  Vector gradient;
  std::optional<Matrix> hessian;
};

// Constants of a listwise loss measured against the l_inf score norm:
// lipschitz bounds the l1 norm of the score gradient, smoothness the
// (inf -> 1) operator norm of the score Hessian, uniform_bound the loss
// itself over the class.
struct LossProfile {
  double lipschitz = 0.0;
  double smoothness = 0.0;
  double uniform_bound = 0.0;
};

// Cross entropy between the label softmax and the score softmax:
//   loss(s, y) = logsumexp(s) - <softmax(y), s>.
// Everything goes through logsumexp, so scores up to +-700 are safe.
double listnet_loss(const Vector& scores, const Vector& relevance);

// softmax(scores) - softmax(relevance); entries sum to zero.
Vector listnet_gradient(const Vector& scores, const Vector& relevance);

// diag(p) - p p^T with p = softmax(scores); symmetric PSD, independent of
// the labels (kept in the signature for the dimension contract).
Matrix listnet_hessian(const Vector& scores, const Vector& relevance);

LossEvaluation listnet_evaluate(const Vector& scores, const Vector& relevance,
                                bool with_hessian = false);

// l1 norm of the gradient: the witness for the l_inf Lipschitz constant.
double gradient_dual_norm(const Vector& scores, const Vector& relevance);

// Entrywise absolute sum of the Hessian, an upper bound for its
// (inf -> 1) operator norm; equals 2(1 - ||softmax(s)||_2^2).
double hessian_abs_sum(const Vector& scores, const Vector& relevance);

// B = 2 W R + log m. A zero-loss score vector does not exist for this loss
// when the label softmax is non-degenerate, so the bound comes from
// -log softmax_j(s) <= 2||s||_inf + log m with ||Xw||_inf <= W R.
double uniform_loss_bound(const ClassSpec& spec, int docs_per_query);
double uniform_loss_bound(const ClassSpec& spec);

// 6 H (loss(s1) + loss(s2)) ||s1 - s2||_inf^2 - (loss(s1) - loss(s2))^2.
// Non-negative for every H-smooth non-negative loss; with H = 2 this is the
// self-bounding certificate for the loss above.
double self_bounding_gap(const Vector& s1, const Vector& s2,
                         const Vector& relevance, double smoothness);

// G = 2, H = 2 (independent of m), B from uniform_loss_bound.
LossProfile listnet_profile(const ClassSpec& spec);

// Minimal interface the trainers need; keeps the door open for losses that
// only provide a subgradient.
class ScoreLoss {
 public:
  virtual ~ScoreLoss() = default;
  virtual double value(const Vector& scores, const Vector& relevance) const = 0;
  virtual Vector gradient(const Vector& scores, const Vector& relevance) const = 0;
};

class ListNetLoss final : public ScoreLoss {
 public:
  double value(const Vector& scores, const Vector& relevance) const override;
  Vector gradient(const Vector& scores, const Vector& relevance) const override;
};

}  // namespace ranklip
