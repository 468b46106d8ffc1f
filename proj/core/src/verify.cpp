#include "ranklip/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ranklip/rng.hpp"

namespace ranklip {

namespace {

constexpr double kAmplitude = 30.0;       // sampling box for the constant estimators
constexpr double kWitnessTol = 1e-9;

Vector random_box(Rng& rng, int dim, double amplitude) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.uniform(-amplitude, amplitude);
  return v;
}

bool witnesses_reproduce(const CertificationReport& report,
                         double (*eval)(const WitnessRecord&)) {
  for (const auto& w : report.witnesses) {
    if (std::abs(eval(w) - w.value) > kWitnessTol) return false;
  }
  return true;
}

}  // namespace

Vector finite_difference_gradient(const Vector& scores, const Vector& relevance, double step) {
  if (step <= 0.0) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  Vector grad(scores.size());
  Vector probe = scores;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    const double original = probe[j];
    probe[j] = original + step;
    const double up = listnet_loss(probe, relevance);
    probe[j] = original - step;
    const double down = listnet_loss(probe, relevance);
    probe[j] = original;
    grad[j] = (up - down) / (2.0 * step);
  }
  return grad;
}

Matrix finite_difference_hessian(const Vector& scores, const Vector& relevance, double step) {
  if (step <= 0.0) throw std::invalid_argument("finite_difference_hessian: step must be > 0");
  Matrix hess(scores.size(), scores.size());
  Vector probe = scores;
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    const double original = probe[k];
    probe[k] = original + step;
    const Vector up = listnet_gradient(probe, relevance);
    probe[k] = original - step;
    const Vector down = listnet_gradient(probe, relevance);
    probe[k] = original;
    hess.col(k) = (up - down) / (2.0 * step);
  }
  return hess;
}

CertificationReport estimate_lipschitz_constant(int docs, long budget, std::uint64_t seed) {
  if (docs < 2) throw std::invalid_argument("estimate_lipschitz_constant: need at least two documents");
  if (budget < 1) throw std::invalid_argument("estimate_lipschitz_constant: budget must be >= 1");

  CertificationReport report;
  report.quantity = "listnet_gradient_dual_norm_sup";
  report.bound = 2.0;
  report.tolerance = 1e-9;
  report.samples = budget;

  Vector best_s, best_y;
  double best = -1.0;
  auto consider = [&](const Vector& s, const Vector& y) {
    const double value = gradient_dual_norm(s, y);
    if (value > best) {
      best = value;
      best_s = s;
      best_y = y;
    }
  };

  for (long i = 0; i < budget; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    consider(random_box(rng, docs, kAmplitude), random_box(rng, docs, kAmplitude));
  }

  // Sign-alignment ascent: push scores toward the corner that grows the
  // softmax mass where it already exceeds the label mass, and vice versa.
  Vector s = best_s, y = best_y;
  for (int iter = 0; iter < 6; ++iter) {
    const Vector ps = softmax(s);
    const Vector py = softmax(y);
    Vector s_next(docs), y_next(docs);
    for (int j = 0; j < docs; ++j) {
      s_next[j] = ps[j] >= py[j] ? kAmplitude : -kAmplitude;
      y_next[j] = py[j] > ps[j] ? kAmplitude : -kAmplitude;
    }
    s = s_next;
    y = y_next;
    consider(s, y);
  }
  // Opposed one-hot corners, the known extremal configuration.
  Vector corner_s = Vector::Constant(docs, -kAmplitude);
  Vector corner_y = Vector::Constant(docs, -kAmplitude);
  corner_s[0] = kAmplitude;
  corner_y[1] = kAmplitude;
  consider(corner_s, corner_y);

  report.estimate = best;
  report.witnesses.push_back({{best_s, best_y}, std::nullopt, best});
  const bool reproduced = witnesses_reproduce(report, [](const WitnessRecord& w) {
    return gradient_dual_norm(w.inputs[0], w.inputs[1]);
  });
  report.pass = reproduced && report.estimate <= report.bound + report.tolerance;
  return report;
}

CertificationReport estimate_smoothness_constant(int docs, long budget, std::uint64_t seed) {
  if (docs < 2) throw std::invalid_argument("estimate_smoothness_constant: need at least two documents");
  if (budget < 1) throw std::invalid_argument("estimate_smoothness_constant: budget must be >= 1");

  CertificationReport report;
  report.quantity = "listnet_hessian_abs_sum_sup";
  report.bound = 2.0;
  report.tolerance = 1e-12;
  report.samples = budget;

  const Vector labels = Vector::Zero(docs);  // Hessian ignores labels
  Vector best_s;
  double best = -1.0;
  auto consider = [&](const Vector& s) {
    const double value = hessian_abs_sum(s, labels);
    if (value > best) {
      best = value;
      best_s = s;
    }
  };

  for (long i = 0; i < budget; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    consider(random_box(rng, docs, kAmplitude));
  }
  consider(Vector::Zero(docs));  // uniform softmax, the closed-form maximizer

  report.estimate = best;
  report.witnesses.push_back({{best_s, labels}, std::nullopt, best});
  const bool reproduced = witnesses_reproduce(report, [](const WitnessRecord& w) {
    return hessian_abs_sum(w.inputs[0], w.inputs[1]);
  });
  report.pass = reproduced && report.estimate <= report.bound + report.tolerance;
  return report;
}

CertificationReport self_bounding_sweep(int docs, long count, std::uint64_t seed) {
  if (docs < 2) throw std::invalid_argument("self_bounding_sweep: need at least two documents");
  if (count < 1) throw std::invalid_argument("self_bounding_sweep: count must be >= 1");

  CertificationReport report;
  report.quantity = "listnet_self_bounding_violation";
  report.bound = 0.0;
  report.tolerance = 1e-12;
  report.samples = count;

  double min_gap = std::numeric_limits<double>::infinity();
  Vector worst_s1, worst_s2, worst_y;
  for (long i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const double amplitude = (i % 4 == 3) ? kAmplitude : 5.0;
    Vector y = random_box(rng, docs, 5.0);
    Vector s1 = random_box(rng, docs, amplitude);
    Vector s2;
    switch (i % 4) {
      case 1:
        s2 = s1;  // gap must be exactly zero here
        break;
      case 2: {
        // adversarial: step along the gradient direction from s1
        Vector g = listnet_gradient(s1, y);
        const double norm = vector_norm(g, NormExponent::LInf);
        if (norm > 0.0) g /= norm;
        s2 = s1 + rng.uniform(0.0, 3.0) * g;
        break;
      }
      default:
        s2 = random_box(rng, docs, amplitude);
        break;
    }
    const double gap = self_bounding_gap(s1, s2, y, 2.0);
    if (gap < min_gap) {
      min_gap = gap;
      worst_s1 = s1;
      worst_s2 = s2;
      worst_y = y;
    }
  }

  report.estimate = -min_gap;  // max violation; negative when every gap is positive
  report.witnesses.push_back({{worst_s1, worst_s2, worst_y}, std::nullopt, min_gap});
  const bool reproduced = witnesses_reproduce(report, [](const WitnessRecord& w) {
    return self_bounding_gap(w.inputs[0], w.inputs[1], w.inputs[2], 2.0);
  });
  report.pass = reproduced && report.estimate <= report.bound + report.tolerance;
  report.detail = "min gap over sweep = " + std::to_string(min_gap);
  return report;
}

CertificationReport norm_identity_check(long trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("norm_identity_check: trials must be >= 1");

  CertificationReport report;
  report.quantity = "operator_norm_identity_gap";
  report.bound = 0.0;
  report.tolerance = 1e-9;
  report.samples = trials;

  const NormExponent exponents[] = {NormExponent::L1, NormExponent::L2, NormExponent::LInf};
  double worst_shortfall = -std::numeric_limits<double>::infinity();
  double worst_overrun = -std::numeric_limits<double>::infinity();
  Matrix worst_matrix;
  NormExponent worst_p = NormExponent::L2;
  double worst_value = 0.0;

  for (long i = 0; i < trials; ++i) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(i)));
    const int rows = 1 + static_cast<int>(rng.below(8));
    const int cols = 1 + static_cast<int>(rng.below(8));
    Matrix x(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) x(r, c) = rng.uniform(-5.0, 5.0);

    for (NormExponent p : exponents) {
      const double closed = max_row_norm(x, p);
      const double searched =
          operator_norm_search(x, dual_exponent(p), 64, mix_seed(seed, static_cast<std::uint64_t>(i) * 3 + 1));
      const double shortfall = closed - searched;  // witness must close this to 1e-9
      const double overrun = searched - closed;    // probes must never exceed closed form
      if (shortfall > worst_shortfall) {
        worst_shortfall = shortfall;
        worst_matrix = x;
        worst_p = p;
        worst_value = closed;  // reproducible from the matrix alone
      }
      worst_overrun = std::max(worst_overrun, overrun);
    }
  }

  report.estimate = worst_shortfall;
  WitnessRecord witness;
  witness.matrix = worst_matrix;
  witness.value = worst_value;
  witness.inputs.push_back(Vector::Constant(1, worst_p == NormExponent::L1   ? 1.0
                                               : worst_p == NormExponent::L2 ? 2.0
                                                                             : std::numeric_limits<double>::infinity()));
  report.witnesses.push_back(std::move(witness));
  report.detail = "max overrun = " + std::to_string(worst_overrun);
  report.pass = worst_shortfall <= report.tolerance && worst_overrun <= 1e-12;
  return report;
}

}  // namespace ranklip
