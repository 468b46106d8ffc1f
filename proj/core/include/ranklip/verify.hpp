#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranklip/loss.hpp"

namespace ranklip {

// Inputs that reproduce a recorded extremal value. The vectors slot holds
// score/label vectors in the order the certified quantity consumes them;
// matrix-based certifications fill the matrix slot instead.
struct WitnessRecord {
  std::vector<Vector> inputs;
  std::optional<Matrix> matrix;
  double value = 0.0;
};

struct CertificationReport {
  std::string quantity;
  double estimate = 0.0;
  double bound = 0.0;
  double tolerance = 0.0;
  std::vector<WitnessRecord> witnesses;
  long samples = 0;
  bool pass = false;  // estimate <= bound + tolerance and witnesses reproduce to 1e-9
  std::string detail;
};

// Central differences of the loss / gradient; the oracles the analytic
// derivatives are certified against.
Vector finite_difference_gradient(const Vector& scores, const Vector& relevance, double step);
Matrix finite_difference_hessian(const Vector& scores, const Vector& relevance, double step);

// Maximizes the gradient dual norm by random sampling in [-30, 30]^m
// followed by coordinate sign-alignment ascent from the best sample. The
// extremum sits at opposed one-hot corners, so the directed phase reaches
// 2 - O(e^{-m amplitude}) in a couple of steps.
CertificationReport estimate_lipschitz_constant(int docs, long budget, std::uint64_t seed);

// Maximizes hessian_abs_sum; by the closed form 2(1 - ||softmax(s)||^2)
// the maximizer is the uniform score vector, which is always included as a
// directed candidate.
CertificationReport estimate_smoothness_constant(int docs, long budget, std::uint64_t seed);

// Evaluates self_bounding_gap on random triples (plus equal-pair and
// gradient-direction adversarial cases) with smoothness 2; passes when the
// minimum gap stays above -1e-12.
CertificationReport self_bounding_sweep(int docs, long count, std::uint64_t seed);

// Random matrices, all three norm exponents: the closed-form max row norm
// must dominate every probe of operator_norm_search and be matched by the
// directed witness to 1e-9.
CertificationReport norm_identity_check(long trials, std::uint64_t seed);

}  // namespace ranklip
