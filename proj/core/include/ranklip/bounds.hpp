#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ranklip/function_class.hpp"

namespace ranklip {

struct BoundInputs {
  long sample_size = 1;     // n
  double delta = 0.05;      // confidence parameter in (0, 1)
  double lipschitz = 2.0;   // G: l_inf Lipschitz constant of the loss
  double smoothness = 2.0;  // H: l_inf smoothness constant
  double uniform_bound = 1.0;  // B: uniform bound on the loss over the class
  double lipschitz_l2 = 2.0;   // G measured against the l2 score norm (baseline)
};

// Pieces of the localized smooth-class analysis. psi(r) = psi_slope * sqrt(r)
// with psi_slope = 4 C log(3 sqrt(B) / C); fixed_point solves r = psi(r).
struct SmoothIntermediates {
  double complexity_scale = 0.0;  // C
  double confidence_level = 0.0;  // r0
  double fixed_point = 0.0;       // r*
  double combined_level = 0.0;    // D0 = 45 r* + 20 r0
  double psi_slope = 0.0;
  std::string psi_formula;
};

struct BoundReport {
  std::string formula_id;
  double value = 0.0;
  std::vector<std::pair<std::string, double>> terms;

  double term(const std::string& name) const;
  bool has_term(const std::string& name) const;
};

// log2 covering number bound for the Lipschitz loss class at scale eps.
// L2 family:  ceil(G^2 W^2 R^2 / eps^2) * log2(2mn + 1)
// L1 family:  ceil(288 G^2 W^2 R^2 (2 + ln d) / eps^2)
//             * log2(2 ceil(8 G W R / eps) mn + 1)
double covering_lipschitz(const ClassSpec& spec, double eps, long n, double lipschitz);

// log2 covering number bound for the level-r slice of the smooth loss class:
// ceil(12 H W^2 R^2 r / eps^2) * log2(2mn + 1).
double covering_smooth(const ClassSpec& spec, double eps, long n, double smoothness,
                       double level);

// inf over alpha in (0, upper] of 4 alpha + 10 int_alpha^upper
// sqrt(covering(eps)/n) d eps, by scanning a geometric alpha grid over a
// cumulative adaptive-trapezoid integral (relative error <= 1e-4).
double dudley_bound(const std::function<double(double)>& covering, double uniform_bound,
                    long n, double upper);

// The closed-form complexity bounds obtained by optimizing the entropy
// integral over alpha; evaluated exactly as printed, with domain errors on
// non-positive log arguments.
double rademacher_closed_form(const ClassSpec& spec, const BoundInputs& inputs);

// C, r0, r*, D0 for the localized analysis; requires n >= 3 so that
// log log n stays positive.
SmoothIntermediates smooth_intermediates(const ClassSpec& spec, const BoundInputs& inputs);

double local_rademacher_psi(double level, const SmoothIntermediates& inter,
                            double uniform_bound);

// risk <= empirical + 2 * complexity + 3 B sqrt(ln(2/delta) / (2n)). A class
// with G W R = 0 contains a single function and contributes no complexity.
BoundReport lipschitz_generalization_bound(double empirical_risk, const ClassSpec& spec,
                                           const BoundInputs& inputs);

// Largest L solving L = L_hat + 45 r* + sqrt(8 r* L) + sqrt(4 r0 L) + 20 r0
// (the implicit localized bound resolved as the exact quadratic root).
BoundReport smooth_uniform_bound_solve(double empirical_risk, const SmoothIntermediates& inter);

// Two-step excess-risk chain: empirical risk of the population optimum is
// bounded through a Bernstein step, then fed into the localized bound with
// the additive term kept.
BoundReport smooth_excess_risk_chain(double best_risk, const SmoothIntermediates& inter);

// Smooth online-to-batch rate L* + sqrt(2 H W^2 L* / n) + 8 H W^2 / n, plus
// the exact optimized-step expression it was simplified from.
BoundReport online_excess_risk(double best_risk, double weight_radius, double smoothness,
                               long n);

// l2-Lipschitz baseline: empirical + 3 G W R sqrt(m/n) + sqrt(8 ln(1/delta)/n).
BoundReport chapelle_wu_bound(double empirical_risk, const BoundInputs& inputs,
                              const ClassSpec& spec);

}  // namespace ranklip
