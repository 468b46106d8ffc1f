#include "ranklip/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ranklip {

namespace {

constexpr double kLn2 = 0.69314718055994530941723212146;

double log2_of(double x) { return std::log(x) / kLn2; }

void check_spec(const ClassSpec& spec, const char* where) {
  if (spec.weight_radius < 0.0 || spec.row_norm_bound < 0.0)
    throw std::invalid_argument(std::string(where) + ": radii must be >= 0");
  if (spec.feature_dim < 1 || spec.docs_per_query < 1)
    throw std::invalid_argument(std::string(where) + ": dimensions must be >= 1");
}

[[noreturn]] void domain_failure(const char* where, const char* what, double value) {
  throw std::domain_error(std::string(where) + ": " + what + " (value " +
                          std::to_string(value) + ")");
}

}  // namespace

double BoundReport::term(const std::string& name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return value;
  }
  throw std::out_of_range("BoundReport: no term named " + name);
}

bool BoundReport::has_term(const std::string& name) const {
  for (const auto& [key, value] : terms) {
    if (key == name) return true;
  }
  return false;
}

double covering_lipschitz(const ClassSpec& spec, double eps, long n, double lipschitz) {
  check_spec(spec, "covering_lipschitz");
  if (eps <= 0.0) throw std::invalid_argument("covering_lipschitz: eps must be > 0");
  if (n < 1) throw std::invalid_argument("covering_lipschitz: n must be >= 1");
  if (lipschitz < 0.0) throw std::invalid_argument("covering_lipschitz: lipschitz must be >= 0");

  const double gwr = lipschitz * spec.weight_radius * spec.row_norm_bound;
  const double mn = static_cast<double>(spec.docs_per_query) * static_cast<double>(n);
  if (spec.family == NormFamily::L2) {
    return std::ceil(gwr * gwr / (eps * eps)) * log2_of(2.0 * mn + 1.0);
  }
  const double blocks =
      std::ceil(288.0 * gwr * gwr * (2.0 + std::log(static_cast<double>(spec.feature_dim))) /
                (eps * eps));
  const double grain = std::ceil(8.0 * gwr / eps);
  return blocks * log2_of(2.0 * grain * mn + 1.0);
}

double covering_smooth(const ClassSpec& spec, double eps, long n, double smoothness,
                       double level) {
  check_spec(spec, "covering_smooth");
  if (eps <= 0.0) throw std::invalid_argument("covering_smooth: eps must be > 0");
  if (n < 1) throw std::invalid_argument("covering_smooth: n must be >= 1");
  if (smoothness < 0.0) throw std::invalid_argument("covering_smooth: smoothness must be >= 0");
  if (level < 0.0) throw std::invalid_argument("covering_smooth: level must be >= 0");

  const double wr = spec.weight_radius * spec.row_norm_bound;
  const double mn = static_cast<double>(spec.docs_per_query) * static_cast<double>(n);
  return std::ceil(12.0 * smoothness * wr * wr * level / (eps * eps)) * log2_of(2.0 * mn + 1.0);
}

double dudley_bound(const std::function<double(double)>& covering, double uniform_bound,
                    long n, double upper) {
  if (n < 1) throw std::invalid_argument("dudley_bound: n must be >= 1");
  if (upper <= 0.0) throw std::invalid_argument("dudley_bound: upper must be > 0");
  if (upper > uniform_bound * (1.0 + 1e-12))
    throw std::invalid_argument("dudley_bound: upper must not exceed the uniform bound");

  const auto integrand = [&](double eps) {
    const double c = covering(eps);
    if (c < 0.0) throw std::invalid_argument("dudley_bound: covering must be non-negative");
    return std::sqrt(c / static_cast<double>(n));
  };

  // Cumulative integral on a geometric grid, each cell refined adaptively
  // until the two-panel refinement agrees to 1e-4 relative (covering bounds
  // have ceiling jumps, so plain trapezoid is not enough).
  const double floor_eps = upper * 1e-9;
  constexpr int kCells = 2048;
  const double ratio = std::pow(upper / floor_eps, 1.0 / kCells);

  struct Segment {
    double a, b, fa, fb;
    int depth;
  };
  const auto refine = [&](double a, double b, double fa, double fb) {
    double total = 0.0;
    std::vector<Segment> stack{{a, b, fa, fb, 0}};
    while (!stack.empty()) {
      const Segment seg = stack.back();
      stack.pop_back();
      const double mid = 0.5 * (seg.a + seg.b);
      const double fmid = integrand(mid);
      const double whole = 0.5 * (seg.fa + seg.fb) * (seg.b - seg.a);
      const double split =
          0.5 * (seg.fa + fmid) * (mid - seg.a) + 0.5 * (fmid + seg.fb) * (seg.b - mid);
      if (seg.depth >= 24 || std::abs(split - whole) <= 1e-4 * std::abs(split) + 1e-15) {
        total += split;
      } else {
        stack.push_back({seg.a, mid, seg.fa, fmid, seg.depth + 1});
        stack.push_back({mid, seg.b, fmid, seg.fb, seg.depth + 1});
      }
    }
    return total;
  };

  std::vector<double> knots(kCells + 1);
  std::vector<double> cumulative(kCells + 1);  // integral from knots[i] to upper
  knots[0] = floor_eps;
  for (int i = 1; i <= kCells; ++i) knots[i] = knots[i - 1] * ratio;
  knots[kCells] = upper;

  cumulative[kCells] = 0.0;
  double previous_f = integrand(knots[kCells]);
  for (int i = kCells - 1; i >= 0; --i) {
    const double fa = integrand(knots[i]);
    cumulative[i] = cumulative[i + 1] + refine(knots[i], knots[i + 1], fa, previous_f);
    previous_f = fa;
  }

  if (cumulative[0] == 0.0) return 0.0;  // trivial covering: alpha -> 0

  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kCells; ++i) {
    best = std::min(best, 4.0 * knots[i] + 10.0 * cumulative[i]);
  }
  return best;
}

double rademacher_closed_form(const ClassSpec& spec, const BoundInputs& inputs) {
  check_spec(spec, "rademacher_closed_form");
  const long n = inputs.sample_size;
  if (n < 1) throw std::invalid_argument("rademacher_closed_form: n must be >= 1");
  const double gwr = inputs.lipschitz * spec.weight_radius * spec.row_norm_bound;
  const double mn = static_cast<double>(spec.docs_per_query) * static_cast<double>(n);
  const double b = inputs.uniform_bound;

  if (spec.family == NormFamily::L2) {
    const double root_log = std::sqrt(log2_of(3.0 * mn));
    if (gwr <= 0.0) domain_failure("rademacher_closed_form", "G*W*R must be positive", gwr);
    const double log_arg = 6.0 * b * std::sqrt(static_cast<double>(n)) / (5.0 * gwr * root_log);
    if (!(log_arg > 0.0) || !std::isfinite(log_arg))
      domain_failure("rademacher_closed_form", "non-positive log argument", log_arg);
    return 10.0 * gwr * root_log / std::sqrt(static_cast<double>(n)) * std::log(log_arg);
  }

  if (gwr <= 0.0) domain_failure("rademacher_closed_form", "G*W*R must be positive", gwr);
  const double log_d = std::log(static_cast<double>(spec.feature_dim));
  if (log_d <= 0.0)
    domain_failure("rademacher_closed_form", "log d must be positive (d >= 2)", log_d);
  const double hard_scale = 24.0 * mn * gwr;
  const double inner = log_d * log2_of(hard_scale);
  if (!(inner > 0.0))
    domain_failure("rademacher_closed_form", "non-positive inner log product", inner);
  const double denom = 40.0 * std::sqrt(2.0) * gwr * std::sqrt(inner);
  const double log_arg = (b + hard_scale) / denom;
  if (!(log_arg > 0.0) || !std::isfinite(log_arg))
    domain_failure("rademacher_closed_form", "non-positive log argument", log_arg);
  const double outer = std::log(log_arg);
  return 120.0 * std::sqrt(2.0) * gwr * std::sqrt(inner / static_cast<double>(n)) * outer *
         outer;
}

SmoothIntermediates smooth_intermediates(const ClassSpec& spec, const BoundInputs& inputs) {
  check_spec(spec, "smooth_intermediates");
  const long n = inputs.sample_size;
  if (n < 3) throw std::domain_error("smooth_intermediates: n must be >= 3 (log log n)");
  if (inputs.delta <= 0.0 || inputs.delta >= 1.0)
    throw std::invalid_argument("smooth_intermediates: delta must lie in (0, 1)");
  if (inputs.smoothness < 0.0)
    throw std::invalid_argument("smooth_intermediates: smoothness must be >= 0");
  if (inputs.uniform_bound <= 0.0)
    throw std::invalid_argument("smooth_intermediates: uniform bound must be > 0");

  const double mn = static_cast<double>(spec.docs_per_query) * static_cast<double>(n);
  SmoothIntermediates inter;
  inter.complexity_scale = 5.0 * std::sqrt(3.0) * spec.weight_radius * spec.row_norm_bound *
                           std::sqrt(inputs.smoothness * log2_of(3.0 * mn) /
                                     static_cast<double>(n));
  inter.confidence_level = inputs.uniform_bound *
                           (std::log(1.0 / inputs.delta) +
                            std::log(std::log(static_cast<double>(n)))) /
                           static_cast<double>(n);
  if (inter.complexity_scale > 0.0) {
    inter.psi_slope = 4.0 * inter.complexity_scale *
                      std::log(3.0 * std::sqrt(inputs.uniform_bound) / inter.complexity_scale);
  }
  inter.fixed_point = inter.psi_slope * inter.psi_slope;
  inter.combined_level = 45.0 * inter.fixed_point + 20.0 * inter.confidence_level;
  inter.psi_formula = "psi(r) = 4 sqrt(r) C log(3 sqrt(B)/C), C = " +
                      std::to_string(inter.complexity_scale);
  return inter;
}

double local_rademacher_psi(double level, const SmoothIntermediates& inter,
                            double uniform_bound) {
  if (level < 0.0) throw std::invalid_argument("local_rademacher_psi: level must be >= 0");
  if (level == 0.0) return 0.0;
  const double c = inter.complexity_scale;
  if (c <= 0.0) return 0.0;
  return 4.0 * std::sqrt(level) * c * std::log(3.0 * std::sqrt(uniform_bound) / c);
}

BoundReport lipschitz_generalization_bound(double empirical_risk, const ClassSpec& spec,
                                           const BoundInputs& inputs) {
  if (empirical_risk < 0.0)
    throw std::invalid_argument("lipschitz_generalization_bound: empirical risk must be >= 0");
  if (inputs.delta <= 0.0 || inputs.delta >= 1.0)
    throw std::invalid_argument("lipschitz_generalization_bound: delta must lie in (0, 1)");

  const double gwr = inputs.lipschitz * spec.weight_radius * spec.row_norm_bound;
  const double rademacher = gwr == 0.0 ? 0.0 : rademacher_closed_form(spec, inputs);
  const double complexity = 2.0 * rademacher;
  const double confidence =
      3.0 * inputs.uniform_bound *
      std::sqrt(std::log(2.0 / inputs.delta) / (2.0 * static_cast<double>(inputs.sample_size)));

  BoundReport report;
  report.formula_id =
      spec.family == NormFamily::L2 ? "lipschitz_generalization_l2" : "lipschitz_generalization_l1";
  report.terms = {{"empirical_risk", empirical_risk},
                  {"rademacher", rademacher},
                  {"complexity", complexity},
                  {"confidence", confidence}};
  report.value = empirical_risk + complexity + confidence;
  return report;
}

BoundReport smooth_uniform_bound_solve(double empirical_risk, const SmoothIntermediates& inter) {
  if (empirical_risk < 0.0)
    throw std::invalid_argument("smooth_uniform_bound_solve: empirical risk must be >= 0");

  // L = c + a sqrt(L) with a = sqrt(8 r*) + sqrt(4 r0),
  // c = L_hat + 45 r* + 20 r0; the largest root in sqrt(L).
  const double a = std::sqrt(8.0 * inter.fixed_point) + std::sqrt(4.0 * inter.confidence_level);
  const double c =
      empirical_risk + 45.0 * inter.fixed_point + 20.0 * inter.confidence_level;
  const double sqrt_l = 0.5 * (a + std::sqrt(a * a + 4.0 * c));
  const double value = sqrt_l * sqrt_l;

  BoundReport report;
  report.formula_id = "smooth_localized_risk";
  report.terms = {{"empirical_risk", empirical_risk},
                  {"fixed_point", inter.fixed_point},
                  {"confidence_level", inter.confidence_level},
                  {"sqrt_coefficient_a", a},
                  {"constant_c", c}};
  report.value = value;
  return report;
}

BoundReport smooth_excess_risk_chain(double best_risk, const SmoothIntermediates& inter) {
  if (best_risk < 0.0)
    throw std::invalid_argument("smooth_excess_risk_chain: best risk must be >= 0");

  const double r0 = inter.confidence_level;
  const double empirical_best =
      best_risk + std::sqrt(4.0 * r0 * best_risk) + 4.0 * r0;
  const double d0 = inter.combined_level;
  const double value = empirical_best + std::sqrt(d0 * empirical_best) + d0;

  BoundReport report;
  report.formula_id = "smooth_excess_risk_chain";
  report.terms = {{"best_risk", best_risk},
                  {"empirical_best_bound", empirical_best},
                  {"combined_level", d0},
                  {"cross_term", std::sqrt(d0 * empirical_best)}};
  report.value = value;
  return report;
}

BoundReport online_excess_risk(double best_risk, double weight_radius, double smoothness,
                               long n) {
  if (best_risk < 0.0 || weight_radius < 0.0 || smoothness < 0.0)
    throw std::invalid_argument("online_excess_risk: arguments must be >= 0");
  if (n < 1) throw std::invalid_argument("online_excess_risk: n must be >= 1");

  const double x = smoothness * weight_radius * weight_radius / static_cast<double>(n);
  const double interpolation = std::sqrt(2.0 * x * best_risk);
  const double optimistic = 8.0 * x;
  const double value = best_risk + interpolation + optimistic;

  // the expression the simplified rate was derived from, at the optimizing
  // step size
  double exact = best_risk;
  if (x > 0.0) {
    const double hw = smoothness * weight_radius;
    const double root =
        std::sqrt(4.0 * hw * hw + 2.0 * smoothness * best_risk * static_cast<double>(n));
    const double eta = weight_radius / (4.0 * hw + 2.0 * root);
    const double contraction = 1.0 - 4.0 * eta * smoothness;
    exact = best_risk / contraction +
            weight_radius * weight_radius / (2.0 * eta * contraction * static_cast<double>(n));
  }

  BoundReport report;
  report.formula_id = "online_smooth_rate";
  report.terms = {{"best_risk", best_risk},
                  {"interpolation_term", interpolation},
                  {"optimistic_term", optimistic},
                  {"exact_step_expression", exact}};
  report.value = value;
  return report;
}

BoundReport chapelle_wu_bound(double empirical_risk, const BoundInputs& inputs,
                              const ClassSpec& spec) {
  if (empirical_risk < 0.0)
    throw std::invalid_argument("chapelle_wu_bound: empirical risk must be >= 0");
  if (inputs.delta <= 0.0 || inputs.delta >= 1.0)
    throw std::invalid_argument("chapelle_wu_bound: delta must lie in (0, 1)");

  const double n = static_cast<double>(inputs.sample_size);
  const double complexity = 3.0 * inputs.lipschitz_l2 * spec.weight_radius *
                            spec.row_norm_bound *
                            std::sqrt(static_cast<double>(spec.docs_per_query) / n);
  const double confidence = std::sqrt(8.0 * std::log(1.0 / inputs.delta) / n);

  BoundReport report;
  report.formula_id = "baseline_l2_lipschitz";
  report.terms = {{"empirical_risk", empirical_risk},
                  {"complexity", complexity},
                  {"confidence", confidence}};
  report.value = empirical_risk + complexity + confidence;
  return report;
}

}  // namespace ranklip
