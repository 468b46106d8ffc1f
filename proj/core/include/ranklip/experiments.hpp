#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ranklip/bounds.hpp"
#include "ranklip/data.hpp"
#include "ranklip/function_class.hpp"
#include "ranklip/optimize.hpp"
#include "ranklip/verify.hpp"

namespace ranklip {

enum class OutputFormat { Csv, Json };

struct ExperimentConfig {
  std::string experiment;  // certify|train|bounds|gap|rates|compare-cw|rademacher-mc
  GeneratorConfig generator;
  BallConstraint ball{NormFamily::L2, 1.0};
  std::vector<long> sample_grid;  // n values (compare-cw reads it as the m grid)
  int trials = 20;
  double delta = 0.01;
  std::uint64_t seed = 1;
  std::string output_path;  // empty writes to stdout
  OutputFormat format = OutputFormat::Csv;

  // harness knobs, all defaulted
  long mc_samples = 2000;        // population-risk Monte Carlo draws
  int sigma_draws = 64;          // Rademacher sign draws
  int restarts = 4;              // ascent restarts per sign draw
  long certify_samples = 100000; // budget for the certification sweeps
  int rate_seeds = 10;           // seeds for the rate-interpolation medians
  double erm_tolerance = 1e-7;
  int erm_max_iters = 400;
};

struct RademacherEstimate {
  int sigma_draws = 0;  // sign vectors averaged over (2^n when enumerated)
  int restarts = 0;
  double estimate = 0.0;
  double std_error = 0.0;  // 0 when the sign expectation is exact
};

struct SlopeFit {
  std::vector<std::pair<double, double>> points;  // (log n, log gap)
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int excluded = 0;  // non-positive gaps dropped before fitting
};

// Approximate empirical Rademacher complexity of the loss class over the
// ball: average over sign vectors of the best projected-gradient-ascent
// value of (1/n) sum_i sigma_i loss(X_i w, y_i). Enumerates all 2^n sign
// vectors when that is no more work than sampling (exact expectation);
// otherwise uses antithetic sampled pairs. The inner maximization is
// approximate, so the estimate lower-bounds the true sup-average.
RademacherEstimate estimate_empirical_rademacher(const Dataset& data, const BallConstraint& ball,
                                                 int sigma_draws, int restarts,
                                                 std::uint64_t seed);

// Ordinary least squares on (log n, log gap); points with non-positive gap
// are excluded and counted.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points);

// Flat key=value or JSON text applied on top of `base`; unknown keys are an
// error naming the field.
ExperimentConfig parse_experiment_config(const std::string& text,
                                         const ExperimentConfig& base = ExperimentConfig{});
ExperimentConfig default_experiment_config(const std::string& experiment);

std::string canonical_config_string(const ExperimentConfig& config);
std::uint64_t config_hash(const ExperimentConfig& config);

// Runs the configured experiment and writes its report (CSV or JSON) to the
// output path or stdout. Returns 0 when every embedded check passes, 1 when
// a check fails. Invalid configurations throw std::invalid_argument.
int run_experiment(const ExperimentConfig& config);
int run_experiment(const ExperimentConfig& config, std::ostream& out);

}  // namespace ranklip
