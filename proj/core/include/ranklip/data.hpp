#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranklip/linalg.hpp"
#include "ranklip/loss.hpp"

namespace ranklip {

struct RankingInstance {
  Matrix features;   // m x d, one row per document
  Vector relevance;  // m
};

enum class LabelMode { GradedInteger, ScoreBased };

struct GeneratorConfig {
  int docs_per_query = 2;  // m
  int feature_dim = 2;     // d
  long num_queries = 1;    // n
  NormExponent row_norm_family = NormExponent::L2;  // L2 or LInf rows
  double row_norm_bound = 1.0;                      // R
  LabelMode label_mode = LabelMode::ScoreBased;
  int max_grade = 4;        // graded mode: labels in {0, ..., max_grade}
  double label_scale = 1.0;  // score-based: y = label_scale * X w* + noise
  double label_noise = 0.0;  // gaussian std-dev on score-based labels
  std::optional<Vector> planted_weights;  // w*; seed-derived unit vector when absent
};

struct Dataset {
  std::vector<RankingInstance> instances;
  std::string provenance;

  long size() const { return static_cast<long>(instances.size()); }
  int docs_per_query() const {
    return instances.empty() ? 0 : static_cast<int>(instances.front().features.rows());
  }
  int feature_dim() const {
    return instances.empty() ? 0 : static_cast<int>(instances.front().features.cols());
  }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(long line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

// Rows drawn uniformly in the configured row-norm ball; labels per mode.
// Deterministic under (config, seed): repeated calls are bit-identical.
Dataset generate_synthetic(const GeneratorConfig& config, std::uint64_t seed);

// One document per line, "<rel> qid:<id> <fid>:<val> ... [# comment]",
// features 1-indexed and sparse (missing ids read as 0), documents grouped
// by qid. Queries with differing document counts are an error.
Dataset parse_ranking_file(std::istream& input);
Dataset parse_ranking_file(const std::string& path);

void write_ranking_file(std::ostream& out, const Dataset& data);

// Mean per-query loss at the given weights (compensated summation).
double empirical_risk(const Vector& weights, const Dataset& data, const ScoreLoss& loss);

struct RiskEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Monte Carlo estimate of the expected loss under the generator's
// distribution: mean +- standard error over freshly drawn queries.
RiskEstimate population_risk_mc(const Vector& weights, const GeneratorConfig& config,
                                long num_samples, std::uint64_t seed, const ScoreLoss& loss);

// Flat key=value serialization used for provenance strings and hashing.
std::string describe(const GeneratorConfig& config);

}  // namespace ranklip
