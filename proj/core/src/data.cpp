#include "ranklip/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "ranklip/rng.hpp"

namespace ranklip {

namespace {

void validate(const GeneratorConfig& config) {
  if (config.docs_per_query < 2) throw std::invalid_argument("generator: docs_per_query must be >= 2");
  if (config.feature_dim < 1) throw std::invalid_argument("generator: feature_dim must be >= 1");
  if (config.num_queries < 0) throw std::invalid_argument("generator: num_queries must be >= 0");
  if (config.row_norm_bound <= 0.0) throw std::invalid_argument("generator: row_norm_bound must be > 0");
  if (config.row_norm_family == NormExponent::L1)
    throw std::invalid_argument("generator: row_norm_family must be L2 or LInf");
  if (config.label_mode == LabelMode::GradedInteger && config.max_grade < 1)
    throw std::invalid_argument("generator: max_grade must be >= 1");
  if (config.label_scale < 0.0) throw std::invalid_argument("generator: label_scale must be >= 0");
  if (config.label_noise < 0.0) throw std::invalid_argument("generator: label_noise must be >= 0");
  if (config.planted_weights && config.planted_weights->size() != config.feature_dim)
    throw std::invalid_argument("generator: planted_weights dimension mismatch");
}

Vector derive_planted_weights(const GeneratorConfig& config, std::uint64_t seed) {
  if (config.planted_weights) return *config.planted_weights;
  Rng rng(mix_seed(seed, 0x77aa));
  Vector w(config.feature_dim);
  double norm = 0.0;
  do {
    for (int k = 0; k < config.feature_dim; ++k) w[k] = rng.gaussian();
    norm = vector_norm(w, NormExponent::L2);
  } while (norm < 1e-300);
  return w / norm;
}

// Uniform draw in the row-norm ball. L2: uniform direction, d-th-root
// radius; LInf: per-coordinate uniform. A final rescale pins rounding
// overshoot back inside the ball.
void fill_row(Rng& rng, NormExponent family, double bound, Eigen::Ref<Eigen::RowVectorXd> row) {
  const int dim = static_cast<int>(row.size());
  if (family == NormExponent::L2) {
    Vector direction(dim);
    double norm = 0.0;
    do {
      for (int k = 0; k < dim; ++k) direction[k] = rng.gaussian();
      norm = vector_norm(direction, NormExponent::L2);
    } while (norm < 1e-300);
    const double radius = bound * std::pow(rng.uniform(), 1.0 / dim);
    for (int k = 0; k < dim; ++k) row[k] = direction[k] / norm * radius;
  } else {
    for (int k = 0; k < dim; ++k) row[k] = rng.uniform(-bound, bound);
  }
  Vector check = row.transpose();
  const double norm = vector_norm(check, family);
  if (norm > bound) row *= bound / norm;
}

RankingInstance make_instance(const GeneratorConfig& config, const Vector& planted,
                              std::uint64_t instance_seed) {
  Rng rng(instance_seed);
  RankingInstance instance;
  instance.features.resize(config.docs_per_query, config.feature_dim);
  for (int j = 0; j < config.docs_per_query; ++j) {
    fill_row(rng, config.row_norm_family, config.row_norm_bound, instance.features.row(j));
  }
  const Vector scores = instance.features * planted;
  if (config.label_mode == LabelMode::ScoreBased) {
    instance.relevance = config.label_scale * scores;
    if (config.label_noise > 0.0) {
      for (int j = 0; j < config.docs_per_query; ++j) {
        instance.relevance[j] += config.label_noise * rng.gaussian();
      }
    }
  } else {
    const Vector p = softmax(config.label_scale * scores);
    const double top = p.maxCoeff();
    instance.relevance.resize(config.docs_per_query);
    for (int j = 0; j < config.docs_per_query; ++j) {
      instance.relevance[j] = std::round(config.max_grade * p[j] / top);
    }
  }
  return instance;
}

}  // namespace

Dataset generate_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
  validate(config);
  const Vector planted = derive_planted_weights(config, seed);
  Dataset data;
  data.instances.reserve(static_cast<std::size_t>(config.num_queries));
  for (long i = 0; i < config.num_queries; ++i) {
    data.instances.push_back(
        make_instance(config, planted, mix_seed(seed, static_cast<std::uint64_t>(i) + 1)));
  }
  data.provenance = describe(config) + ";seed=" + std::to_string(seed);
  return data;
}

namespace {

struct ParsedLine {
  double relevance = 0.0;
  std::string qid;
  std::vector<std::pair<int, double>> features;
};

double parse_number(const std::string& token, long line, const char* what) {
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size() || !std::isfinite(value)) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw ParseError(line, std::string("expected a number for ") + what + ", got '" + token + "'");
  }
}

ParsedLine parse_line(const std::string& raw, long line) {
  ParsedLine out;
  std::istringstream stream(raw);
  std::string token;
  if (!(stream >> token)) throw ParseError(line, "empty line");
  out.relevance = parse_number(token, line, "relevance");
  if (!(stream >> token) || token.rfind("qid:", 0) != 0 || token.size() <= 4) {
    throw ParseError(line, "expected qid:<id> after the relevance label");
  }
  out.qid = token.substr(4);
  while (stream >> token) {
    const auto colon = token.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= token.size()) {
      throw ParseError(line, "expected <feature>:<value>, got '" + token + "'");
    }
    const std::string id_part = token.substr(0, colon);
    if (id_part.find_first_not_of("0123456789") != std::string::npos) {
      throw ParseError(line, "feature ids must be positive integers, got '" + id_part + "'");
    }
    const long id = std::strtol(id_part.c_str(), nullptr, 10);
    if (id < 1) throw ParseError(line, "feature ids are 1-indexed, got '" + id_part + "'");
    const double value = parse_number(token.substr(colon + 1), line, "feature value");
    for (const auto& [seen, unused] : out.features) {
      if (seen == id) throw ParseError(line, "duplicate feature id " + id_part);
    }
    out.features.emplace_back(static_cast<int>(id), value);
  }
  return out;
}

}  // namespace

Dataset parse_ranking_file(std::istream& input) {
  std::vector<std::pair<std::string, std::vector<ParsedLine>>> groups;
  std::map<std::string, std::size_t> first_seen;

  std::string raw;
  long line = 0;
  int max_feature = 0;
  while (std::getline(input, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    if (raw.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    ParsedLine parsed = parse_line(raw, line);
    for (const auto& [id, value] : parsed.features) max_feature = std::max(max_feature, id);

    if (groups.empty() || groups.back().first != parsed.qid) {
      const auto [it, inserted] = first_seen.emplace(parsed.qid, groups.size());
      if (!inserted) {
        throw ParseError(line, "qid " + parsed.qid + " reappears after other queries; documents must be grouped");
      }
      groups.emplace_back(parsed.qid, std::vector<ParsedLine>{});
    }
    groups.back().second.push_back(std::move(parsed));
  }

  Dataset data;
  if (groups.empty()) return data;

  const std::size_t docs = groups.front().second.size();
  for (const auto& [qid, lines] : groups) {
    if (lines.size() != docs) {
      throw ParseError(line, "qid " + qid + " has " + std::to_string(lines.size()) +
                                 " documents, expected " + std::to_string(docs));
    }
    RankingInstance instance;
    instance.features = Matrix::Zero(static_cast<Eigen::Index>(docs), max_feature);
    instance.relevance.resize(static_cast<Eigen::Index>(docs));
    for (std::size_t j = 0; j < docs; ++j) {
      instance.relevance[static_cast<Eigen::Index>(j)] = lines[j].relevance;
      for (const auto& [id, value] : lines[j].features) {
        instance.features(static_cast<Eigen::Index>(j), id - 1) = value;
      }
    }
    data.instances.push_back(std::move(instance));
  }
  data.provenance = "stream";
  return data;
}

Dataset parse_ranking_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw std::runtime_error("cannot open ranking file: " + path);
  Dataset data = parse_ranking_file(input);
  data.provenance = "file:" + path;
  return data;
}

void write_ranking_file(std::ostream& out, const Dataset& data) {
  char buffer[64];
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const auto& instance = data.instances[i];
    for (Eigen::Index j = 0; j < instance.features.rows(); ++j) {
      std::snprintf(buffer, sizeof(buffer), "%.17g", instance.relevance[j]);
      out << buffer << " qid:" << (i + 1);
      for (Eigen::Index k = 0; k < instance.features.cols(); ++k) {
        // always emit the last column so the feature dimension round-trips
        if (instance.features(j, k) == 0.0 && k + 1 < instance.features.cols()) continue;
        std::snprintf(buffer, sizeof(buffer), "%.17g", instance.features(j, k));
        out << ' ' << (k + 1) << ':' << buffer;
      }
      out << '\n';
    }
  }
}

double empirical_risk(const Vector& weights, const Dataset& data, const ScoreLoss& loss) {
  if (data.instances.empty()) throw std::invalid_argument("empirical_risk: empty dataset");
  if (weights.size() != data.feature_dim())
    throw std::invalid_argument("empirical_risk: weights dimension mismatch");
  std::vector<double> losses;
  losses.reserve(data.instances.size());
  for (const auto& instance : data.instances) {
    losses.push_back(loss.value(instance.features * weights, instance.relevance));
  }
  return neumaier_sum(losses) / static_cast<double>(losses.size());
}

RiskEstimate population_risk_mc(const Vector& weights, const GeneratorConfig& config,
                                long num_samples, std::uint64_t seed, const ScoreLoss& loss) {
  validate(config);
  if (num_samples < 2) throw std::invalid_argument("population_risk_mc: need at least two samples");
  if (weights.size() != config.feature_dim)
    throw std::invalid_argument("population_risk_mc: weights dimension mismatch");

  const Vector planted = derive_planted_weights(config, seed);
  std::vector<double> losses;
  losses.reserve(static_cast<std::size_t>(num_samples));
  for (long i = 0; i < num_samples; ++i) {
    const RankingInstance instance =
        make_instance(config, planted, mix_seed(seed, static_cast<std::uint64_t>(i) + 1));
    losses.push_back(loss.value(instance.features * weights, instance.relevance));
  }
  RiskEstimate out;
  out.samples = num_samples;
  out.estimate = neumaier_sum(losses) / static_cast<double>(num_samples);
  std::vector<double> squares;
  squares.reserve(losses.size());
  for (double v : losses) squares.push_back((v - out.estimate) * (v - out.estimate));
  const double variance = neumaier_sum(squares) / static_cast<double>(num_samples - 1);
  out.std_error = std::sqrt(std::max(variance, 0.0) / static_cast<double>(num_samples));
  return out;
}

std::string describe(const GeneratorConfig& config) {
  char r[32], beta[32], sigma[32];
  std::snprintf(r, sizeof(r), "%.17g", config.row_norm_bound);
  std::snprintf(beta, sizeof(beta), "%.17g", config.label_scale);
  std::snprintf(sigma, sizeof(sigma), "%.17g", config.label_noise);
  std::ostringstream out;
  out << "m=" << config.docs_per_query << ";d=" << config.feature_dim
      << ";n=" << config.num_queries
      << ";rows=" << norm_name(config.row_norm_family) << ";R=" << r
      << ";labels=" << (config.label_mode == LabelMode::ScoreBased ? "score" : "graded")
      << ";max_grade=" << config.max_grade << ";beta=" << beta << ";sigma=" << sigma
      << ";planted=" << (config.planted_weights ? "explicit" : "derived");
  return out.str();
}

}  // namespace ranklip
