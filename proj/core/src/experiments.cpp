#include "ranklip/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <variant>

#include <json.hpp>

#include "ranklip/bounds.hpp"
#include "ranklip/rng.hpp"

namespace ranklip {

namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// report tables: one emission path for CSV and JSON

using Cell = std::variant<double, long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
    rows.push_back(std::move(row));
  }
};

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(table.columns[i]);
  }
  out << "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(
          [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) out << format_double(v);
            else if constexpr (std::is_same_v<T, long>) out << v;
            else if constexpr (std::is_same_v<T, bool>) out << (v ? "true" : "false");
            else out << csv_escape(v);
          },
          row[i]);
    }
    out << "\r\n";
  }
}

Json cell_to_json(const Cell& cell) {
  return std::visit([](const auto& v) { return Json(v); }, cell);
}

Json table_to_json(const Table& table) {
  Json rows = Json::array();
  for (const auto& row : table.rows) {
    Json obj = Json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = cell_to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  return rows;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& known_experiments() {
  static const std::vector<std::string> names = {"certify",  "train", "bounds",       "gap",
                                                 "rates",    "compare-cw", "rademacher-mc"};
  return names;
}

ClassSpec spec_from(const ExperimentConfig& config, int docs, long n) {
  ClassSpec spec;
  spec.family = config.ball.family;
  spec.weight_radius = config.ball.radius;
  spec.row_norm_bound = config.generator.row_norm_bound;
  spec.feature_dim = config.generator.feature_dim;
  spec.docs_per_query = docs;
  (void)n;
  return spec;
}

BoundInputs inputs_from(const ExperimentConfig& config, const ClassSpec& spec, long n) {
  BoundInputs inputs;
  inputs.sample_size = n;
  inputs.delta = config.delta;
  inputs.lipschitz = 2.0;
  inputs.smoothness = 2.0;
  inputs.lipschitz_l2 = 2.0;
  inputs.uniform_bound = uniform_loss_bound(spec);
  return inputs;
}

std::uint64_t stream_tag(int purpose, long a, long b) {
  return (static_cast<std::uint64_t>(purpose) << 40) ^
         (static_cast<std::uint64_t>(a) << 20) ^ static_cast<std::uint64_t>(b);
}

void validate_config(const ExperimentConfig& config) {
  const auto& names = known_experiments();
  if (std::find(names.begin(), names.end(), config.experiment) == names.end()) {
    throw std::invalid_argument("experiment: unknown value '" + config.experiment + "'");
  }
  if (config.trials < 1) throw std::invalid_argument("trials: must be >= 1");
  if (config.delta <= 0.0 || config.delta >= 1.0)
    throw std::invalid_argument("delta: must lie in (0, 1)");
  for (std::size_t i = 1; i < config.sample_grid.size(); ++i) {
    if (config.sample_grid[i] <= config.sample_grid[i - 1])
      throw std::invalid_argument("n_grid: must be strictly increasing");
  }
  if (!config.sample_grid.empty() && config.sample_grid.front() < 1)
    throw std::invalid_argument("n_grid: entries must be >= 1");
  if (config.mc_samples < 2) throw std::invalid_argument("mc_samples: must be >= 2");
  if (config.sigma_draws < 1) throw std::invalid_argument("sigma_draws: must be >= 1");
  if (config.restarts < 1) throw std::invalid_argument("restarts: must be >= 1");
  if (config.certify_samples < 1) throw std::invalid_argument("certify_samples: must be >= 1");
  if (config.rate_seeds < 1) throw std::invalid_argument("rate_seeds: must be >= 1");
  if (config.erm_tolerance <= 0.0) throw std::invalid_argument("erm_tolerance: must be > 0");
  if (config.erm_max_iters < 1) throw std::invalid_argument("erm_max_iters: must be >= 1");
}

}  // namespace

// ---------------------------------------------------------------------------
// empirical Rademacher complexity

namespace {

double signed_objective(const Dataset& data, const std::vector<int>& signs, const Vector& w,
                        const ScoreLoss& loss) {
  std::vector<double> terms;
  terms.reserve(data.instances.size());
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const auto& instance = data.instances[i];
    terms.push_back(signs[i] * loss.value(instance.features * w, instance.relevance));
  }
  return neumaier_sum(terms) / static_cast<double>(data.size());
}

Vector signed_gradient(const Dataset& data, const std::vector<int>& signs, const Vector& w,
                       const ScoreLoss& loss) {
  Vector grad = Vector::Zero(w.size());
  for (std::size_t i = 0; i < data.instances.size(); ++i) {
    const auto& instance = data.instances[i];
    grad += signs[i] *
            (instance.features.transpose() * loss.gradient(instance.features * w, instance.relevance));
  }
  return grad / static_cast<double>(data.size());
}

double ascend(const Dataset& data, const std::vector<int>& signs, const BallConstraint& ball,
              const ScoreLoss& loss, Vector w) {
  double value = signed_objective(data, signs, w, loss);
  double step = std::max(ball.radius, 1e-3);
  for (int iter = 0; iter < 48 && step > 1e-12; ++iter) {
    const Vector grad = signed_gradient(data, signs, w, loss);
    const Vector candidate = project_onto_ball(w + step * grad, ball);
    const double candidate_value = signed_objective(data, signs, candidate, loss);
    if (candidate_value > value) {
      value = candidate_value;
      w = candidate;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return value;
}

double best_over_restarts(const Dataset& data, const std::vector<int>& signs,
                          const BallConstraint& ball, const ScoreLoss& loss, int restarts,
                          Rng& rng) {
  const int dim = data.feature_dim();
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Vector start;
    if (r == 0) {
      start = Vector::Zero(dim);
    } else if (r == 1) {
      // boundary start along the ascent direction at the origin
      Vector g = signed_gradient(data, signs, Vector::Zero(dim), loss);
      const double norm = vector_norm(g, NormExponent::L2);
      start = norm > 0.0 ? project_onto_ball(Vector((ball.radius / norm) * g), ball)
                         : Vector::Zero(dim);
    } else {
      start.resize(dim);
      for (int k = 0; k < dim; ++k) start[k] = rng.gaussian();
      const double norm = vector_norm(start, NormExponent::L2);
      if (norm > 0.0) start *= ball.radius * rng.uniform() / norm;
      start = project_onto_ball(start, ball);
    }
    best = std::max(best, ascend(data, signs, ball, loss, start));
  }
  return best;
}

}  // namespace

RademacherEstimate estimate_empirical_rademacher(const Dataset& data, const BallConstraint& ball,
                                                 int sigma_draws, int restarts,
                                                 std::uint64_t seed) {
  if (data.instances.empty())
    throw std::invalid_argument("estimate_empirical_rademacher: empty dataset");
  if (sigma_draws < 1)
    throw std::invalid_argument("estimate_empirical_rademacher: sigma_draws must be >= 1");
  if (restarts < 1)
    throw std::invalid_argument("estimate_empirical_rademacher: restarts must be >= 1");
  if (ball.radius < 0.0)
    throw std::invalid_argument("estimate_empirical_rademacher: radius must be >= 0");

  const ListNetLoss loss;
  const long n = data.size();
  RademacherEstimate out;
  out.restarts = restarts;

  const bool enumerate = n < 20 && (1L << n) <= static_cast<long>(sigma_draws);
  std::vector<int> signs(static_cast<std::size_t>(n));
  std::vector<double> values;

  if (enumerate) {
    // exact sign expectation: walk mask/complement pairs so opposite draws
    // cancel exactly (a singleton class yields exactly zero)
    const long total = 1L << n;
    for (long mask = 0; mask < total / 2; ++mask) {
      Rng rng(mix_seed(seed, static_cast<std::uint64_t>(mask)));
      for (long i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? 1 : -1;
      values.push_back(best_over_restarts(data, signs, ball, loss, restarts, rng));
      for (long i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] *= -1;
      values.push_back(best_over_restarts(data, signs, ball, loss, restarts, rng));
    }
    out.sigma_draws = static_cast<int>(total);
    out.estimate = neumaier_sum(values) / static_cast<double>(total);
    out.std_error = 0.0;  // exact expectation, no sampling error
    return out;
  }

  const int pairs = (sigma_draws + 1) / 2;
  for (int p = 0; p < pairs; ++p) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(p)));
    for (long i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] = rng.sign();
    values.push_back(best_over_restarts(data, signs, ball, loss, restarts, rng));
    for (long i = 0; i < n; ++i) signs[static_cast<std::size_t>(i)] *= -1;
    values.push_back(best_over_restarts(data, signs, ball, loss, restarts, rng));
  }
  out.sigma_draws = static_cast<int>(values.size());
  out.estimate = neumaier_sum(values) / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.estimate) * (v - out.estimate);
  const double variance = ss / static_cast<double>(values.size() - 1);
  out.std_error = std::sqrt(std::max(variance, 0.0) / static_cast<double>(values.size()));
  return out;
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) throw std::invalid_argument("slope_fit: need at least 3 points");
  SlopeFit fit;
  for (const auto& [n, gap] : points) {
    if (gap <= 0.0 || n <= 0.0) {
      ++fit.excluded;
      continue;
    }
    fit.points.emplace_back(std::log(n), std::log(gap));
  }
  if (fit.points.size() < 3)
    throw std::invalid_argument("slope_fit: fewer than 3 usable points after exclusions");

  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& [x, y] : fit.points) {
    mean_x += x;
    mean_y += y;
  }
  mean_x /= static_cast<double>(fit.points.size());
  mean_y /= static_cast<double>(fit.points.size());
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mean_x) * (x - mean_x);
    sxy += (x - mean_x) * (y - mean_y);
    syy += (y - mean_y) * (y - mean_y);
  }
  if (sxx == 0.0) throw std::invalid_argument("slope_fit: degenerate abscissae");
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  double residual = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double e = y - (fit.intercept + fit.slope * x);
    residual += e * e;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - residual / syy;
  return fit;
}

// ---------------------------------------------------------------------------
// configuration parsing

namespace {

NormFamily parse_family(const std::string& value, const char* field) {
  if (value == "l2" || value == "L2") return NormFamily::L2;
  if (value == "l1" || value == "L1") return NormFamily::L1;
  throw std::invalid_argument(std::string(field) + ": expected l1 or l2, got '" + value + "'");
}

NormExponent parse_rows(const std::string& value) {
  if (value == "l2" || value == "L2") return NormExponent::L2;
  if (value == "linf" || value == "Linf" || value == "LInf") return NormExponent::LInf;
  throw std::invalid_argument("rows: expected l2 or linf, got '" + value + "'");
}

LabelMode parse_labels(const std::string& value) {
  if (value == "score") return LabelMode::ScoreBased;
  if (value == "graded") return LabelMode::GradedInteger;
  throw std::invalid_argument("labels: expected score or graded, got '" + value + "'");
}

OutputFormat parse_format(const std::string& value) {
  if (value == "csv") return OutputFormat::Csv;
  if (value == "json") return OutputFormat::Json;
  throw std::invalid_argument("format: expected csv or json, got '" + value + "'");
}

std::vector<long> parse_grid(const std::string& value) {
  std::vector<long> grid;
  std::istringstream stream(value);
  std::string piece;
  while (std::getline(stream, piece, ',')) {
    if (piece.empty()) continue;
    grid.push_back(std::stol(piece));
  }
  return grid;
}

void apply_key(ExperimentConfig& config, const std::string& key, const std::string& value) {
  try {
    if (key == "experiment") config.experiment = value;
    else if (key == "m") config.generator.docs_per_query = std::stoi(value);
    else if (key == "d") config.generator.feature_dim = std::stoi(value);
    else if (key == "n") config.generator.num_queries = std::stol(value);
    else if (key == "rows") config.generator.row_norm_family = parse_rows(value);
    else if (key == "R") config.generator.row_norm_bound = std::stod(value);
    else if (key == "labels") config.generator.label_mode = parse_labels(value);
    else if (key == "max_grade") config.generator.max_grade = std::stoi(value);
    else if (key == "beta") config.generator.label_scale = std::stod(value);
    else if (key == "sigma") config.generator.label_noise = std::stod(value);
    else if (key == "ball") config.ball.family = parse_family(value, "ball");
    else if (key == "W") config.ball.radius = std::stod(value);
    else if (key == "n_grid") config.sample_grid = parse_grid(value);
    else if (key == "trials") config.trials = std::stoi(value);
    else if (key == "delta") config.delta = std::stod(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(std::stoull(value));
    else if (key == "out") config.output_path = value;
    else if (key == "format") config.format = parse_format(value);
    else if (key == "mc_samples") config.mc_samples = std::stol(value);
    else if (key == "sigma_draws") config.sigma_draws = std::stoi(value);
    else if (key == "restarts") config.restarts = std::stoi(value);
    else if (key == "certify_samples") config.certify_samples = std::stol(value);
    else if (key == "rate_seeds") config.rate_seeds = std::stoi(value);
    else if (key == "erm_tolerance") config.erm_tolerance = std::stod(value);
    else if (key == "erm_max_iters") config.erm_max_iters = std::stoi(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument(key + ": cannot parse value '" + value + "'");
  }
}

std::string json_scalar_to_string(const Json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
  return value.dump();
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text) {
  ExperimentConfig config;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    Json parsed;
    try {
      parsed = Json::parse(text);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config JSON: ") + e.what());
    }
    for (const auto& [key, value] : parsed.items()) {
      if (key == "n_grid" && value.is_array()) {
        config.sample_grid.clear();
        for (const auto& entry : value) config.sample_grid.push_back(entry.get<long>());
      } else {
        apply_key(config, key, json_scalar_to_string(value));
      }
    }
    return config;
  }

  std::istringstream stream(text);
  std::string raw;
  while (std::getline(stream, raw)) {
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const auto begin = raw.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = raw.find_last_not_of(" \t\r");
    const std::string line = raw.substr(begin, end - begin + 1);
    const auto equals = line.find('=');
    if (equals == std::string::npos)
      throw std::invalid_argument("config: expected key=value, got '" + line + "'");
    apply_key(config, line.substr(0, equals), line.substr(equals + 1));
  }
  return config;
}

ExperimentConfig default_experiment_config(const std::string& experiment) {
  ExperimentConfig config;
  config.experiment = experiment;
  config.generator.docs_per_query = 5;
  config.generator.feature_dim = 10;
  config.generator.row_norm_bound = 1.0;
  config.generator.label_scale = 10.0;
  config.ball = {NormFamily::L2, 1.0};

  if (experiment == "gap") {
    config.sample_grid = {50, 100, 200, 400, 800, 1600, 3200};
    config.trials = 20;
  } else if (experiment == "rates") {
    config.sample_grid = {100, 200, 400, 800, 1600, 3200, 6400};
    config.generator.docs_per_query = 3;
    config.generator.feature_dim = 5;
    config.trials = 1;
  } else if (experiment == "compare-cw") {
    config.sample_grid = {4, 16, 64, 256};  // document counts for this experiment
    config.generator.num_queries = 10000;
    config.trials = 1;
  } else if (experiment == "rademacher-mc") {
    config.sample_grid = {20, 50};
    config.generator.docs_per_query = 2;
    config.generator.feature_dim = 3;
    config.trials = 2;
    config.sigma_draws = 64;
    config.restarts = 4;
  } else if (experiment == "bounds") {
    config.sample_grid = {100, 1000, 10000};
    config.trials = 1;
  } else if (experiment == "train") {
    config.sample_grid = {50, 200};
    config.trials = 2;
  } else if (experiment == "certify") {
    config.trials = 1;
    config.certify_samples = 100000;
  }
  return config;
}

std::string canonical_config_string(const ExperimentConfig& config) {
  std::ostringstream out;
  out << "experiment=" << config.experiment << "\n";
  out << "generator=" << describe(config.generator) << "\n";
  out << "ball=" << (config.ball.family == NormFamily::L2 ? "l2" : "l1") << "\n";
  out << "W=" << format_double(config.ball.radius) << "\n";
  out << "n_grid=";
  for (std::size_t i = 0; i < config.sample_grid.size(); ++i) {
    if (i) out << ',';
    out << config.sample_grid[i];
  }
  out << "\n";
  out << "trials=" << config.trials << "\n";
  out << "delta=" << format_double(config.delta) << "\n";
  out << "seed=" << config.seed << "\n";
  out << "format=" << (config.format == OutputFormat::Csv ? "csv" : "json") << "\n";
  out << "mc_samples=" << config.mc_samples << "\n";
  out << "sigma_draws=" << config.sigma_draws << "\n";
  out << "restarts=" << config.restarts << "\n";
  out << "certify_samples=" << config.certify_samples << "\n";
  out << "rate_seeds=" << config.rate_seeds << "\n";
  out << "erm_tolerance=" << format_double(config.erm_tolerance) << "\n";
  out << "erm_max_iters=" << config.erm_max_iters << "\n";
  return out.str();
}

std::uint64_t config_hash(const ExperimentConfig& config) {
  const std::string canonical = canonical_config_string(config);
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// ---------------------------------------------------------------------------
// experiment drivers

namespace {

std::string hash_hex(std::uint64_t hash) {
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

struct Emitter {
  const ExperimentConfig& config;
  std::ostream& out;

  void emit(const Table& table, const Json& summary, bool passed) const {
    if (config.format == OutputFormat::Csv) {
      write_csv(out, table);
      return;
    }
    Json report = Json::object();
    report["experiment"] = config.experiment;
    report["seed"] = config.seed;
    report["config_hash"] = hash_hex(config_hash(config));
    report["config"] = canonical_config_string(config);
    report["pass"] = passed;
    if (!summary.is_null()) report["summary"] = summary;
    report["rows"] = table_to_json(table);
    out << report.dump(2) << "\n";
  }
};

Json certification_to_json(const CertificationReport& report) {
  Json entry = Json::object();
  entry["quantity"] = report.quantity;
  entry["estimate"] = report.estimate;
  entry["bound"] = report.bound;
  entry["tolerance"] = report.tolerance;
  entry["samples"] = report.samples;
  entry["pass"] = report.pass;
  if (!report.detail.empty()) entry["detail"] = report.detail;
  Json witnesses = Json::array();
  for (const auto& witness : report.witnesses) {
    Json w = Json::object();
    w["value"] = witness.value;
    Json inputs = Json::array();
    for (const auto& v : witness.inputs) {
      Json vec = Json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) vec.push_back(v[i]);
      inputs.push_back(std::move(vec));
    }
    w["inputs"] = std::move(inputs);
    if (witness.matrix) {
      Json rows = Json::array();
      for (Eigen::Index r = 0; r < witness.matrix->rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < witness.matrix->cols(); ++c)
          row.push_back((*witness.matrix)(r, c));
        rows.push_back(std::move(row));
      }
      w["matrix"] = std::move(rows);
    }
    witnesses.push_back(std::move(w));
  }
  entry["witnesses"] = std::move(witnesses);
  return entry;
}

int run_certify(const ExperimentConfig& config, std::ostream& out) {
  std::vector<CertificationReport> reports;
  const long sweep = config.certify_samples;
  const long search_budget = std::max<long>(1, sweep / 10);
  reports.push_back(estimate_lipschitz_constant(2, search_budget, mix_seed(config.seed, 1)));
  reports.push_back(estimate_lipschitz_constant(10, search_budget, mix_seed(config.seed, 2)));
  reports.push_back(estimate_smoothness_constant(2, search_budget, mix_seed(config.seed, 3)));
  reports.push_back(estimate_smoothness_constant(100, search_budget, mix_seed(config.seed, 4)));
  for (int docs : {2, 5, 20}) {
    reports.push_back(self_bounding_sweep(docs, sweep, mix_seed(config.seed, 5 + docs)));
  }
  reports.push_back(norm_identity_check(1000, mix_seed(config.seed, 99)));

  bool all_pass = true;
  Json entries = Json::array();
  for (const auto& report : reports) {
    all_pass = all_pass && report.pass;
    entries.push_back(certification_to_json(report));
  }

  Json output = Json::object();
  output["experiment"] = config.experiment;
  output["seed"] = config.seed;
  output["config_hash"] = hash_hex(config_hash(config));
  output["pass"] = all_pass;
  output["reports"] = std::move(entries);
  out << output.dump(2) << "\n";
  return all_pass ? 0 : 1;
}

int run_train(const ExperimentConfig& config, std::ostream& out) {
  const ListNetLoss loss;
  Table table;
  table.columns = {"n",          "trial",     "algorithm", "final_risk", "average_risk",
                   "weight_norm", "in_ball",  "steps",     "converged",  "regret_proxy",
                   "seed",        "config_hash"};
  const std::string hash = hash_hex(config_hash(config));
  bool all_in_ball = true;

  const NormExponent ball_norm =
      config.ball.family == NormFamily::L2 ? NormExponent::L2 : NormExponent::L1;

  std::vector<long> grid = config.sample_grid.empty() ? std::vector<long>{config.generator.num_queries}
                                                      : config.sample_grid;
  for (std::size_t ni = 0; ni < grid.size(); ++ni) {
    for (int trial = 0; trial < config.trials; ++trial) {
      GeneratorConfig generator = config.generator;
      generator.num_queries = grid[ni];
      const Dataset data =
          generate_synthetic(generator, mix_seed(config.seed, stream_tag(1, static_cast<long>(ni), trial)));

      OgdConfig ogd;
      ogd.schedule = StepSchedule::SmoothOptimal;
      ogd.smoothness = 2.0 * generator.row_norm_bound * generator.row_norm_bound;
      ogd.optimistic_risk = 0.0;
      ogd.passes = 1;
      const TrainResult online = ogd_train(data, config.ball, ogd, loss);
      const double online_norm = vector_norm(online.averaged_weights, ball_norm);
      const bool online_ok = online_norm <= config.ball.radius + 1e-9;
      all_in_ball = all_in_ball && online_ok;
      table.add_row({static_cast<long>(grid[ni]), static_cast<long>(trial), std::string("ogd"),
                     empirical_risk(online.final_weights, data, loss),
                     empirical_risk(online.averaged_weights, data, loss), online_norm, online_ok,
                     static_cast<long>(online.per_step_losses.size()), true,
                     online.cumulative_regret_proxy, static_cast<long>(config.seed), hash});

      const ErmResult erm =
          erm_train(data, config.ball, config.erm_tolerance, config.erm_max_iters, loss);
      const double erm_norm = vector_norm(erm.weights, ball_norm);
      const bool erm_ok = erm_norm <= config.ball.radius + 1e-9;
      all_in_ball = all_in_ball && erm_ok;
      table.add_row({static_cast<long>(grid[ni]), static_cast<long>(trial), std::string("erm"),
                     erm.final_risk, erm.final_risk, erm_norm, erm_ok,
                     static_cast<long>(erm.iterations), erm.converged, 0.0,
                     static_cast<long>(config.seed), hash});
    }
  }

  Emitter{config, out}.emit(table, Json(), all_in_ball);
  return all_in_ball ? 0 : 1;
}

int run_bounds(const ExperimentConfig& config, std::ostream& out) {
  Table table;
  table.columns = {"n", "formula_id", "component", "amount", "seed", "config_hash"};
  const std::string hash = hash_hex(config_hash(config));

  std::vector<long> grid = config.sample_grid.empty() ? std::vector<long>{config.generator.num_queries}
                                                      : config.sample_grid;
  for (long n : grid) {
    const ClassSpec spec = spec_from(config, config.generator.docs_per_query, n);
    const BoundInputs inputs = inputs_from(config, spec, n);

    std::vector<BoundReport> reports;
    reports.push_back(lipschitz_generalization_bound(0.0, spec, inputs));
    reports.push_back(chapelle_wu_bound(0.0, inputs, spec));
    const SmoothIntermediates inter = smooth_intermediates(spec, inputs);
    reports.push_back(smooth_uniform_bound_solve(0.0, inter));
    reports.push_back(smooth_excess_risk_chain(0.0, inter));
    reports.push_back(online_excess_risk(0.0, spec.weight_radius,
                                         inputs.smoothness * spec.row_norm_bound *
                                             spec.row_norm_bound,
                                         n));

    for (const auto& report : reports) {
      table.add_row({n, report.formula_id, std::string("value"), report.value,
                     static_cast<long>(config.seed), hash});
      for (const auto& [name, amount] : report.terms) {
        table.add_row({n, report.formula_id, name, amount, static_cast<long>(config.seed), hash});
      }
    }
    table.add_row({n, std::string("smooth_intermediates"), std::string("complexity_scale"),
                   inter.complexity_scale, static_cast<long>(config.seed), hash});
    table.add_row({n, std::string("smooth_intermediates"), std::string("confidence_level"),
                   inter.confidence_level, static_cast<long>(config.seed), hash});
    table.add_row({n, std::string("smooth_intermediates"), std::string("fixed_point"),
                   inter.fixed_point, static_cast<long>(config.seed), hash});
    table.add_row({n, std::string("smooth_intermediates"), std::string("combined_level"),
                   inter.combined_level, static_cast<long>(config.seed), hash});
  }

  Emitter{config, out}.emit(table, Json(), true);
  return 0;
}

int run_gap(const ExperimentConfig& config, std::ostream& out) {
  const ListNetLoss loss;
  Table table;
  table.columns = {"n",
                   "trial",
                   "empirical_risk",
                   "population_risk",
                   "population_std_error",
                   "gap",
                   "uniform_bound_gap",
                   "smooth_bound_gap",
                   "complexity_scale",
                   "confidence_level",
                   "fixed_point",
                   "erm_converged",
                   "violation",
                   "seed",
                   "config_hash"};
  const std::string hash = hash_hex(config_hash(config));

  if (config.sample_grid.empty()) throw std::invalid_argument("n_grid: required for gap");

  long violations = 0;
  long runs = 0;
  for (std::size_t ni = 0; ni < config.sample_grid.size(); ++ni) {
    const long n = config.sample_grid[ni];
    for (int trial = 0; trial < config.trials; ++trial) {
      GeneratorConfig generator = config.generator;
      generator.num_queries = n;
      const Dataset data = generate_synthetic(
          generator, mix_seed(config.seed, stream_tag(1, static_cast<long>(ni), trial)));
      const ErmResult erm =
          erm_train(data, config.ball, config.erm_tolerance, config.erm_max_iters, loss);
      const double train_risk = empirical_risk(erm.weights, data, loss);
      const RiskEstimate population = population_risk_mc(
          erm.weights, generator, config.mc_samples,
          mix_seed(config.seed, stream_tag(2, static_cast<long>(ni), trial)), loss);
      const double gap = population.estimate - train_risk;

      const ClassSpec spec = spec_from(config, generator.docs_per_query, n);
      const BoundInputs inputs = inputs_from(config, spec, n);
      const BoundReport uniform = lipschitz_generalization_bound(train_risk, spec, inputs);
      const double uniform_gap = uniform.value - train_risk;
      const SmoothIntermediates inter = smooth_intermediates(spec, inputs);
      const BoundReport smooth = smooth_uniform_bound_solve(train_risk, inter);
      const double smooth_gap = smooth.value - train_risk;

      const bool violation = gap > uniform_gap;
      violations += violation ? 1 : 0;
      ++runs;
      table.add_row({n, static_cast<long>(trial), train_risk, population.estimate,
                     population.std_error, gap, uniform_gap, smooth_gap, inter.complexity_scale,
                     inter.confidence_level, inter.fixed_point, erm.converged, violation,
                     static_cast<long>(config.seed), hash});
    }
  }

  const long allowed = std::max<long>(1, static_cast<long>(std::floor(
                                             static_cast<double>(runs) * config.delta)));
  const bool passed = violations <= allowed;
  Json summary = Json::object();
  summary["runs"] = runs;
  summary["violations"] = violations;
  summary["allowed_violations"] = allowed;
  Emitter{config, out}.emit(table, summary, passed);
  return passed ? 0 : 1;
}

int run_rates(const ExperimentConfig& config, std::ostream& out) {
  const ListNetLoss loss;
  Table table;
  table.columns = {"setting", "record", "seed_index", "n",        "excess_risk",
                   "slope",   "r_squared", "excluded", "seed",    "config_hash"};
  const std::string hash = hash_hex(config_hash(config));

  if (config.sample_grid.empty()) throw std::invalid_argument("n_grid: required for rates");

  struct Setting {
    const char* name;
    double beta;
    double sigma;
  };
  const Setting settings[] = {{"near_optimistic", 10.0, 0.0}, {"pessimistic", 1.0, 1.0}};

  Json summary = Json::object();
  for (int si = 0; si < 2; ++si) {
    const Setting& setting = settings[si];
    GeneratorConfig generator = config.generator;
    generator.label_mode = LabelMode::ScoreBased;
    generator.label_scale = setting.beta;
    generator.label_noise = setting.sigma;

    // proxy optimum: ERM on a 50x larger sample; its error is shared by all
    // excess measurements below
    GeneratorConfig proxy_generator = generator;
    proxy_generator.num_queries = 50 * config.sample_grid.back();
    const Dataset proxy_data =
        generate_synthetic(proxy_generator, mix_seed(config.seed, stream_tag(3, si, 0)));
    const ErmResult proxy =
        erm_train(proxy_data, config.ball, config.erm_tolerance, config.erm_max_iters, loss);

    // one shared evaluation sample per setting: common random numbers make
    // the excess differences sharp
    GeneratorConfig eval_generator = generator;
    eval_generator.num_queries = std::max<long>(10L * config.mc_samples, 10000L);
    const Dataset eval_data =
        generate_synthetic(eval_generator, mix_seed(config.seed, stream_tag(4, si, 0)));
    const double proxy_risk = empirical_risk(proxy.weights, eval_data, loss);

    std::vector<double> slopes;
    for (int s = 0; s < config.rate_seeds; ++s) {
      std::vector<std::pair<double, double>> points;
      for (std::size_t ni = 0; ni < config.sample_grid.size(); ++ni) {
        const long n = config.sample_grid[ni];
        GeneratorConfig train_generator = generator;
        train_generator.num_queries = n;
        const Dataset data = generate_synthetic(
            train_generator,
            mix_seed(config.seed, stream_tag(5 + si, s * 1000 + static_cast<long>(ni), 0)));
        const ErmResult erm =
            erm_train(data, config.ball, config.erm_tolerance, config.erm_max_iters, loss);
        const double excess = empirical_risk(erm.weights, eval_data, loss) - proxy_risk;
        points.emplace_back(static_cast<double>(n), excess);
        table.add_row({std::string(setting.name), std::string("run"), static_cast<long>(s),
                       n, excess, 0.0, 0.0, 0L, static_cast<long>(config.seed), hash});
      }
      try {
        const SlopeFit fit = slope_fit(points);
        slopes.push_back(fit.slope);
        table.add_row({std::string(setting.name), std::string("fit"), static_cast<long>(s), 0L,
                       0.0, fit.slope, fit.r_squared, static_cast<long>(fit.excluded),
                       static_cast<long>(config.seed), hash});
      } catch (const std::invalid_argument&) {
        table.add_row({std::string(setting.name), std::string("fit_failed"),
                       static_cast<long>(s), 0L, 0.0, 0.0, 0.0, 0L,
                       static_cast<long>(config.seed), hash});
      }
    }

    double median_slope = std::numeric_limits<double>::quiet_NaN();
    if (!slopes.empty()) {
      std::sort(slopes.begin(), slopes.end());
      const std::size_t mid = slopes.size() / 2;
      median_slope = slopes.size() % 2 ? slopes[mid] : 0.5 * (slopes[mid - 1] + slopes[mid]);
    }
    table.add_row({std::string(setting.name), std::string("summary"), 0L, 0L, 0.0, median_slope,
                   0.0, 0L, static_cast<long>(config.seed), hash});
    summary[setting.name] = median_slope;
  }

  Emitter{config, out}.emit(table, summary, true);
  return 0;  // stochastic criterion: the report carries the verdict
}

int run_compare_cw(const ExperimentConfig& config, std::ostream& out) {
  Table table;
  table.columns = {"m",     "n",     "baseline_complexity", "lipschitz_complexity",
                   "ratio", "ratio_over_sqrt_m", "seed",    "config_hash"};
  const std::string hash = hash_hex(config_hash(config));

  if (config.sample_grid.empty()) throw std::invalid_argument("n_grid: required for compare-cw");
  const long n = config.generator.num_queries;

  double low = std::numeric_limits<double>::infinity();
  double high = 0.0;
  for (long m : config.sample_grid) {
    const ClassSpec spec = spec_from(config, static_cast<int>(m), n);
    BoundInputs inputs = inputs_from(config, spec, n);
    inputs.uniform_bound = 5.0;  // held fixed so only the m-scaling moves

    const BoundReport baseline = chapelle_wu_bound(0.0, inputs, spec);
    const BoundReport lipschitz = lipschitz_generalization_bound(0.0, spec, inputs);
    const double baseline_term = baseline.term("complexity");
    const double lipschitz_term = lipschitz.term("complexity");
    const double ratio = baseline_term / lipschitz_term;
    const double normalized = ratio / std::sqrt(static_cast<double>(m));
    low = std::min(low, normalized);
    high = std::max(high, normalized);
    table.add_row({m, n, baseline_term, lipschitz_term, ratio, normalized,
                   static_cast<long>(config.seed), hash});
  }

  const bool passed = high <= 1.2 * low;
  Json summary = Json::object();
  summary["normalized_ratio_min"] = low;
  summary["normalized_ratio_max"] = high;
  summary["spread"] = high / low;
  Emitter{config, out}.emit(table, summary, passed);
  return passed ? 0 : 1;
}

int run_rademacher_mc(const ExperimentConfig& config, std::ostream& out) {
  Table table;
  table.columns = {"m",        "n",         "trial",      "sigma_draws", "estimate",
                   "std_error", "closed_form", "within_bound", "seed",     "config_hash"};
  const std::string hash = hash_hex(config_hash(config));

  if (config.sample_grid.empty())
    throw std::invalid_argument("n_grid: required for rademacher-mc");

  bool all_within = true;
  for (std::size_t ni = 0; ni < config.sample_grid.size(); ++ni) {
    const long n = config.sample_grid[ni];
    for (int trial = 0; trial < config.trials; ++trial) {
      GeneratorConfig generator = config.generator;
      generator.num_queries = n;
      const Dataset data = generate_synthetic(
          generator, mix_seed(config.seed, stream_tag(1, static_cast<long>(ni), trial)));
      const RademacherEstimate estimate = estimate_empirical_rademacher(
          data, config.ball, config.sigma_draws, config.restarts,
          mix_seed(config.seed, stream_tag(6, static_cast<long>(ni), trial)));

      const ClassSpec spec = spec_from(config, generator.docs_per_query, n);
      const BoundInputs inputs = inputs_from(config, spec, n);
      const double closed = rademacher_closed_form(spec, inputs);
      const bool within = estimate.estimate <= closed + 1e-9;
      all_within = all_within && within;
      table.add_row({static_cast<long>(generator.docs_per_query), n, static_cast<long>(trial),
                     static_cast<long>(estimate.sigma_draws), estimate.estimate,
                     estimate.std_error, closed, within, static_cast<long>(config.seed), hash});
    }
  }

  Emitter{config, out}.emit(table, Json(), all_within);
  return all_within ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& out) {
  validate_config(config);
  if (config.experiment == "certify") return run_certify(config, out);
  if (config.experiment == "train") return run_train(config, out);
  if (config.experiment == "bounds") return run_bounds(config, out);
  if (config.experiment == "gap") return run_gap(config, out);
  if (config.experiment == "rates") return run_rates(config, out);
  if (config.experiment == "compare-cw") return run_compare_cw(config, out);
  if (config.experiment == "rademacher-mc") return run_rademacher_mc(config, out);
  throw std::invalid_argument("experiment: unknown value '" + config.experiment + "'");
}

int run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  if (config.output_path.empty()) return run_experiment(config, std::cout);
  std::ofstream out(config.output_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output path: " + config.output_path);
  return run_experiment(config, out);
}

}  // namespace ranklip
