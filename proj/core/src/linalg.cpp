#include "ranklip/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ranklip/rng.hpp"

namespace ranklip {

NormExponent dual_exponent(NormExponent p) noexcept {
  switch (p) {
    case NormExponent::L1:
      return NormExponent::LInf;
    case NormExponent::L2:
      return NormExponent::L2;
    case NormExponent::LInf:
      return NormExponent::L1;
  }
  return NormExponent::L2;
}

const char* norm_name(NormExponent p) noexcept {
  switch (p) {
    case NormExponent::L1:
      return "l1";
    case NormExponent::L2:
      return "l2";
    case NormExponent::LInf:
      return "linf";
  }
  return "?";
}

double neumaier_sum(std::span<const double> values) noexcept {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

bool all_finite(const Vector& v) noexcept { return v.allFinite(); }
bool all_finite(const Matrix& x) noexcept { return x.allFinite(); }

double vector_norm(const Vector& v, NormExponent p) {
  switch (p) {
    case NormExponent::L1: {
      double sum = 0.0, comp = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        const double t = sum + a;
        comp += (sum >= a) ? (sum - t) + a : (a - t) + sum;
        sum = t;
      }
      return sum + comp;
    }
    case NormExponent::L2: {
      double sum = 0.0, comp = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = v[i] * v[i];
        const double t = sum + a;
        comp += (sum >= a) ? (sum - t) + a : (a - t) + sum;
        sum = t;
      }
      return std::sqrt(sum + comp);
    }
    case NormExponent::LInf: {
      double best = 0.0;
      for (Eigen::Index i = 0; i < v.size(); ++i) best = std::max(best, std::abs(v[i]));
      return best;
    }
  }
  return 0.0;
}

double stable_logsumexp(const Vector& v) {
  if (v.size() == 0) throw std::invalid_argument("stable_logsumexp: empty vector");
  if (!v.allFinite()) throw std::invalid_argument("stable_logsumexp: non-finite entry");
  const double shift = v.maxCoeff();
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double e = std::exp(v[i] - shift);
    const double t = sum + e;
    comp += (sum >= e) ? (sum - t) + e : (e - t) + sum;
    sum = t;
  }
  return shift + std::log(sum + comp);
}

Vector softmax(const Vector& v) {
  const double lse = stable_logsumexp(v);
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = std::exp(v[i] - lse);
  return out;
}

double max_row_norm(const Matrix& x, NormExponent p) {
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("max_row_norm: empty matrix");
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    best = std::max(best, vector_norm(x.row(j).transpose(), p));
  }
  return best;
}

namespace {

double inf_norm_of_product(const Matrix& x, const Vector& u) {
  double best = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    best = std::max(best, std::abs(x.row(j).dot(u)));
  }
  return best;
}

// Unit-l_q direction used for the random probes. The l_inf ball is sampled
// at its sign corners since those are its extreme points.
Vector random_unit(Rng& rng, Eigen::Index dim, NormExponent q) {
  Vector u(dim);
  while (true) {
    if (q == NormExponent::LInf) {
      for (Eigen::Index k = 0; k < dim; ++k) u[k] = static_cast<double>(rng.sign());
      return u;
    }
    for (Eigen::Index k = 0; k < dim; ++k) u[k] = rng.gaussian();
    const double norm = vector_norm(u, q);
    if (norm > 1e-300) return u / norm;
  }
}

// u* attaining |<X_{j*}, u*>| = ||X_{j*}||_p over the unit l_q ball.
Vector directed_witness(const Matrix& x, NormExponent q) {
  const NormExponent p = dual_exponent(q);
  Eigen::Index best_row = 0;
  double best_norm = -1.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const double norm = vector_norm(x.row(j).transpose(), p);
    if (norm > best_norm) {
      best_norm = norm;
      best_row = j;
    }
  }
  const Vector row = x.row(best_row).transpose();
  Vector u = Vector::Zero(x.cols());
  switch (q) {
    case NormExponent::L2: {
      const double norm = vector_norm(row, NormExponent::L2);
      if (norm > 0.0) u = row / norm;
      else u[0] = 1.0;
      break;
    }
    case NormExponent::L1: {
      Eigen::Index best_col = 0;
      for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (std::abs(row[k]) > std::abs(row[best_col])) best_col = k;
      }
      u[best_col] = row[best_col] >= 0.0 ? 1.0 : -1.0;
      break;
    }
    case NormExponent::LInf: {
      for (Eigen::Index k = 0; k < row.size(); ++k) u[k] = row[k] >= 0.0 ? 1.0 : -1.0;
      break;
    }
  }
  return u;
}

}  // namespace

double operator_norm_search(const Matrix& x, NormExponent q, long budget,
                            std::uint64_t seed) {
  if (x.rows() == 0 || x.cols() == 0) throw std::invalid_argument("operator_norm_search: empty matrix");
  if (budget < 1) throw std::invalid_argument("operator_norm_search: budget must be >= 1");

  double best = inf_norm_of_product(x, directed_witness(x, q));
  Rng rng(mix_seed(seed, 0));
  for (long i = 0; i < budget; ++i) {
    best = std::max(best, inf_norm_of_product(x, random_unit(rng, x.cols(), q)));
  }
  return best;
}

}  // namespace ranklip
