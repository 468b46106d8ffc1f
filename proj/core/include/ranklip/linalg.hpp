#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>

namespace ranklip {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Norm exponents carried symbolically; infinity is a real case, not a
// sentinel float, and dual pairing is exact (1 <-> inf, 2 <-> 2).
enum class NormExponent { L1, L2, LInf };

NormExponent dual_exponent(NormExponent p) noexcept;
const char* norm_name(NormExponent p) noexcept;

// Neumaier-compensated sum; error is O(eps) independent of length.
double neumaier_sum(std::span<const double> values) noexcept;

bool all_finite(const Vector& v) noexcept;
bool all_finite(const Matrix& x) noexcept;

double vector_norm(const Vector& v, NormExponent p);

// log(sum_j exp(v_j)) via max shift; overflow-free for |v_j| <= 700.
double stable_logsumexp(const Vector& v);

// Entries positive, sum to 1 within 1e-12; computed through stable_logsumexp.
Vector softmax(const Vector& v);

// max_j ||X_j||_p over rows; equals the (q -> inf) operator norm for q dual
// to p, which is what the training and bound machinery consumes.
double max_row_norm(const Matrix& x, NormExponent p);

// Randomized search for sup ||Xu||_inf over unit-l_q vectors u, seeded with
// the directed witness built from the dual-norm maximizer of the largest
// row. Never exceeds max_row_norm(x, dual(q)) and reaches it through the
// witness; serves as the independent check of that identity.
double operator_norm_search(const Matrix& x, NormExponent q, long budget,
                            std::uint64_t seed);

}  // namespace ranklip
