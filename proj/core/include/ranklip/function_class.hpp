#pragma once

namespace ranklip {

// The two linear scoring classes: weights in an l2 ball scored against
// l2-row-bounded inputs, or weights in an l1 ball against l_inf-row-bounded
// inputs. The pairing of weight ball and row bound is fixed by duality.
enum class NormFamily { L2, L1 };

struct BallConstraint {
  NormFamily family = NormFamily::L2;
  double radius = 1.0;
};

struct ClassSpec {
  NormFamily family = NormFamily::L2;
  double weight_radius = 1.0;   // W: l2 or l1 radius of the weight ball
  double row_norm_bound = 1.0;  // R: per-row l2 (L2 family) or l_inf (L1 family) bound
  int feature_dim = 1;          // d
  int docs_per_query = 1;       // m

  BallConstraint ball() const { return {family, weight_radius}; }
};

}  // namespace ranklip
