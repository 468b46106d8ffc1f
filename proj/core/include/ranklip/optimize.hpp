#pragma once

#include <cstdint>
#include <vector>

#include "ranklip/data.hpp"
#include "ranklip/function_class.hpp"
#include "ranklip/linalg.hpp"
#include "ranklip/loss.hpp"

namespace ranklip {

enum class StepSchedule { Fixed, SmoothOptimal };

struct OgdConfig {
  StepSchedule schedule = StepSchedule::Fixed;
  double eta = 0.1;  // Fixed schedule step size (>= 0; 0 degenerates to no movement)
  // SmoothOptimal schedule inputs: smoothness in weight space is
  // row_bound^2 times the score-space smoothness constant.
  double smoothness = 0.0;
  double optimistic_risk = 0.0;  // plug-in for the best achievable risk
  int passes = 1;
  bool shuffle = false;  // reshuffle instance order per pass
  std::uint64_t seed = 0;
};

struct TrainResult {
  Vector averaged_weights;  // mean of the iterates the losses were charged at
  Vector final_weights;
  std::vector<double> per_step_losses;
  // sum of per-step losses minus the same steps re-charged at the average
  double cumulative_regret_proxy = 0.0;
};

struct ErmResult {
  Vector weights;
  bool converged = false;
  int iterations = 0;
  double final_risk = 0.0;
  double projected_gradient_norm = 0.0;
};

// Radial scaling onto the l2 ball; identity inside.
Vector project_l2(const Vector& w, double radius);

// Euclidean projection onto the l1 ball by sort-and-threshold on |w|
// (simplex-projection reduction), O(d log d); exact identity inside.
Vector project_l1(const Vector& w, double radius);

Vector project_onto_ball(const Vector& w, const BallConstraint& ball);

// Step size minimizing the smooth-case risk bound:
//   W / (4 H W + 2 sqrt(4 H^2 W^2 + 2 H L* T)).
double smooth_eta(double weight_radius, double smoothness, double optimistic_risk, long steps);

Vector online_to_batch_average(const std::vector<Vector>& trajectory);

// Projected online gradient descent from w = 0: one gradient step and
// projection per instance per pass; the loss is recorded before each
// update and the returned average is over the charged iterates.
TrainResult ogd_train(const Dataset& data, const BallConstraint& ball, const OgdConfig& config,
                      const ScoreLoss& loss);

// Projected full-batch gradient descent with backtracking line search;
// stops when the unit-step projected-gradient norm falls below tolerance.
// Non-convergence is reported in the result, best iterate still returned.
ErmResult erm_train(const Dataset& data, const BallConstraint& ball, double tolerance,
                    int max_iters, const ScoreLoss& loss);

}  // namespace ranklip
