#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hjbmc/basis.hpp"
#include "hjbmc/errors.hpp"
#include "hjbmc/randomization.hpp"
#include "hjbmc/regression.hpp"
#include "hjbmc/truncation.hpp"

namespace hjbmc {

/// Fitted regressions of one backward step.
struct PolicyStep {
  Eigen::VectorXd y_coef;
  std::vector<Eigen::VectorXd> z_coef;  // one per Brownian component, empty when not fitted
  double residual_mse = 0.0;
  double condition_estimate = 0.0;
  bool used_fallback = false;
  int iterations = 0;
};

/// Feedback policy a_i(x) = argmax over the box of the step-i fitted surface.
struct PolicyTable {
  std::string problem_name;
  Basis basis;
  ControlBox controls;
  TimeGrid grid;
  TruncationSpec truncation;
  std::vector<double> initial_state;
  std::vector<PolicyStep> steps;  // steps[i] for knot i = 0 .. N-1

  bool has_z() const { return !steps.empty() && !steps.front().z_coef.empty(); }
  ControlStructure strategy() const { return basis.control_structure; }

  std::vector<double> control(std::size_t i, ConstVec x) const;
  /// Fitted value at (t_i, x, a) before the max.
  double surface(std::size_t i, ConstVec x, ConstVec a) const;
  /// Truncated max over the box of the step-i surface.
  double value(std::size_t i, ConstVec x) const;
};

struct SolverOptions {
  bool force_z = false;            // fit Z regressions even if f ignores z
  bool optimize_control = true;    // false: evaluate at a = I_i instead of the max
  LogisticFitOptions gauss_newton;
};

struct BackwardResult {
  double p1 = 0.0;            // truncated max of the time-0 surface at x0
  double p1_path_mean = 0.0;  // sample mean of Y_0 over paths
  double p1_path_std = 0.0;
  double p1_stderr = 0.0;     // sqrt(residual mse of the time-0 fit / M)
  PolicyTable policy;
  std::vector<double> max_abs_y;   // per knot 0..N, post-clamp
  std::vector<double> max_abs_dz;  // per step, max |dt Z| post-clamp (0 when Z not fitted)
};

/// Backward regression scheme on the randomized paths. Throws NumericalError
/// naming the step when a non-finite value appears.
///
/// With optimize_control = false the value at t_0 is averaged over the
/// randomized initial controls, so p1 equals p1_path_mean.
BackwardResult backward_solve(const RandomizedPathSet& paths, const Problem& problem,
                              const Basis& basis, const TruncationSpec& truncation,
                              const SolverOptions& options = {});

/// Maximizer over the box of scale(t, x) * link(beta . phi(t, x, a)).
std::vector<double> argmax_control(ConstVec beta, const Basis& basis, const ControlBox& box,
                                   double t, ConstVec x);
/// Allocation-free variant; `scratch` holds basis.count() entries, `a` box.dim().
void argmax_control(ConstVec beta, const Basis& basis, const ControlBox& box, double t, ConstVec x,
                    MutVec a, MutVec scratch);

/// Z at (t_i, x, a*) from the stored Z regressions.
std::vector<double> extract_z(const PolicyTable& policy, std::size_t i, ConstVec x);

}  // namespace hjbmc
