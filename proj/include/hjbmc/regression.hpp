#pragma once

#include <cstddef>
#include <stdexcept>

#include <Eigen/Dense>

#include "hjbmc/basis.hpp"

namespace hjbmc {

/// Raised when a least-squares problem has fewer rows than unknowns.
class UnderdeterminedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RegressionFit {
  Eigen::VectorXd coefficients;
  double residual_mse = 0.0;
  double condition_estimate = 0.0;  // of the column-equilibrated design
  bool used_fallback = false;       // truncated-SVD solve instead of triangular
  int iterations = 0;               // Gauss-Newton iterations (0 for linear fits)
};

inline constexpr double kConditionLimit = 1e8;
inline constexpr double kSingularCutoff = 1e-10;

/// Minimizes ||design * beta - targets||^2.
///
/// Columns are equilibrated to unit norm, then the design is reduced by a
/// blocked Householder QR (fixed row blocks of kBlockRows, stacked R factors
/// re-factored once), so the result does not depend on the thread count.
/// When the condition estimate of R exceeds kConditionLimit the solve falls
/// back to a truncated SVD of R with relative cutoff kSingularCutoff, which
/// returns the minimum-norm minimizer.
RegressionFit fit(const Eigen::MatrixXd& design, const Eigen::VectorXd& targets);

struct LogisticFitOptions {
  int max_iterations = 30;
  double relative_tolerance = 1e-10;
  double clip = 1e-4;  // targets/scale clipped to [clip, 1 - clip] for the logit seed
};

/// Gauss-Newton fit of targets ~ scale .* logistic(features * beta). Seeded
/// from `warm_start` when non-empty, otherwise from a linear fit of the logit
/// of the clipped normalized targets. Each step solves the linearized problem
/// with fit() and backtracks until the sum of squares decreases.
RegressionFit fit_logistic(const Eigen::MatrixXd& features, const Eigen::VectorXd& scale,
                           const Eigen::VectorXd& targets, const Eigen::VectorXd& warm_start,
                           const LogisticFitOptions& options = {});

/// lambda . p(t, x, a) through the basis' scale and link.
double evaluate(const RegressionFit& fit, const Basis& basis, double t, ConstVec x, ConstVec a);

}  // namespace hjbmc
