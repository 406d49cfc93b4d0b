#include "hjbmc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hjbmc/parallel.hpp"

namespace hjbmc {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

RegressionFit fit(const MatrixXd& design, const VectorXd& targets) {
  const Index rows = design.rows();
  const Index cols = design.cols();
  if (cols == 0) throw std::invalid_argument("fit: empty basis");
  if (targets.size() != rows) throw std::invalid_argument("fit: targets and design disagree in length");
  if (rows < cols) {
    throw UnderdeterminedError("fit: " + std::to_string(rows) + " samples for " +
                               std::to_string(cols) + " coefficients");
  }
  if (!design.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("fit: non-finite entries in design or targets");
  }

  VectorXd inv_norm(cols);
  for (Index k = 0; k < cols; ++k) {
    const double n = design.col(k).norm();
    inv_norm(k) = n > 0.0 ? 1.0 / n : 1.0;
  }

  // Blocked QR of the augmented matrix [A | y]: the stacked triangular factors
  // carry Q^T y in their last column and the residual norm in the corner.
  const Index width = cols + 1;
  const std::size_t blocks = block_count(static_cast<std::size_t>(rows));
  MatrixXd stack = MatrixXd::Zero(static_cast<Index>(blocks) * width, width);
  for_each_block(static_cast<std::size_t>(rows), [&](std::size_t b, std::size_t begin, std::size_t end) {
    const Index n = static_cast<Index>(end - begin);
    MatrixXd block(n, width);
    block.leftCols(cols) = design.middleRows(static_cast<Index>(begin), n) * inv_norm.asDiagonal();
    block.col(cols) = targets.segment(static_cast<Index>(begin), n);
    Eigen::HouseholderQR<Eigen::Ref<MatrixXd>> qr(block);
    const Index keep = std::min(n, width);
    stack.block(static_cast<Index>(b) * width, 0, keep, width) =
        block.topRows(keep).triangularView<Eigen::Upper>();
  });
  Eigen::HouseholderQR<Eigen::Ref<MatrixXd>> reduced(stack);
  const MatrixXd r_aug = stack.topRows(width).triangularView<Eigen::Upper>();
  const MatrixXd r = r_aug.topLeftCorner(cols, cols);
  const VectorXd qty = r_aug.col(cols).head(cols);
  const double tail = r_aug(cols, cols);

  Eigen::JacobiSVD<MatrixXd> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(cols - 1);

  RegressionFit out;
  out.condition_estimate = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  VectorXd scaled;
  if (out.condition_estimate <= kConditionLimit) {
    scaled = r.triangularView<Eigen::Upper>().solve(qty);
  } else {
    out.used_fallback = true;
    const VectorXd uty = svd.matrixU().transpose() * qty;
    VectorXd w = VectorXd::Zero(cols);
    for (Index k = 0; k < cols; ++k) {
      if (smax > 0.0 && sv(k) > kSingularCutoff * smax) w(k) = uty(k) / sv(k);
    }
    scaled = svd.matrixV() * w;
  }
  const double rss = (qty - r * scaled).squaredNorm() + tail * tail;
  out.coefficients = inv_norm.asDiagonal() * scaled;
  out.residual_mse = rss / static_cast<double>(rows);
  return out;
}

namespace {

double sum_of_squares(const MatrixXd& features, const VectorXd& scale, const VectorXd& targets,
                      const VectorXd& beta) {
  const VectorXd eta = features * beta;
  double s = 0.0;
  for (Index m = 0; m < eta.size(); ++m) {
    const double e = targets(m) - scale(m) * logistic(eta(m));
    s += e * e;
  }
  return s;
}

}  // namespace

RegressionFit fit_logistic(const MatrixXd& features, const VectorXd& scale, const VectorXd& targets,
                           const VectorXd& warm_start, const LogisticFitOptions& options) {
  const Index rows = features.rows();
  const Index cols = features.cols();
  if (scale.size() != rows || targets.size() != rows) {
    throw std::invalid_argument("fit_logistic: inconsistent lengths");
  }
  if (rows < cols) {
    throw UnderdeterminedError("fit_logistic: " + std::to_string(rows) + " samples for " +
                               std::to_string(cols) + " coefficients");
  }
  if (!features.allFinite() || !targets.allFinite() || !scale.allFinite()) {
    throw std::invalid_argument("fit_logistic: non-finite entries");
  }

  RegressionFit out;
  VectorXd beta;
  if (warm_start.size() == cols && warm_start.allFinite()) {
    beta = warm_start;
  } else {
    VectorXd logit(rows);
    for (Index m = 0; m < rows; ++m) {
      double u = scale(m) != 0.0 ? targets(m) / scale(m) : 0.5;
      u = std::clamp(u, options.clip, 1.0 - options.clip);
      logit(m) = std::log(u / (1.0 - u));
    }
    beta = fit(features, logit).coefficients;
  }

  double sse = sum_of_squares(features, scale, targets, beta);
  MatrixXd jacobian(rows, cols);
  VectorXd residual(rows);
  for (int it = 0; it < options.max_iterations; ++it) {
    const VectorXd eta = features * beta;
    for (Index m = 0; m < rows; ++m) {
      const double p = logistic(eta(m));
      residual(m) = targets(m) - scale(m) * p;
      jacobian.row(m) = (scale(m) * p * (1.0 - p)) * features.row(m);
    }
    const RegressionFit step = fit(jacobian, residual);
    out.condition_estimate = step.condition_estimate;
    out.used_fallback = step.used_fallback;

    bool accepted = false;
    double trial_sse = sse;
    VectorXd trial;
    for (double t = 1.0; t > 1e-6; t *= 0.5) {
      trial = beta + t * step.coefficients;
      trial_sse = sum_of_squares(features, scale, targets, trial);
      if (trial_sse < sse) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const double decrease = (sse - trial_sse) / std::max(sse, std::numeric_limits<double>::min());
    beta = trial;
    sse = trial_sse;
    out.iterations = it + 1;
    if (decrease < options.relative_tolerance) break;
  }
  out.coefficients = beta;
  out.residual_mse = sse / static_cast<double>(rows);
  return out;
}

double evaluate(const RegressionFit& fit, const Basis& basis, double t, ConstVec x, ConstVec a) {
  return basis.predict(ConstVec(fit.coefficients.data(), static_cast<std::size_t>(fit.coefficients.size())),
                       t, x, a);
}

}  // namespace hjbmc
