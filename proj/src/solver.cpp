#include "hjbmc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hjbmc/parallel.hpp"

namespace hjbmc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr int kGridPoints = 33;
constexpr int kGoldenIterations = 20;
constexpr int kSweeps = 2;
constexpr int kMaxQuadraticSweeps = 200;

ConstVec as_span(const VectorXd& v) { return ConstVec(v.data(), static_cast<std::size_t>(v.size())); }

void maximize_quadratic(const std::function<double()>& objective, const ControlBox& box, MutVec a) {
  // Coordinate ascent: exact in one dimension, repeated until the sweep
  // stops moving when the control couples components.
  const std::size_t q = box.dim();
  const int sweeps = q > 1 ? kMaxQuadraticSweeps : 1;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    double moved = 0.0;
    for (std::size_t k = 0; k < q; ++k) {
      const double before = a[k];
      const double lo = box.lower()[k], hi = box.upper()[k];
      if (hi == lo) {
        a[k] = lo;
        continue;
      }
      const double mid = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
      a[k] = lo;
      const double v0 = objective();
      a[k] = mid;
      const double v1 = objective();
      a[k] = hi;
      const double v2 = objective();
      const double c2 = (v0 - 2.0 * v1 + v2) / (2.0 * h * h);
      const double c1 = (v2 - v0) / (2.0 * h);
      if (c2 < 0.0) {
        a[k] = std::clamp(mid - c1 / (2.0 * c2), lo, hi);
      } else {
        a[k] = v2 > v0 ? hi : lo;
      }
      moved = std::max(moved, std::abs(a[k] - before) / (hi - lo));
    }
    if (moved < 1e-13) break;
  }
}

void maximize_corners(const std::function<double()>& objective, const ControlBox& box, MutVec a) {
  const std::size_t q = box.dim();
  std::size_t best_mask = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << q); ++mask) {
    for (std::size_t k = 0; k < q; ++k) a[k] = (mask >> k) & 1 ? box.upper()[k] : box.lower()[k];
    const double v = objective();
    if (v > best) {
      best = v;
      best_mask = mask;
    }
  }
  for (std::size_t k = 0; k < q; ++k) a[k] = (best_mask >> k) & 1 ? box.upper()[k] : box.lower()[k];
}

void maximize_general(const std::function<double()>& objective, const ControlBox& box, MutVec a) {
  const std::size_t q = box.dim();
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (std::size_t k = 0; k < q; ++k) {
      const double lo = box.lower()[k], hi = box.upper()[k];
      if (hi == lo) {
        a[k] = lo;
        continue;
      }
      const double step = (hi - lo) / (kGridPoints - 1);
      int best_j = 0;
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j < kGridPoints; ++j) {
        a[k] = lo + j * step;
        const double v = objective();
        if (v > best) {
          best = v;
          best_j = j;
        }
      }
      const double grid_best = lo + best_j * step;
      double l = std::max(lo, grid_best - step), r = std::min(hi, grid_best + step);
      auto at = [&](double s) {
        a[k] = s;
        return objective();
      };
      double c = r - inv_phi * (r - l), e = l + inv_phi * (r - l);
      double fc = at(c), fe = at(e);
      for (int it = 0; it < kGoldenIterations; ++it) {
        if (fc >= fe) {
          r = e;
          e = c;
          fe = fc;
          c = r - inv_phi * (r - l);
          fc = at(c);
        } else {
          l = c;
          c = e;
          fc = fe;
          e = l + inv_phi * (r - l);
          fe = at(e);
        }
      }
      const double refined = 0.5 * (l + r);
      a[k] = at(refined) > best ? refined : grid_best;
    }
  }
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments out;
  if (v.empty()) return out;
  for (double e : v) out.mean += e;
  out.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double e : v) ss += (e - out.mean) * (e - out.mean);
  out.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return out;
}

}  // namespace

void argmax_control(ConstVec beta, const Basis& basis, const ControlBox& box, double t, ConstVec x,
                    MutVec a, MutVec scratch) {
  const double scale = basis.prefactor(t, x);
  if (scale == 0.0 || box.is_singleton()) {
    std::copy(box.lower().begin(), box.lower().end(), a.begin());
    return;
  }
  // Both links are increasing, so the sign of the prefactor fixes the direction.
  const double sign = scale > 0.0 ? 1.0 : -1.0;
  const std::function<double()> objective = [&] {
    return sign * basis.inner(beta, t, x, ConstVec(a.data(), a.size()), scratch);
  };
  switch (basis.control_structure) {
    case ControlStructure::linear_in_a:
      maximize_corners(objective, box, a);
      break;
    case ControlStructure::quadratic_in_a: {
      const auto mid = box.midpoint();
      std::copy(mid.begin(), mid.end(), a.begin());
      maximize_quadratic(objective, box, a);
      break;
    }
    case ControlStructure::general: {
      const auto mid = box.midpoint();
      std::copy(mid.begin(), mid.end(), a.begin());
      maximize_general(objective, box, a);
      break;
    }
  }
  box.clamp(a);
}

std::vector<double> argmax_control(ConstVec beta, const Basis& basis, const ControlBox& box,
                                   double t, ConstVec x) {
  std::vector<double> a(box.dim()), scratch(basis.count());
  argmax_control(beta, basis, box, t, x, a, scratch);
  return a;
}

std::vector<double> PolicyTable::control(std::size_t i, ConstVec x) const {
  if (i >= steps.size()) throw std::out_of_range("PolicyTable::control: step out of range");
  return argmax_control(as_span(steps[i].y_coef), basis, controls, grid.knot(i), x);
}

double PolicyTable::surface(std::size_t i, ConstVec x, ConstVec a) const {
  if (i >= steps.size()) throw std::out_of_range("PolicyTable::surface: step out of range");
  return basis.predict(as_span(steps[i].y_coef), grid.knot(i), x, a);
}

double PolicyTable::value(std::size_t i, ConstVec x) const {
  const auto a = control(i, x);
  return truncate_y(surface(i, x, a), truncation);
}

std::vector<double> extract_z(const PolicyTable& policy, std::size_t i, ConstVec x) {
  if (!policy.has_z()) throw NotAvailableError("extract_z: Z regressions were not fitted");
  if (i >= policy.steps.size()) throw std::out_of_range("extract_z: step out of range");
  const double t = policy.grid.knot(i), dt = policy.grid.delta(i);
  const auto a = policy.control(i, x);
  std::vector<double> phi(policy.basis.count());
  policy.basis.features(t, x, a, phi);
  std::vector<double> out;
  for (const auto& coef : policy.steps[i].z_coef) {
    double s = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) s += coef(static_cast<Eigen::Index>(k)) * phi[k];
    out.push_back(s);
  }
  truncate_z(MutVec(out), dt, policy.truncation);
  for (double& v : out) v /= dt;
  return out;
}

BackwardResult backward_solve(const RandomizedPathSet& paths, const Problem& problem,
                              const Basis& basis, const TruncationSpec& truncation,
                              const SolverOptions& options) {
  problem.validate();
  const TimeGrid& grid = paths.grid();
  const std::size_t M = paths.paths();
  const std::size_t N = grid.steps();
  const std::size_t d = problem.dim_x;
  const std::size_t q = problem.dim_a();
  const std::size_t w = problem.dim_w;
  const std::size_t B = basis.count();
  if (paths.dim_x() != d || paths.dim_a() != q || paths.dim_w() != w) {
    throw std::invalid_argument("backward_solve: path set does not match the problem dimensions");
  }
  if (truncation.r_x.size() != d) throw std::invalid_argument("backward_solve: truncation radius has the wrong dimension");
  if (B == 0 || !basis.features) throw std::invalid_argument("backward_solve: empty basis");
  if (M < B) {
    throw UnderdeterminedError("backward_solve: " + std::to_string(M) + " paths for " +
                               std::to_string(B) + " basis functions");
  }
  const bool need_z = problem.reward_depends_on_z || options.force_z;
  if (need_z && !paths.has_increments()) {
    throw std::invalid_argument("backward_solve: Z regressions need recorded Brownian increments");
  }

  BackwardResult res;
  PolicyTable& policy = res.policy;
  policy.problem_name = problem.name;
  policy.basis = basis;
  policy.controls = problem.controls;
  policy.grid = grid;
  policy.truncation = truncation;
  policy.initial_state = problem.initial_state;
  policy.steps.resize(N);
  res.max_abs_y.assign(N + 1, 0.0);
  res.max_abs_dz.assign(N, 0.0);

  const std::size_t blocks = block_count(M);
  std::vector<double> block_max(blocks);
  auto reduce_max = [&] {
    double m = 0.0;
    for (double v : block_max) m = std::max(m, v);
    return m;
  };
  auto require_finite = [](const std::vector<double>& v, std::size_t step, const char* what) {
    for (double e : v) {
      if (!std::isfinite(e)) {
        throw NumericalError("backward_solve: non-finite " + std::string(what) + " at step " +
                             std::to_string(step));
      }
    }
  };

  std::vector<double> y(M);
  for_each_block(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
    double mx = 0.0;
    for (std::size_t m = begin; m < end; ++m) {
      const auto x = truncate_state(paths.state(m, N), truncation);
      y[m] = truncate_y(problem.terminal_reward(x), truncation);
      mx = std::max(mx, std::abs(y[m]));
    }
    block_max[b] = mx;
  });
  require_finite(y, N, "terminal value");
  res.max_abs_y[N] = reduce_max();

  MatrixXd phi(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(B));
  VectorXd scale(static_cast<Eigen::Index>(M));
  VectorXd target(static_cast<Eigen::Index>(M));
  std::vector<double> z(need_z ? M * w : 0, 0.0);
  std::vector<double> u(M);
  VectorXd warm;

  for (std::size_t i = N; i-- > 0;) {
    const double t = grid.knot(i);
    const double dt = grid.delta(i);
    PolicyStep& step = policy.steps[i];

    for_each_block(M, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> scratch(B);
      for (std::size_t m = begin; m < end; ++m) {
        const ConstVec x = paths.state(m, i);
        basis.features(t, x, paths.control(m, i), scratch);
        for (std::size_t k = 0; k < B; ++k) phi(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = scratch[k];
        scale(static_cast<Eigen::Index>(m)) = basis.prefactor(t, x);
      }
    });

    if (need_z) {
      for (std::size_t k = 0; k < w; ++k) {
        for_each_block(M, [&](std::size_t, std::size_t begin, std::size_t end) {
          for (std::size_t m = begin; m < end; ++m) {
            const auto dw = truncate_increment(paths.increment(m, i), dt, truncation);
            target(static_cast<Eigen::Index>(m)) = y[m] * dw[k];
          }
        });
        const RegressionFit zf = fit(phi, target);
        step.z_coef.push_back(zf.coefficients);
        const VectorXd fitted = phi * zf.coefficients;
        const double bound = dt * truncation.c_z(dt);
        double mx = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
          const double v = std::clamp(fitted(static_cast<Eigen::Index>(m)), -bound, bound);
          mx = std::max(mx, std::abs(v));
          z[m * w + k] = v / dt;
        }
        res.max_abs_dz[i] = std::max(res.max_abs_dz[i], mx);
      }
    }

    for_each_block(M, [&](std::size_t, std::size_t begin, std::size_t end) {
      std::vector<double> zero(w, 0.0);
      for (std::size_t m = begin; m < end; ++m) {
        const auto x = truncate_state(paths.state(m, i), truncation);
        const ConstVec zm = need_z ? ConstVec(z).subspan(m * w, w) : ConstVec(zero);
        u[m] = y[m] + problem.running_reward(x, paths.control(m, i), y[m], zm) * dt;
        target(static_cast<Eigen::Index>(m)) = u[m];
      }
    });
    require_finite(u, i, "regression target");

    RegressionFit yf;
    if (basis.link == Link::logistic) {
      yf = fit_logistic(phi, scale, target, warm, options.gauss_newton);
    } else {
      const MatrixXd design = scale.asDiagonal() * phi;
      yf = fit(design, target);
    }
    if (!yf.coefficients.allFinite()) {
      throw NumericalError("backward_solve: non-finite coefficients at step " + std::to_string(i));
    }
    warm = yf.coefficients;
    step.y_coef = yf.coefficients;
    step.residual_mse = yf.residual_mse;
    step.condition_estimate = yf.condition_estimate;
    step.used_fallback = yf.used_fallback;
    step.iterations = yf.iterations;

    const ConstVec beta = as_span(step.y_coef);
    for_each_block(M, [&](std::size_t b, std::size_t begin, std::size_t end) {
      std::vector<double> scratch(B), a(q);
      double mx = 0.0;
      for (std::size_t m = begin; m < end; ++m) {
        const ConstVec x = paths.state(m, i);
        double v;
        if (options.optimize_control) {
          argmax_control(beta, basis, problem.controls, t, x, a, scratch);
          v = basis.predict(beta, t, x, a, scratch);
        } else {
          v = basis.predict(beta, t, x, paths.control(m, i), scratch);
        }
        y[m] = truncate_y(v, truncation);
        mx = std::max(mx, std::abs(y[m]));
      }
      block_max[b] = mx;
    });
    require_finite(y, i, "value");
    res.max_abs_y[i] = reduce_max();
  }

  const Moments mo = moments(y);
  res.p1_path_mean = mo.mean;
  res.p1_path_std = mo.std;
  res.p1 = options.optimize_control ? policy.value(0, problem.initial_state) : mo.mean;
  res.p1_stderr = std::sqrt(policy.steps[0].residual_mse / static_cast<double>(M));
  if (!std::isfinite(res.p1)) throw NumericalError("backward_solve: non-finite estimate at step 0");
  return res;
}

}  // namespace hjbmc
