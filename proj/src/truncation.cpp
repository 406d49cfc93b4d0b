#include "hjbmc/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hjbmc {

namespace {

constexpr std::size_t kGridPoints = 1024;

double clamp_sym(double v, double r) { return std::clamp(v, -r, r); }

}  // namespace

double TruncationSpec::c_z(double dt) const { return c_z_scale / std::sqrt(dt); }

TruncationSpec TruncationSpec::disabled(std::size_t dim_x) {
  TruncationSpec s;
  s.r_x.assign(dim_x, std::numeric_limits<double>::infinity());
  return s;
}

double terminal_bound(const Problem& problem, const std::vector<double>& r_x) {
  if (problem.terminal_bound) return *problem.terminal_bound;
  const std::size_t d = r_x.size();
  if (d == 0 || d > 2) {
    throw std::invalid_argument("terminal_bound: supply Problem::terminal_bound when dim_x > 2");
  }
  for (double r : r_x) {
    if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
  }
  auto coord = [&](std::size_t k, std::size_t j) {
    return -r_x[k] + 2.0 * r_x[k] * static_cast<double>(j) / static_cast<double>(kGridPoints - 1);
  };
  double best = 0.0;
  std::vector<double> x(d);
  if (d == 1) {
    for (std::size_t j = 0; j < kGridPoints; ++j) {
      x[0] = coord(0, j);
      best = std::max(best, std::abs(problem.terminal_reward(x)));
    }
  } else {
    for (std::size_t j = 0; j < kGridPoints; ++j) {
      x[0] = coord(0, j);
      for (std::size_t l = 0; l < kGridPoints; ++l) {
        x[1] = coord(1, l);
        best = std::max(best, std::abs(problem.terminal_reward(x)));
      }
    }
  }
  // corners (already on the grid, but cheap and exact)
  for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
    for (std::size_t k = 0; k < d; ++k) x[k] = (mask >> k) & 1 ? r_x[k] : -r_x[k];
    best = std::max(best, std::abs(problem.terminal_reward(x)));
  }
  return best;
}

double lemma_constant(double lip_f, std::size_t q, double mesh) {
  const double qd = static_cast<double>(q);
  return 3.0 * lip_f * lip_f * (qd + mesh) + 1.0 / qd;
}

TruncationSpec compute_bounds(const Problem& problem, const TimeGrid& grid,
                              const std::vector<double>& r_x, double r_w) {
  if (r_x.size() != problem.dim_x) {
    throw std::invalid_argument("compute_bounds: r_x has the wrong dimension");
  }
  for (double r : r_x) {
    if (!(r >= 0.0)) throw std::invalid_argument("compute_bounds: negative state radius");
  }
  if (!(r_w >= 0.0)) throw std::invalid_argument("compute_bounds: negative increment radius");
  if (problem.lip_f < 0.0) throw std::invalid_argument("compute_bounds: negative Lipschitz constant");

  TruncationSpec spec;
  spec.r_x = r_x;
  spec.r_w = r_w;
  const std::size_t q = problem.dim_w;
  const double mesh = grid.mesh();
  const double horizon = grid.horizon();
  const double c = lemma_constant(problem.lip_f, q, mesh);
  const double c_g = terminal_bound(problem, r_x);

  double norm_rx = 0.0;
  for (double r : r_x) norm_rx += r * r;
  norm_rx = std::sqrt(norm_rx);

  if (problem.lip_f == 0.0) {
    spec.c_y = std::exp(c * horizon / 2.0) * c_g;
  } else {
    const double c_f = problem.lip_f * (norm_rx + problem.controls.bound()) + std::abs(problem.f_at_origin);
    const double lf2 = problem.lip_f * problem.lip_f;
    spec.c_y = std::exp(c * horizon / 2.0) * std::sqrt(c_g * c_g + std::exp(c * mesh) / lf2 * c_f * c_f);
  }
  if (std::isnan(spec.c_y)) spec.c_y = std::numeric_limits<double>::infinity();
  spec.c_z_scale = std::sqrt(static_cast<double>(q)) * spec.c_y;
  return spec;
}

double gaussian_tail(double r) {
  if (r < 0.0) throw std::invalid_argument("gaussian_tail: negative radius");
  const double upper = 0.5 * std::erfc(r / std::numbers::sqrt2);
  const double density = std::exp(-0.5 * r * r) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
  // 2 R^2 P(N>R) - 4 R E[N 1{N>R}] + 2 E[N^2 1{N>R}]
  return 2.0 * (r * r + 1.0) * upper - 2.0 * r * density;
}

double gaussian_tail_bound(double r) {
  return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * r * r) / r;
}

void truncate_state(MutVec x, const TruncationSpec& spec) {
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = clamp_sym(x[k], spec.r_x[k]);
}

std::vector<double> truncate_state(ConstVec x, const TruncationSpec& spec) {
  std::vector<double> out(x.begin(), x.end());
  truncate_state(MutVec(out), spec);
  return out;
}

void truncate_increment(MutVec dw, double dt, const TruncationSpec& spec) {
  if (std::isinf(spec.r_w)) return;
  const double r = spec.r_w * std::sqrt(dt);
  for (double& v : dw) v = clamp_sym(v, r);
}

std::vector<double> truncate_increment(ConstVec dw, double dt, const TruncationSpec& spec) {
  std::vector<double> out(dw.begin(), dw.end());
  truncate_increment(MutVec(out), dt, spec);
  return out;
}

double truncate_y(double v, const TruncationSpec& spec) { return clamp_sym(v, spec.c_y); }

void truncate_z(MutVec v, double dt, const TruncationSpec& spec) {
  const double r = dt * spec.c_z(dt);
  if (std::isnan(r)) return;
  for (double& e : v) e = clamp_sym(e, r);
}

std::vector<double> truncate_z(ConstVec v, double dt, const TruncationSpec& spec) {
  std::vector<double> out(v.begin(), v.end());
  truncate_z(MutVec(out), dt, spec);
  return out;
}

}  // namespace hjbmc
