#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "hjbmc/problem.hpp"

namespace hjbmc {

/// Localization radii and the a.s. bounds on the backward values.
struct TruncationSpec {
  std::vector<double> r_x;  // state clamp per component
  double r_w = std::numeric_limits<double>::infinity();  // increments clamped to +-r_w sqrt(dt)
  double c_y = std::numeric_limits<double>::infinity();
  double c_z_scale = std::numeric_limits<double>::infinity();  // C_z = c_z_scale / sqrt(dt)

  double c_z(double dt) const;

  /// Every clamp inactive.
  static TruncationSpec disabled(std::size_t dim_x);
};

/// C_g(R_X): max of |g| over the box [-r_x, r_x]. Uses the problem's
/// terminal_bound when given; otherwise a 1024-point per-dimension grid plus
/// the corners for d <= 2 (throws for larger d).
double terminal_bound(const Problem& problem, const std::vector<double>& r_x);

/// Constant C = 3 L_f^2 (q + |pi|) + 1/q.
double lemma_constant(double lip_f, std::size_t q, double mesh);

/// Bounds for the backward scheme of `problem` on `grid`. With L_f = 0 the
/// degenerate form C_y = exp(C T / 2) C_g is used.
TruncationSpec compute_bounds(const Problem& problem, const TimeGrid& grid,
                              const std::vector<double>& r_x, double r_w = 6.0);

/// E[(N - clamp(N, -r, r))^2] for standard normal N.
double gaussian_tail(double r);
/// sqrt(2/pi) exp(-r^2/2) / r, valid for r > 0.
double gaussian_tail_bound(double r);

void truncate_state(MutVec x, const TruncationSpec& spec);
std::vector<double> truncate_state(ConstVec x, const TruncationSpec& spec);
void truncate_increment(MutVec dw, double dt, const TruncationSpec& spec);
std::vector<double> truncate_increment(ConstVec dw, double dt, const TruncationSpec& spec);
double truncate_y(double v, const TruncationSpec& spec);
/// Clamps a regression output of dt * Z to +-dt * C_z componentwise.
void truncate_z(MutVec v, double dt, const TruncationSpec& spec);
std::vector<double> truncate_z(ConstVec v, double dt, const TruncationSpec& spec);

}  // namespace hjbmc
