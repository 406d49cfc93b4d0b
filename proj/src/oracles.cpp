#include "hjbmc/oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hjbmc {

namespace {

using State = std::array<double, 3>;  // P, Q, R

State riccati_rhs(const LqParameters& c, const State& s) {
  const double p = s[0], q = s[1];
  const double d = 2.0 * c.lambda0 + c.sigma1 * c.sigma1 * p;
  const double lin = c.mu1 * q + p * c.sigma0 * c.sigma1;
  return {2.0 * c.mu0 * p + c.mu1 * c.mu1 * p * p / d,
          (c.mu0 + c.mu1 * c.mu1 * p / d) * q + c.sigma0 * c.sigma1 * c.mu1 * p * p / d,
          lin * lin / (2.0 * d) - 0.5 * c.sigma0 * c.sigma0 * p};
}

State rk4_step(const LqParameters& c, const State& s, double h) {
  auto axpy = [](const State& a, double w, const State& b) {
    return State{a[0] + w * b[0], a[1] + w * b[1], a[2] + w * b[2]};
  };
  const State k1 = riccati_rhs(c, s);
  const State k2 = riccati_rhs(c, axpy(s, h / 2.0, k1));
  const State k3 = riccati_rhs(c, axpy(s, h / 2.0, k2));
  const State k4 = riccati_rhs(c, axpy(s, h, k3));
  State out;
  for (int j = 0; j < 3; ++j) out[j] = s[j] + h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return out;
}

std::vector<State> integrate(const LqParameters& c, const TimeGrid& grid, int substeps) {
  const std::size_t n = grid.steps();
  std::vector<State> out(n + 1);
  out[n] = {2.0 * c.lambda1, 0.0, 0.0};
  for (std::size_t i = n; i-- > 0;) {
    const double h = -grid.delta(i) / substeps;
    State s = out[i + 1];
    for (int k = 0; k < substeps; ++k) s = rk4_step(c, s, h);
    out[i] = s;
  }
  return out;
}

bool close(const State& a, const State& b) {
  for (int j = 0; j < 3; ++j) {
    if (std::abs(a[j] - b[j]) > 1e-10 * std::max(1.0, std::abs(b[j]))) return false;
  }
  return true;
}

}  // namespace

RiccatiSolution solve_lq_riccati(const LqParameters& params, const TimeGrid& grid) {
  if (!(params.lambda0 > 0.0)) throw std::invalid_argument("solve_lq_riccati: lambda0 must be positive");
  if (params.lambda1 < 0.0) throw std::invalid_argument("solve_lq_riccati: lambda1 must be non-negative");
  if (grid.steps() == 0) throw std::invalid_argument("solve_lq_riccati: empty grid");
  if (std::abs(grid.horizon() - params.horizon) > 1e-12 * params.horizon) {
    throw std::invalid_argument("solve_lq_riccati: grid does not end at the horizon");
  }
  int substeps = 8;
  std::vector<State> coarse = integrate(params, grid, substeps);
  std::vector<State> fine = integrate(params, grid, 2 * substeps);
  while (!close(coarse[0], fine[0]) && substeps < (1 << 16)) {
    substeps *= 2;
    coarse = std::move(fine);
    fine = integrate(params, grid, 2 * substeps);
  }

  RiccatiSolution out;
  out.grid = grid;
  out.substeps = 2 * substeps;
  const std::size_t n = grid.steps();
  for (std::size_t i = 0; i <= n; ++i) {
    const double p = fine[i][0], q = fine[i][1];
    const double d = 2.0 * params.lambda0 + params.sigma1 * params.sigma1 * p;
    out.p.push_back(p);
    out.q_fn.push_back(q);
    out.r.push_back(fine[i][2]);
    out.a_coef.push_back(-params.mu1 * p / d);
    out.b_coef.push_back(-(params.mu1 * q + p * params.sigma0 * params.sigma1) / d);
  }
  return out;
}

double lq_value(const LqParameters&, const RiccatiSolution& riccati, double t, double x) {
  const auto i = riccati.grid.find_knot(t);
  if (!i) throw std::invalid_argument("lq_value: t is not a knot of the Riccati grid");
  return -0.5 * riccati.p[*i] * x * x - riccati.q_fn[*i] * x - riccati.r[*i];
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double bs_call(double s, double k, double sigma, double maturity) {
  if (!(sigma > 0.0) || !(maturity > 0.0)) throw std::invalid_argument("bs_call: sigma and T must be positive");
  if (k <= 0.0) return s;
  const double v = sigma * std::sqrt(maturity);
  const double d1 = (std::log(s / k) + 0.5 * v * v) / v;
  return s * normal_cdf(d1) - k * normal_cdf(d1 - v);
}

double margrabe_spread(double s1, double s2, double k_ratio, double sigma1, double sigma2,
                       double rho, double maturity) {
  if (!(maturity > 0.0)) throw std::invalid_argument("margrabe_spread: T must be positive");
  const double var = sigma1 * sigma1 + sigma2 * sigma2 - 2.0 * rho * sigma1 * sigma2;
  const double k1 = k_ratio * s1;
  if (var <= 0.0) return std::max(s2 - k1, 0.0);
  if (k1 <= 0.0) return s2 - k1;
  const double v = std::sqrt(var * maturity);
  const double d1 = (std::log(s2 / k1) + 0.5 * v * v) / v;
  return s2 * normal_cdf(d1) - k1 * normal_cdf(d1 - v);
}

double digital_bs(double s, double k, double sigma, double maturity) {
  if (!(sigma > 0.0) || !(maturity > 0.0)) throw std::invalid_argument("digital_bs: sigma and T must be positive");
  if (k <= 0.0) return 100.0;
  const double v = sigma * std::sqrt(maturity);
  const double d2 = (std::log(s / k) - 0.5 * v * v) / v;
  return 100.0 * normal_cdf(d2);
}

}  // namespace hjbmc
