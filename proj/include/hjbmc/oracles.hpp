#pragma once

#include <vector>

#include "hjbmc/problem.hpp"

namespace hjbmc {

/// Linear-quadratic benchmark
///   dX = (-mu0 X + mu1 a) dt + (sigma0 + sigma1 a) dW,  X_0 = 0,
///   reward -lambda0 a^2 dt, terminal -lambda1 X_T^2.
struct LqParameters {
  double lambda0 = 20.0;
  double lambda1 = 200.0;
  double mu0 = 0.02;
  double mu1 = 0.5;
  double sigma0 = 0.2;
  double sigma1 = 0.1;
  double horizon = 2.0;
};

/// Value v(t, x) = -P(t) x^2 / 2 - Q(t) x - R(t) and optimal feedback
/// a*(t, x) = A(t) x + B(t), tabulated on the knots of `grid`.
struct RiccatiSolution {
  TimeGrid grid;
  std::vector<double> p;
  std::vector<double> q_fn;
  std::vector<double> r;
  std::vector<double> a_coef;
  std::vector<double> b_coef;
  int substeps = 0;  // RK4 substeps per grid interval after refinement
};

/// Backward RK4 from T to 0, doubling the substeps per interval until the
/// values at t = 0 change by less than 1e-10 relative.
RiccatiSolution solve_lq_riccati(const LqParameters& params, const TimeGrid& grid);

/// Analytic value at a knot of the solution's grid; throws otherwise.
double lq_value(const LqParameters& params, const RiccatiSolution& riccati, double t, double x);

double normal_cdf(double x);

/// Black-Scholes call with zero rates.
double bs_call(double s, double k, double sigma, double maturity);

/// Price of (S2 - k S1)^+ for two lognormal martingales with correlation rho.
double margrabe_spread(double s1, double s2, double k_ratio, double sigma1, double sigma2,
                       double rho, double maturity);

/// 100 * P(S_T >= k) under zero-rate Black-Scholes.
double digital_bs(double s, double k, double sigma, double maturity);

}  // namespace hjbmc
