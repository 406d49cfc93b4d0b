#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hjbmc/rng.hpp"
#include "hjbmc/solver.hpp"

namespace hjbmc {

struct PolicyEvaluation {
  double value = 0.0;
  double std_error = 0.0;
  // Share of (path, step) decisions at the upper / lower box edge, per control.
  std::vector<double> upper_fraction;
  std::vector<double> lower_fraction;
};

/// Re-simulates `paths` trajectories under the feedback policy and averages
///   sum_i f(X_{i+1}, a_i, 0, 0) dt_i + g(X_N).
/// Brownian draws follow the same substream layout as simulate_forward, so
/// a policy on a singleton box reproduces evaluate_fixed_control exactly.
PolicyEvaluation evaluate_policy(const Problem& problem, const PolicyTable& policy,
                                 const TimeGrid& grid, std::size_t paths, const RngPolicy& rng);

/// Plain Monte Carlo under the constant control `a` (must lie in the box).
PolicyEvaluation evaluate_fixed_control(const Problem& problem, ConstVec a, const TimeGrid& grid,
                                        std::size_t paths, const RngPolicy& rng);

double mid_estimate(double p1, double p2);

struct EstimateReport {
  std::string problem;
  std::string basis;
  std::size_t paths = 0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;
  double p1 = 0.0;
  double p1_stderr = 0.0;
  double p2 = 0.0;
  double p2_stderr = 0.0;
  double mid = 0.0;
  std::optional<double> runtime_s;
  std::optional<double> ref_value;
};

const char* csv_header();
/// One CSV line (no newline). Empty runtime_s / ref_value fields when unset.
std::string to_csv_row(const EstimateReport& report);

}  // namespace hjbmc
