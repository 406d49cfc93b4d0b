#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "hjbmc/evaluator.hpp"
#include "hjbmc/solver.hpp"

namespace hjbmc {

struct EstimateOptions {
  std::size_t paths = 1 << 16;
  std::size_t steps = 64;
  std::uint64_t seed = 1;
  std::optional<double> intensity;  // unset: default_intensity(T)
  bool truncation = true;
  double r_w = 6.0;
  double state_std_multiple = 6.0;  // R_X = |mean| + k std of X_T
  std::size_t eval_paths = 0;       // 0: same as paths
  bool reuse_paths = false;         // P2 on the solver's Brownian draws
  bool record_increments = false;   // forced on when Z regressions are needed
  SolverOptions solver;
  std::function<void(const RandomizedPathSet&)> inspect_paths;  // called before the backward pass
};

struct EstimateResult {
  EstimateReport report;
  BackwardResult backward;
  PolicyEvaluation evaluation;
  TruncationSpec truncation;
  double intensity = 0.0;
};

/// simulate -> backward_solve -> evaluate_policy -> mid_estimate.
EstimateResult run_estimate(const Problem& problem, const Basis& basis, const EstimateOptions& options,
                            std::optional<double> reference = std::nullopt);

}  // namespace hjbmc
