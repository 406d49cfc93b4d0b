#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hjbmc/basis.hpp"
#include "hjbmc/oracles.hpp"
#include "hjbmc/problem.hpp"

namespace hjbmc {

struct PresetParams {
  double moneyness = 0.0;  // uvm_callspread_corr: S1(0) = 50 + moneyness
};

struct Preset {
  Problem problem;
  Basis basis;
  std::optional<double> reference;     // true value / PDE price
  std::optional<double> reference_bs;  // constant mid-volatility price
  std::vector<std::pair<std::string, double>> published;  // estimates quoted with the benchmark
  std::size_t recommended_steps = 64;
  std::optional<double> recommended_intensity;  // unset: default_intensity(T)
  std::vector<std::string> control_names;
  std::vector<double> mid_control;  // constant control of the mid-volatility comparison
};

const std::vector<std::string>& preset_names();

/// Throws std::invalid_argument for unknown names.
Preset preset_problem(const std::string& name, const PresetParams& params = {});

/// Bases by name, including "neg:"-prefixed negations. Throws for unknown names.
Basis basis_by_name(const std::string& name);

LqParameters paper_lq_parameters();
Problem make_lq_problem(const LqParameters& params);

/// Geometric Brownian motion dS = a S dW with volatility a in `vol_box` and
/// a user payoff; f = 0.
Problem make_gbm_problem(std::string name, double s0, ControlBox vol_box, double horizon,
                         Problem::Terminal payoff, double lip_g);

/// Feedback a = A x + B read off the quadratic LQ basis:
/// A = -beta3 / (2 beta5), B = -beta2 / (2 beta5). Empty when beta5 >= 0.
struct LqFeedback {
  double a = 0.0;
  double b = 0.0;
};
std::optional<LqFeedback> lq_feedback(const Eigen::VectorXd& beta);

}  // namespace hjbmc
