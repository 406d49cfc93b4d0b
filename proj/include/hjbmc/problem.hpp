#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hjbmc {

using ConstVec = std::span<const double>;
using MutVec = std::span<double>;

/// Compact box A = [lower, upper] of admissible control values, componentwise.
class ControlBox {
 public:
  ControlBox() = default;
  ControlBox(std::vector<double> lower, std::vector<double> upper);

  static ControlBox point(std::vector<double> value);

  std::size_t dim() const { return lower_.size(); }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  ConstVec lower_span() const { return lower_; }
  ConstVec upper_span() const { return upper_; }

  /// max over the box of the euclidean norm |a|.
  double bound() const;
  bool contains(ConstVec a, double tol = 0.0) const;
  bool is_singleton() const;
  void clamp(MutVec a) const;
  std::vector<double> clamped(ConstVec a) const;
  std::vector<double> midpoint() const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

/// Deterministic grid 0 = t_0 < ... < t_N = T.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> knots);

  std::size_t steps() const { return knots_.empty() ? 0 : knots_.size() - 1; }
  double horizon() const { return knots_.back(); }
  double knot(std::size_t i) const { return knots_[i]; }
  double delta(std::size_t i) const { return knots_[i + 1] - knots_[i]; }
  double mesh() const { return mesh_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Index of the knot equal to t (within 1e-12 * T), or nullopt.
  std::optional<std::size_t> find_knot(double t) const;

  bool operator==(const TimeGrid& other) const { return knots_ == other.knots_; }

 private:
  std::vector<double> knots_;
  double mesh_ = 0.0;
};

TimeGrid make_uniform_grid(double horizon, std::size_t steps);

/// Stochastic control problem
///   sup_alpha E[ int_0^T f(X, alpha) ds + g(X_T) ],
///   dX = b(X, alpha) dt + sigma(X, alpha) dW,
/// with alpha valued in the control box. The reward f may additionally
/// depend on (y, z) for the general constrained-BSDE driver.
struct Problem {
  using VectorField = std::function<void(ConstVec x, ConstVec a, MutVec out)>;
  using Driver = std::function<double(ConstVec x, ConstVec a, double y, ConstVec z)>;
  using Terminal = std::function<double(ConstVec x)>;

  std::string name;
  std::size_t dim_x = 1;
  std::size_t dim_w = 1;
  std::vector<double> initial_state;

  VectorField drift;      // out has dim_x entries
  VectorField diffusion;  // out is row-major dim_x x dim_w
  Driver running_reward;
  Terminal terminal_reward;

  double horizon = 1.0;
  ControlBox controls;

  // Support of the uniform mark distribution of the randomized control.
  // Defaults to `controls` when unset.
  std::optional<ControlBox> mark_box;

  double lip_f = 0.0;
  double lip_g = 0.0;
  double f_at_origin = 0.0;  // |f(0,0,0,0)|

  bool reward_depends_on_z = false;
  // Upper bound of |g| on the truncation box; required when dim_x > 2.
  std::optional<double> terminal_bound;

  std::size_t dim_a() const { return controls.dim(); }
  const ControlBox& randomization_box() const { return mark_box ? *mark_box : controls; }

  /// Throws std::invalid_argument when the problem is ill-formed.
  void validate() const;
};

/// Problem with f and g negated; sup of the negated problem is minus the inf
/// of the original one.
Problem negated(const Problem& problem);

}  // namespace hjbmc
