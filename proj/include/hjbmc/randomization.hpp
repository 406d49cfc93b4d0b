#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hjbmc/problem.hpp"
#include "hjbmc/rng.hpp"

namespace hjbmc {

/// Knot samples of the pure-jump randomized control I on every path.
/// Values are stored knot-major: value index ((i * paths) + m) * dim + k.
struct ControlPaths {
  TimeGrid grid;
  std::size_t paths = 0;
  std::size_t dim = 0;
  double intensity = 0.0;
  std::vector<double> values;
  std::vector<std::uint32_t> jump_counts;  // jumps on [0, T] per path
  std::vector<double> marks_sum;           // sum of jump marks, per path and component

  ConstVec at(std::size_t m, std::size_t i) const {
    return ConstVec(values).subspan((i * paths + m) * dim, dim);
  }
};

/// Forward trajectories of the pair (X, I) plus the Brownian increments
/// consumed by the Euler scheme. Same knot-major layout as ControlPaths.
class RandomizedPathSet {
 public:
  RandomizedPathSet() = default;

  const TimeGrid& grid() const { return grid_; }
  std::size_t paths() const { return paths_; }
  std::size_t dim_x() const { return dim_x_; }
  std::size_t dim_a() const { return controls_.dim; }
  std::size_t dim_w() const { return dim_w_; }
  std::uint64_t seed() const { return seed_; }
  double intensity() const { return controls_.intensity; }
  bool has_increments() const { return !dw_.empty(); }

  ConstVec state(std::size_t m, std::size_t i) const {
    return ConstVec(x_).subspan((i * paths_ + m) * dim_x_, dim_x_);
  }
  ConstVec control(std::size_t m, std::size_t i) const { return controls_.at(m, i); }
  /// Increment W(t_{i+1}) - W(t_i); requires has_increments().
  ConstVec increment(std::size_t m, std::size_t i) const {
    return ConstVec(dw_).subspan((i * paths_ + m) * dim_w_, dim_w_);
  }
  const ControlPaths& controls() const { return controls_; }

 private:
  friend RandomizedPathSet simulate_forward(const Problem&, ControlPaths, const TimeGrid&,
                                            const RngPolicy&, bool);

  TimeGrid grid_;
  std::size_t paths_ = 0;
  std::size_t dim_x_ = 0;
  std::size_t dim_w_ = 0;
  std::uint64_t seed_ = 0;
  ControlPaths controls_;
  std::vector<double> x_;
  std::vector<double> dw_;
};

/// Default total jump intensity of the randomization: 2 / T.
double default_intensity(double horizon);

/// Marked point process with Exponential(intensity) inter-jump times and
/// marks uniform on the problem's randomization box; I_0 is uniform too.
ControlPaths simulate_control(const Problem& problem, const TimeGrid& grid, std::size_t paths,
                              const RngPolicy& rng, double intensity);

/// Euler scheme X_{i+1} = X_i + b(X_i, I_i) dt + sigma(X_i, I_i) dW_i.
RandomizedPathSet simulate_forward(const Problem& problem, ControlPaths controls,
                                   const TimeGrid& grid, const RngPolicy& rng,
                                   bool record_increments = true);

/// Per-component |mean| + n_std * std of X at the terminal knot.
std::vector<double> terminal_state_radius(const RandomizedPathSet& paths, double n_std = 6.0);

/// Columnar text dump: one row per (path, knot) with m, t, x..., i..., dw...
/// (dw columns are empty on the terminal knot).
void write_paths(std::ostream& out, const RandomizedPathSet& paths, std::size_t max_paths);

}  // namespace hjbmc
