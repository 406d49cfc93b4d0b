#include "hjbmc/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjbmc {

ControlBox::ControlBox(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw std::invalid_argument("ControlBox: lower and upper have different lengths");
  }
  if (lower_.empty()) {
    throw std::invalid_argument("ControlBox: empty box");
  }
  for (std::size_t k = 0; k < lower_.size(); ++k) {
    if (!std::isfinite(lower_[k]) || !std::isfinite(upper_[k])) {
      throw std::invalid_argument("ControlBox: bounds must be finite");
    }
    if (lower_[k] > upper_[k]) {
      throw std::invalid_argument("ControlBox: lower > upper in component " + std::to_string(k));
    }
  }
}

ControlBox ControlBox::point(std::vector<double> value) { return ControlBox(value, value); }

double ControlBox::bound() const {
  double s = 0.0;
  for (std::size_t k = 0; k < dim(); ++k) {
    const double m = std::max(std::abs(lower_[k]), std::abs(upper_[k]));
    s += m * m;
  }
  return std::sqrt(s);
}

bool ControlBox::contains(ConstVec a, double tol) const {
  if (a.size() != dim()) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (a[k] < lower_[k] - tol || a[k] > upper_[k] + tol) return false;
  }
  return true;
}

bool ControlBox::is_singleton() const { return lower_ == upper_; }

void ControlBox::clamp(MutVec a) const {
  for (std::size_t k = 0; k < dim(); ++k) a[k] = std::clamp(a[k], lower_[k], upper_[k]);
}

std::vector<double> ControlBox::clamped(ConstVec a) const {
  std::vector<double> out(a.begin(), a.end());
  clamp(out);
  return out;
}

std::vector<double> ControlBox::midpoint() const {
  std::vector<double> out(dim());
  for (std::size_t k = 0; k < dim(); ++k) out[k] = 0.5 * (lower_[k] + upper_[k]);
  return out;
}

TimeGrid::TimeGrid(std::vector<double> knots) : knots_(std::move(knots)) {
  if (knots_.size() < 2) throw std::invalid_argument("TimeGrid: need at least two knots");
  if (knots_.front() != 0.0) throw std::invalid_argument("TimeGrid: first knot must be 0");
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const double d = knots_[i + 1] - knots_[i];
    if (!(d > 0.0)) throw std::invalid_argument("TimeGrid: knots must be strictly increasing");
    mesh_ = std::max(mesh_, d);
  }
}

std::optional<std::size_t> TimeGrid::find_knot(double t) const {
  const double tol = 1e-12 * horizon();
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t - tol);
  if (it != knots_.end() && std::abs(*it - t) <= tol) {
    return static_cast<std::size_t>(it - knots_.begin());
  }
  return std::nullopt;
}

TimeGrid make_uniform_grid(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw std::invalid_argument("make_uniform_grid: horizon must be positive");
  }
  if (steps == 0) throw std::invalid_argument("make_uniform_grid: steps must be >= 1");
  std::vector<double> knots(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    knots[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
  }
  knots.back() = horizon;
  return TimeGrid(std::move(knots));
}

void Problem::validate() const {
  if (!(horizon > 0.0)) throw std::invalid_argument("Problem " + name + ": horizon must be > 0");
  if (dim_x == 0 || dim_w == 0) throw std::invalid_argument("Problem " + name + ": zero dimension");
  if (initial_state.size() != dim_x) {
    throw std::invalid_argument("Problem " + name + ": initial state has wrong dimension");
  }
  if (!drift || !diffusion || !running_reward || !terminal_reward) {
    throw std::invalid_argument("Problem " + name + ": missing coefficient function");
  }
  if (controls.dim() == 0) throw std::invalid_argument("Problem " + name + ": empty control box");
  if (mark_box) {
    if (mark_box->dim() != controls.dim() || !controls.contains(mark_box->lower_span()) ||
        !controls.contains(mark_box->upper_span())) {
      throw std::invalid_argument("Problem " + name + ": mark box must lie inside the control box");
    }
  }
  if (lip_f < 0.0 || lip_g < 0.0) {
    throw std::invalid_argument("Problem " + name + ": Lipschitz constants must be >= 0");
  }
}

Problem negated(const Problem& problem) {
  Problem out = problem;
  out.name = "neg:" + problem.name;
  auto f = problem.running_reward;
  auto g = problem.terminal_reward;
  if (problem.reward_depends_on_z) {
    out.running_reward = [f](ConstVec x, ConstVec a, double y, ConstVec z) {
      std::vector<double> minus_z(z.size());
      for (std::size_t k = 0; k < z.size(); ++k) minus_z[k] = -z[k];
      return -f(x, a, -y, minus_z);
    };
  } else {
    out.running_reward = [f](ConstVec x, ConstVec a, double y, ConstVec z) { return -f(x, a, -y, z); };
  }
  out.terminal_reward = [g](ConstVec x) { return -g(x); };
  return out;
}

}  // namespace hjbmc
