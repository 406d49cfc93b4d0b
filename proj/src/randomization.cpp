#include "hjbmc/randomization.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <stdexcept>

#include "hjbmc/parallel.hpp"

namespace hjbmc {

namespace {

void draw_uniform(const ControlBox& box, CounterEngine& engine, MutVec out) {
  for (std::size_t k = 0; k < box.dim(); ++k) {
    const double u = std::generate_canonical<double, 64>(engine);
    out[k] = box.lower()[k] + (box.upper()[k] - box.lower()[k]) * u;
  }
}

}  // namespace

double default_intensity(double horizon) { return 2.0 / horizon; }

ControlPaths simulate_control(const Problem& problem, const TimeGrid& grid, std::size_t paths,
                              const RngPolicy& rng, double intensity) {
  if (!(intensity > 0.0) || !std::isfinite(intensity)) {
    throw std::invalid_argument("simulate_control: intensity must be positive");
  }
  if (paths == 0) throw std::invalid_argument("simulate_control: need at least one path");
  const ControlBox& box = problem.randomization_box();
  const std::size_t q = box.dim();
  const std::size_t n = grid.steps();

  ControlPaths out;
  out.grid = grid;
  out.paths = paths;
  out.dim = q;
  out.intensity = intensity;
  out.values.resize((n + 1) * paths * q);
  out.jump_counts.resize(paths);
  out.marks_sum.assign(paths * q, 0.0);

  for_each_block(paths, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> current(q);
    for (std::size_t m = begin; m < end; ++m) {
      CounterEngine engine = rng.engine(Substream::controls, m);
      std::exponential_distribution<double> gap(intensity);
      draw_uniform(box, engine, current);
      double next_jump = gap(engine);
      std::uint32_t jumps = 0;
      for (std::size_t i = 0; i <= n; ++i) {
        // Right-constant process: a jump exactly at t_i is already visible at t_i.
        while (next_jump <= grid.knot(i)) {
          draw_uniform(box, engine, current);
          for (std::size_t k = 0; k < q; ++k) out.marks_sum[m * q + k] += current[k];
          ++jumps;
          next_jump += gap(engine);
        }
        std::copy(current.begin(), current.end(), out.values.begin() + (i * paths + m) * q);
      }
      out.jump_counts[m] = jumps;
    }
  });
  return out;
}

RandomizedPathSet simulate_forward(const Problem& problem, ControlPaths controls,
                                   const TimeGrid& grid, const RngPolicy& rng,
                                   bool record_increments) {
  problem.validate();
  if (controls.dim != problem.dim_a()) {
    throw std::invalid_argument("simulate_forward: control dimension does not match the problem");
  }
  if (!(controls.grid == grid)) {
    throw std::invalid_argument("simulate_forward: controls were simulated on another grid");
  }
  const std::size_t d = problem.dim_x;
  const std::size_t w = problem.dim_w;
  const std::size_t n = grid.steps();
  const std::size_t paths = controls.paths;

  RandomizedPathSet out;
  out.grid_ = grid;
  out.paths_ = paths;
  out.dim_x_ = d;
  out.dim_w_ = w;
  out.seed_ = rng.master_seed;
  out.x_.resize((n + 1) * paths * d);
  if (record_increments) out.dw_.resize(n * paths * w);
  out.controls_ = std::move(controls);

  std::vector<double> sqrt_dt(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_dt[i] = std::sqrt(grid.delta(i));

  const ControlPaths& ctrl = out.controls_;
  for_each_block(paths, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<double> x(problem.initial_state);
    std::vector<double> b(d), sig(d * w), dw(w);
    for (std::size_t m = begin; m < end; ++m) {
      CounterEngine engine = rng.engine(Substream::brownian, m);
      std::normal_distribution<double> normal(0.0, 1.0);
      x = problem.initial_state;
      std::copy(x.begin(), x.end(), out.x_.begin() + m * d);
      for (std::size_t i = 0; i < n; ++i) {
        const ConstVec a = ctrl.at(m, i);
        problem.drift(x, a, b);
        problem.diffusion(x, a, sig);
        for (std::size_t k = 0; k < w; ++k) dw[k] = sqrt_dt[i] * normal(engine);
        const double dt = grid.delta(i);
        for (std::size_t r = 0; r < d; ++r) {
          double v = x[r] + b[r] * dt;
          for (std::size_t k = 0; k < w; ++k) v += sig[r * w + k] * dw[k];
          x[r] = v;
        }
        std::copy(x.begin(), x.end(), out.x_.begin() + ((i + 1) * paths + m) * d);
        if (record_increments) {
          std::copy(dw.begin(), dw.end(), out.dw_.begin() + (i * paths + m) * w);
        }
      }
    }
  });
  return out;
}

std::vector<double> terminal_state_radius(const RandomizedPathSet& paths, double n_std) {
  const std::size_t d = paths.dim_x();
  const std::size_t n = paths.grid().steps();
  const std::size_t count = paths.paths();
  std::vector<double> radius(d);
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (std::size_t m = 0; m < count; ++m) mean += paths.state(m, n)[k];
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t m = 0; m < count; ++m) {
      const double e = paths.state(m, n)[k] - mean;
      var += e * e;
    }
    var /= static_cast<double>(count > 1 ? count - 1 : 1);
    radius[k] = std::abs(mean) + n_std * std::sqrt(var);
  }
  return radius;
}

void write_paths(std::ostream& out, const RandomizedPathSet& paths, std::size_t max_paths) {
  const std::size_t n = paths.grid().steps();
  const std::size_t count = std::min(max_paths, paths.paths());
  out << "m,t";
  for (std::size_t k = 0; k < paths.dim_x(); ++k) out << ",x" << k;
  for (std::size_t k = 0; k < paths.dim_a(); ++k) out << ",i" << k;
  for (std::size_t k = 0; k < paths.dim_w(); ++k) out << ",dw" << k;
  out << '\n' << std::setprecision(17);
  for (std::size_t m = 0; m < count; ++m) {
    for (std::size_t i = 0; i <= n; ++i) {
      out << m << ',' << paths.grid().knot(i);
      for (double v : paths.state(m, i)) out << ',' << v;
      for (double v : paths.control(m, i)) out << ',' << v;
      for (std::size_t k = 0; k < paths.dim_w(); ++k) {
        out << ',';
        if (i < n && paths.has_increments()) out << paths.increment(m, i)[k];
      }
      out << '\n';
    }
  }
}

}  // namespace hjbmc
