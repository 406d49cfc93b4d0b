#include "hjbmc/evaluator.hpp"

#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>

#include "hjbmc/parallel.hpp"

namespace hjbmc {

namespace {

using ControlRule = std::function<void(std::size_t i, ConstVec x, MutVec a, MutVec scratch)>;

PolicyEvaluation simulate_rewards(const Problem& problem, const TimeGrid& grid, std::size_t paths,
                                  const RngPolicy& rng, std::size_t scratch_size, const ControlRule& rule) {
  if (paths == 0) throw std::invalid_argument("evaluate: need at least one path");
  const std::size_t d = problem.dim_x, w = problem.dim_w, q = problem.dim_a();
  const std::size_t n = grid.steps();
  const ControlBox& box = problem.controls;
  std::vector<double> reward(paths);
  const std::size_t blocks = block_count(paths);
  std::vector<std::vector<std::size_t>> hits_hi(blocks, std::vector<std::size_t>(q));
  std::vector<std::vector<std::size_t>> hits_lo(blocks, std::vector<std::size_t>(q));
  std::vector<double> sqrt_dt(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_dt[i] = std::sqrt(grid.delta(i));

  for_each_block(paths, [&](std::size_t blk, std::size_t begin, std::size_t end) {
    std::vector<double> x(d), bvec(d), sig(d * w), dw(w), a(q), scratch(scratch_size), zero(w, 0.0);
    for (std::size_t m = begin; m < end; ++m) {
      CounterEngine engine = rng.engine(Substream::brownian, m);
      std::normal_distribution<double> normal(0.0, 1.0);
      x = problem.initial_state;
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        rule(i, x, a, scratch);
        for (std::size_t k = 0; k < q; ++k) {
          if (a[k] == box.upper()[k]) ++hits_hi[blk][k];
          if (a[k] == box.lower()[k]) ++hits_lo[blk][k];
        }
        problem.drift(x, a, bvec);
        problem.diffusion(x, a, sig);
        for (std::size_t k = 0; k < w; ++k) dw[k] = sqrt_dt[i] * normal(engine);
        const double dt = grid.delta(i);
        for (std::size_t r = 0; r < d; ++r) {
          double v = x[r] + bvec[r] * dt;
          for (std::size_t k = 0; k < w; ++k) v += sig[r * w + k] * dw[k];
          x[r] = v;
        }
        total += problem.running_reward(x, a, 0.0, zero) * dt;
      }
      reward[m] = total + problem.terminal_reward(x);
    }
  });

  PolicyEvaluation out;
  double mean = 0.0;
  for (double r : reward) mean += r;
  mean /= static_cast<double>(paths);
  double ss = 0.0;
  for (double r : reward) ss += (r - mean) * (r - mean);
  const double var = paths > 1 ? ss / static_cast<double>(paths - 1) : 0.0;
  out.value = mean;
  out.std_error = std::sqrt(var / static_cast<double>(paths));
  if (!std::isfinite(out.value)) throw std::runtime_error("evaluate: non-finite reward");
  const double decisions = static_cast<double>(paths) * static_cast<double>(n);
  out.upper_fraction.assign(q, 0.0);
  out.lower_fraction.assign(q, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (std::size_t k = 0; k < q; ++k) {
      out.upper_fraction[k] += static_cast<double>(hits_hi[b][k]);
      out.lower_fraction[k] += static_cast<double>(hits_lo[b][k]);
    }
  }
  for (std::size_t k = 0; k < q; ++k) {
    out.upper_fraction[k] /= decisions;
    out.lower_fraction[k] /= decisions;
  }
  return out;
}

}  // namespace

PolicyEvaluation evaluate_policy(const Problem& problem, const PolicyTable& policy,
                                 const TimeGrid& grid, std::size_t paths, const RngPolicy& rng) {
  problem.validate();
  if (!(policy.grid == grid) || policy.steps.size() != grid.steps()) {
    throw std::invalid_argument("evaluate_policy: policy was built on another grid");
  }
  if (policy.controls.dim() != problem.dim_a()) {
    throw std::invalid_argument("evaluate_policy: policy control dimension does not match the problem");
  }
  const Basis& basis = policy.basis;
  return simulate_rewards(problem, grid, paths, rng, basis.count(),
                          [&](std::size_t i, ConstVec x, MutVec a, MutVec scratch) {
                            const auto& c = policy.steps[i].y_coef;
                            argmax_control(ConstVec(c.data(), static_cast<std::size_t>(c.size())), basis,
                                           policy.controls, grid.knot(i), x, a, scratch);
                          });
}

PolicyEvaluation evaluate_fixed_control(const Problem& problem, ConstVec a, const TimeGrid& grid,
                                        std::size_t paths, const RngPolicy& rng) {
  problem.validate();
  if (a.size() != problem.dim_a() || !problem.controls.contains(a)) {
    throw std::invalid_argument("evaluate_fixed_control: control outside the box");
  }
  const std::vector<double> fixed(a.begin(), a.end());
  return simulate_rewards(problem, grid, paths, rng, 0,
                          [&](std::size_t, ConstVec, MutVec out, MutVec) {
                            std::copy(fixed.begin(), fixed.end(), out.begin());
                          });
}

double mid_estimate(double p1, double p2) { return std::max(p2, 0.5 * (p1 + p2)); }

const char* csv_header() {
  return "problem,basis,M,N,seed,p1,p1_stderr,p2,p2_stderr,mid,runtime_s,ref_value";
}

std::string to_csv_row(const EstimateReport& r) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  std::string s = r.problem + ',' + r.basis + ',' + std::to_string(r.paths) + ',' + std::to_string(r.steps) +
                  ',' + std::to_string(r.seed) + ',' + num(r.p1) + ',' + num(r.p1_stderr) + ',' + num(r.p2) +
                  ',' + num(r.p2_stderr) + ',' + num(r.mid) + ',';
  if (r.runtime_s) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", *r.runtime_s);
    s += buf;
  }
  s += ',';
  if (r.ref_value) s += num(*r.ref_value);
  return s;
}

}  // namespace hjbmc
