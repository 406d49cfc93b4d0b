#include <doctest.h>

#include <cmath>

#include "hjbmc/evaluator.hpp"
#include "hjbmc/oracles.hpp"
#include "hjbmc/presets.hpp"

using namespace hjbmc;

namespace {

PolicyTable solve_on(const Problem& p, const Basis& b, std::size_t paths, std::size_t steps) {
  const TimeGrid grid = make_uniform_grid(p.horizon, steps);
  const RngPolicy rng{4, kSolverStream};
  const RandomizedPathSet set =
      simulate_forward(p, simulate_control(p, grid, paths, rng, default_intensity(p.horizon)), grid, rng);
  return backward_solve(set, p, b, compute_bounds(p, grid, terminal_state_radius(set))).policy;
}

}  // namespace

TEST_CASE("a singleton-box policy reproduces fixed-control pricing exactly") {
  Preset cs = preset_problem("uv_callspread");
  cs.problem.controls = ControlBox::point({0.15});
  const PolicyTable policy = solve_on(cs.problem, cs.basis, 2048, 16);
  const RngPolicy rng{7, kEvaluationStream};
  const PolicyEvaluation a = evaluate_policy(cs.problem, policy, policy.grid, 4096, rng);
  const PolicyEvaluation b = evaluate_fixed_control(cs.problem, std::vector<double>{0.15}, policy.grid, 4096, rng);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("mid estimate") {
  CHECK(mid_estimate(11.31, 11.14) == doctest::Approx(11.225));
  CHECK(mid_estimate(13.5, 13.75) == 13.75);
  CHECK(mid_estimate(4.0, 4.0) == 4.0);
}

TEST_CASE("fixed-control pricing") {
  const Preset dg = preset_problem("uv_digital");
  const TimeGrid grid = make_uniform_grid(1.0, 64);
  CHECK_THROWS_AS(evaluate_fixed_control(dg.problem, std::vector<double>{0.25}, grid, 100, RngPolicy{1, 1}),
                  std::invalid_argument);
  const PolicyEvaluation e =
      evaluate_fixed_control(dg.problem, std::vector<double>{0.15}, grid, 1 << 16, RngPolicy{1, kEvaluationStream});
  CHECK(std::abs(e.value - digital_bs(100.0, 100.0, 0.15, 1.0)) < 3 * e.std_error + 0.3);
  CHECK(e.std_error > 0.0);

  Problem zero = dg.problem;
  zero.terminal_reward = [](ConstVec) { return 0.0; };
  const PolicyEvaluation z =
      evaluate_fixed_control(zero, std::vector<double>{0.1}, grid, 1000, RngPolicy{1, kEvaluationStream});
  CHECK(z.value == 0.0);
  CHECK(z.std_error == 0.0);
}

TEST_CASE("policy evaluation checks its grid and reports box usage") {
  const Preset cs = preset_problem("uv_callspread");
  const PolicyTable policy = solve_on(cs.problem, cs.basis, 4096, 8);
  CHECK_THROWS_AS(evaluate_policy(cs.problem, policy, make_uniform_grid(1.0, 16), 100, RngPolicy{1, 1}),
                  std::invalid_argument);
  const PolicyEvaluation e = evaluate_policy(cs.problem, policy, policy.grid, 4096, RngPolicy{1, 1});
  REQUIRE(e.upper_fraction.size() == 1);
  CHECK(e.upper_fraction[0] + e.lower_fraction[0] <= 1.0);
  CHECK(e.upper_fraction[0] > 0.0);
  CHECK(e.lower_fraction[0] > 0.0);
}

TEST_CASE("report rows") {
  EstimateReport r;
  r.problem = "uv_callspread";
  r.basis = "uv_callspread_sigmoid";
  r.paths = 65536;
  r.steps = 64;
  r.seed = 1;
  r.p1 = 11.3125;
  r.p1_stderr = 0.01;
  r.p2 = 11.125;
  r.p2_stderr = 0.02;
  r.mid = mid_estimate(r.p1, r.p2);
  CHECK(std::string(csv_header()) == "problem,basis,M,N,seed,p1,p1_stderr,p2,p2_stderr,mid,runtime_s,ref_value");
  CHECK(to_csv_row(r) == "uv_callspread,uv_callspread_sigmoid,65536,64,1,11.3125,0.01,11.125,0.02,11.21875,,");
  r.runtime_s = 1.23456;
  r.ref_value = 11.2;
  CHECK(to_csv_row(r) == "uv_callspread,uv_callspread_sigmoid,65536,64,1,11.3125,0.01,11.125,0.02,11.21875,1.235,11.2");
}
