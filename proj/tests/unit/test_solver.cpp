#include <doctest.h>

#include <cmath>
#include <limits>
#include <string>

#include "hjbmc/pipeline.hpp"
#include "hjbmc/presets.hpp"
#include "hjbmc/solver.hpp"

using namespace hjbmc;

namespace {

Problem gbm(ControlBox box, std::function<double(ConstVec)> payoff, double x0 = 1.0) {
  Problem p;
  p.name = "gbm";
  p.initial_state = {x0};
  p.drift = [](ConstVec, ConstVec, MutVec out) { out[0] = 0.0; };
  p.diffusion = [](ConstVec x, ConstVec a, MutVec out) { out[0] = a[0] * x[0]; };
  p.running_reward = [](ConstVec, ConstVec, double, ConstVec) { return 0.0; };
  p.terminal_reward = std::move(payoff);
  p.controls = std::move(box);
  return p;
}

Basis poly_basis(Basis::FeatureMap map, std::vector<std::string> names, ControlStructure s) {
  Basis b;
  b.name = "test_poly";
  b.feature_names = std::move(names);
  b.features = std::move(map);
  b.control_structure = s;
  return b;
}

Basis affine_basis() {
  return poly_basis(
      [](double, ConstVec x, ConstVec a, MutVec out) {
        out[0] = 1.0;
        out[1] = x[0];
        out[2] = x[0] * x[0];
        out[3] = a[0];
        out[4] = a[0] * x[0];
      },
      {"1", "x", "x^2", "a", "a*x"}, ControlStructure::linear_in_a);
}

RandomizedPathSet simulate(const Problem& p, std::size_t paths, std::size_t steps, std::uint64_t seed = 1,
                           bool increments = true) {
  const TimeGrid grid = make_uniform_grid(p.horizon, steps);
  const RngPolicy rng{seed, kSolverStream};
  return simulate_forward(p, simulate_control(p, grid, paths, rng, default_intensity(p.horizon)), grid, rng,
                          increments);
}

const std::vector<double> kNoState{0.0};

}  // namespace

TEST_CASE("a constant payoff propagates unchanged") {
  const Problem p = gbm(ControlBox({0.1}, {0.3}), [](ConstVec) { return 3.0; });
  const RandomizedPathSet paths = simulate(p, 4096, 8);
  const BackwardResult r = backward_solve(paths, p, affine_basis(), TruncationSpec::disabled(1));
  CHECK(r.p1 == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.p1_path_mean == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(r.p1_stderr < 1e-8);
  for (double y : r.max_abs_y) CHECK(y == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("argmax of a concave quadratic sits at the vertex") {
  const Basis b = poly_basis(
      [](double, ConstVec, ConstVec a, MutVec out) {
        out[0] = 1.0;
        out[1] = a[0];
        out[2] = a[0] * a[0];
      },
      {"1", "a", "a^2"}, ControlStructure::quadratic_in_a);
  const std::vector<double> beta{0.0, 0.6, -1.0};
  const auto a = argmax_control(beta, b, ControlBox({-1.0}, {1.0}), 0.0, kNoState);
  CHECK(a[0] == doctest::Approx(0.3).epsilon(1e-12));
  // vertex outside the box clamps to the nearest edge
  CHECK(argmax_control(beta, b, ControlBox({0.5}, {1.0}), 0.0, kNoState)[0] == 0.5);
  // convex surface with equal endpoints: the lower edge wins the tie
  const std::vector<double> convex{0.0, -1.0, 1.0};
  CHECK(argmax_control(convex, b, ControlBox({0.0}, {1.0}), 0.0, kNoState)[0] == 0.0);
  const std::vector<double> tilted{0.0, -0.5, 1.0};
  CHECK(argmax_control(tilted, b, ControlBox({0.0}, {1.0}), 0.0, kNoState)[0] == 1.0);
}

TEST_CASE("sigmoid surfaces linear in the control are bang-bang") {
  const Preset corr = preset_problem("uvm_callspread_corr");
  std::vector<double> beta(6, 0.0);
  beta[3] = 2.0;
  const std::vector<double> x{50.0, 50.0};
  CHECK(argmax_control(beta, corr.basis, corr.problem.controls, 0.0, x)[0] == 0.8);
  beta[3] = -2.0;
  CHECK(argmax_control(beta, corr.basis, corr.problem.controls, 0.0, x)[0] == -0.8);
  // flat direction keeps the first corner
  beta[3] = 0.0;
  CHECK(argmax_control(beta, corr.basis, corr.problem.controls, 0.0, x)[0] == -0.8);
}

TEST_CASE("general structure finds the interior maximum of a quartic") {
  const Basis b = poly_basis(
      [](double, ConstVec, ConstVec a, MutVec out) {
        out[0] = 1.0;
        out[1] = a[0];
        out[2] = a[0] * a[0];
        out[3] = a[0] * a[0] * a[0] * a[0];
      },
      {"1", "a", "a^2", "a^4"}, ControlStructure::general);
  // -(a^2 - 1/4)^2 + a/100 peaks just right of 1/2
  const std::vector<double> beta{-0.0625, 0.01, 0.5, -1.0};
  const double a = argmax_control(beta, b, ControlBox({-1.0}, {1.0}), 0.0, kNoState)[0];
  CHECK(std::abs(a - 0.5) < 0.02);
  CHECK(a > 0.5);
}

TEST_CASE("separable two-dimensional quadratic") {
  const Basis b = poly_basis(
      [](double, ConstVec, ConstVec a, MutVec out) {
        out[0] = 1.0;
        out[1] = a[0];
        out[2] = a[0] * a[0];
        out[3] = a[1];
        out[4] = a[1] * a[1];
        out[5] = a[0] * a[1];
      },
      {"1", "a1", "a1^2", "a2", "a2^2", "a1*a2"}, ControlStructure::quadratic_in_a);
  const std::vector<double> beta{0.0, 0.4, -1.0, -0.8, -1.0, 0.0};
  const auto a = argmax_control(beta, b, ControlBox({-1.0, -1.0}, {1.0, 1.0}), 0.0, kNoState);
  CHECK(a[0] == doctest::Approx(0.2).epsilon(1e-10));
  CHECK(a[1] == doctest::Approx(-0.4).epsilon(1e-10));
  // coupled: max of -a1^2 - a2^2 + a1 a2 + a1 is at (2/3, 1/3)
  const std::vector<double> coupled{0.0, 1.0, -1.0, 0.0, -1.0, 1.0};
  const auto c = argmax_control(coupled, b, ControlBox({-1.0, -1.0}, {1.0, 1.0}), 0.0, kNoState);
  CHECK(c[0] == doctest::Approx(2.0 / 3).epsilon(1e-6));
  CHECK(c[1] == doctest::Approx(1.0 / 3).epsilon(1e-6));
}

TEST_CASE("clamps bound every backward value") {
  const Problem p = gbm(ControlBox({0.2}, {0.6}), [](ConstVec x) { return 4.0 * x[0]; });
  const RandomizedPathSet paths = simulate(p, 8192, 8);
  TruncationSpec spec = TruncationSpec::disabled(1);
  spec.c_y = 0.5;
  spec.c_z_scale = 0.05;
  SolverOptions opt;
  opt.force_z = true;
  const BackwardResult r = backward_solve(paths, p, affine_basis(), spec, opt);
  for (double y : r.max_abs_y) CHECK(y <= 0.5);
  const double dt = paths.grid().mesh();
  for (double z : r.max_abs_dz) CHECK(z <= dt * spec.c_z(dt) * (1 + 1e-15));
  CHECK(std::abs(r.p1) <= 0.5);
}

TEST_CASE("optimizing the control raises the estimate") {
  const Preset cs = preset_problem("uv_callspread");
  const RandomizedPathSet paths = simulate(cs.problem, 1 << 14, 16);
  const std::vector<double> r_x = terminal_state_radius(paths);
  const TimeGrid grid = paths.grid();
  const TruncationSpec spec = compute_bounds(cs.problem, grid, r_x);
  const BackwardResult opt = backward_solve(paths, cs.problem, cs.basis, spec);
  SolverOptions frozen;
  frozen.optimize_control = false;
  const BackwardResult plain = backward_solve(paths, cs.problem, cs.basis, spec, frozen);
  CHECK(plain.p1 == plain.p1_path_mean);
  CHECK(opt.p1 > plain.p1 + 1.0);
  CHECK(opt.p1 == doctest::Approx(opt.policy.value(0, cs.problem.initial_state)).epsilon(1e-12));
}

TEST_CASE("the time-zero value ignores the randomized initial control") {
  const Preset cs = preset_problem("uv_callspread");
  const RandomizedPathSet paths = simulate(cs.problem, 1 << 13, 8);
  const BackwardResult r =
      backward_solve(paths, cs.problem, cs.basis, compute_bounds(cs.problem, paths.grid(), terminal_state_radius(paths)));
  const double v = r.policy.value(0, cs.problem.initial_state);
  const auto a_star = r.policy.control(0, cs.problem.initial_state);
  CHECK(r.policy.surface(0, cs.problem.initial_state, a_star) >= r.policy.surface(0, cs.problem.initial_state, std::vector<double>{0.1}) - 1e-12);
  CHECK(r.policy.surface(0, cs.problem.initial_state, a_star) >= r.policy.surface(0, cs.problem.initial_state, std::vector<double>{0.2}) - 1e-12);
  CHECK(v == doctest::Approx(r.policy.surface(0, cs.problem.initial_state, a_star)).epsilon(1e-12));
}

TEST_CASE("fixed seeds give identical estimates") {
  const Preset cs = preset_problem("uv_callspread");
  EstimateOptions o;
  o.paths = 1 << 12;
  o.steps = 8;
  o.seed = 9;
  const EstimateResult a = run_estimate(cs.problem, cs.basis, o);
  const EstimateResult b = run_estimate(cs.problem, cs.basis, o);
  CHECK(a.report.p1 == b.report.p1);
  CHECK(a.report.p2 == b.report.p2);
  o.seed = 10;
  const EstimateResult c = run_estimate(cs.problem, cs.basis, o);
  CHECK(a.report.p1 != c.report.p1);
}

TEST_CASE("Z extraction") {
  const Problem p = gbm(ControlBox({0.2}, {0.3}), [](ConstVec) { return 2.0; });
  const RandomizedPathSet paths = simulate(p, 4096, 4);
  const BackwardResult no_z = backward_solve(paths, p, affine_basis(), TruncationSpec::disabled(1));
  CHECK_FALSE(no_z.policy.has_z());
  CHECK_THROWS_AS(extract_z(no_z.policy, 0, p.initial_state), NotAvailableError);

  SolverOptions opt;
  opt.force_z = true;
  BackwardResult with_z = backward_solve(paths, p, affine_basis(), TruncationSpec::disabled(1), opt);
  REQUIRE(with_z.policy.has_z());
  // E[Y dW] = 0 for constant Y; the estimate carries only regression noise
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(extract_z(with_z.policy, i, p.initial_state)[0]) < 1.0);
  for (auto& s : with_z.policy.steps) s.z_coef[0].setZero();
  CHECK(extract_z(with_z.policy, 2, p.initial_state)[0] == 0.0);
  CHECK_THROWS_AS(extract_z(with_z.policy, 9, p.initial_state), std::out_of_range);

  const RandomizedPathSet bare = simulate(p, 256, 4, 1, false);
  CHECK_THROWS_AS(backward_solve(bare, p, affine_basis(), TruncationSpec::disabled(1), opt), std::invalid_argument);
}

TEST_CASE("failures are reported") {
  const Problem bad = gbm(ControlBox({0.2}, {0.3}), [](ConstVec x) {
    return x[0] > 1.0 ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  });
  const RandomizedPathSet paths = simulate(bad, 512, 4);
  try {
    backward_solve(paths, bad, affine_basis(), TruncationSpec::disabled(1));
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
  const Problem ok = gbm(ControlBox({0.2}, {0.3}), [](ConstVec x) { return x[0]; });
  CHECK_THROWS_AS(backward_solve(simulate(ok, 3, 4), ok, affine_basis(), TruncationSpec::disabled(1)),
                  UnderdeterminedError);
}
