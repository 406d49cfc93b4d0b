#include <doctest.h>

#include <cmath>
#include <random>

#include "hjbmc/presets.hpp"
#include "hjbmc/problem.hpp"

using namespace hjbmc;

TEST_CASE("uniform grids") {
  const TimeGrid g = make_uniform_grid(1.0, 4);
  CHECK(g.knots() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(make_uniform_grid(2.0, 52).mesh() == doctest::Approx(2.0 / 52));
  CHECK(make_uniform_grid(0.25, 26).mesh() == doctest::Approx(0.25 / 26));
  CHECK(make_uniform_grid(2.0, 52).knot(52) == 2.0);
  CHECK_THROWS_AS(make_uniform_grid(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_grid(-1.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_uniform_grid(1.0, 0), std::invalid_argument);
}

TEST_CASE("grid knot lookup") {
  const TimeGrid g = make_uniform_grid(2.0, 52);
  CHECK(g.find_knot(0.0) == 0u);
  CHECK(g.find_knot(2.0) == 52u);
  CHECK(g.find_knot(1.0 + 1e-14) == 26u);
  CHECK_FALSE(g.find_knot(0.01).has_value());
}

TEST_CASE("control box invariants") {
  CHECK_THROWS_AS(ControlBox({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ControlBox({0.0, 1.0}, {1.0}), std::invalid_argument);
  const ControlBox box({-1.0, 0.1}, {2.0, 0.2});
  CHECK(box.bound() == doctest::Approx(std::sqrt(4.0 + 0.04)));
  CHECK(ControlBox::point({0.3}).is_singleton());

  std::mt19937_64 gen(7);
  std::normal_distribution<double> n(0.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> a = {n(gen), n(gen)};
    const auto c = box.clamped(a);
    CHECK(box.contains(c));
    CHECK(box.clamped(c) == c);
  }
}

TEST_CASE("preset payoffs match their formulas") {
  const auto digital = preset_problem("uv_digital").problem;
  CHECK(digital.terminal_reward(std::vector<double>{100.0}) == 100.0);
  CHECK(digital.terminal_reward(std::vector<double>{99.99}) == 0.0);

  const auto cs = preset_problem("uv_callspread").problem;
  CHECK(cs.terminal_reward(std::vector<double>{80.0}) == 0.0);
  CHECK(cs.terminal_reward(std::vector<double>{100.0}) == 10.0);
  CHECK(cs.terminal_reward(std::vector<double>{150.0}) == 20.0);

  const auto corr = preset_problem("uvm_callspread_corr").problem;
  CHECK(corr.terminal_reward(std::vector<double>{50.0, 50.0}) == 5.0);
  CHECK(corr.terminal_reward(std::vector<double>{40.0, 50.0}) == 0.0);
  CHECK(corr.terminal_reward(std::vector<double>{70.0, 50.0}) == 10.0);
  CHECK(preset_problem("uvm_callspread_corr", {-10.0}).problem.initial_state[0] == 40.0);

  const auto op = preset_problem("uv_outperformer").problem;
  CHECK(op.terminal_reward(std::vector<double>{120.0, 100.0}) == 20.0);
  CHECK(op.terminal_reward(std::vector<double>{90.0, 100.0}) == 0.0);

  const auto spread = preset_problem("uv_outperformer_spread").problem;
  CHECK(spread.terminal_reward(std::vector<double>{100.0, 100.0}) == doctest::Approx(10.0));
  CHECK(spread.terminal_reward(std::vector<double>{100.0, 80.0}) == 0.0);
  CHECK(spread.terminal_reward(std::vector<double>{100.0, 130.0}) == doctest::Approx(20.0));

  const auto lq = preset_problem("lq").problem;
  CHECK(lq.terminal_reward(std::vector<double>{0.5}) == doctest::Approx(-50.0));
  std::vector<double> z{0.0};
  CHECK(lq.running_reward(std::vector<double>{1.0}, std::vector<double>{2.0}, 0.0, z) == doctest::Approx(-80.0));
  CHECK(lq.initial_state == std::vector<double>{0.0});
}

TEST_CASE("preset parameters") {
  const auto p = preset_problem("lq");
  CHECK(p.reference == -5.705);
  CHECK(p.problem.horizon == 2.0);
  CHECK(preset_problem("uv_callspread").reference_bs == 9.52);
  CHECK(preset_problem("uv_outperformer_spread").reference == 11.41);
  CHECK(preset_problem("uvm_callspread_corr").problem.controls.lower()[0] == -0.8);
  CHECK(preset_problem("uv_outperformer_spread_rho").problem.dim_a() == 3);
  CHECK_THROWS_AS(preset_problem("nope"), std::invalid_argument);
  CHECK(preset_names().size() == 8);
}

namespace {

// Second differences in a of the drift and diffusion entries at 3 points.
void check_affine(const Problem& p, const std::vector<double>& x) {
  const std::size_t q = p.dim_a();
  const std::size_t d = p.dim_x, w = p.dim_w;
  for (std::size_t k = 0; k < q; ++k) {
    const double lo = p.controls.lower()[k], hi = p.controls.upper()[k];
    std::vector<double> b0(d), b1(d), b2(d), s0(d * w), s1(d * w), s2(d * w);
    std::vector<double> a = p.controls.midpoint();
    a[k] = lo;
    p.drift(x, a, b0);
    p.diffusion(x, a, s0);
    a[k] = 0.5 * (lo + hi);
    p.drift(x, a, b1);
    p.diffusion(x, a, s1);
    a[k] = hi;
    p.drift(x, a, b2);
    p.diffusion(x, a, s2);
    for (std::size_t r = 0; r < d; ++r) CHECK(std::abs(b0[r] - 2 * b1[r] + b2[r]) < 1e-12);
    for (std::size_t r = 0; r < d * w; ++r) CHECK(std::abs(s0[r] - 2 * s1[r] + s2[r]) < 1e-12);
  }
}

}  // namespace

TEST_CASE("dynamics are affine in the control") {
  const auto lq = preset_problem("lq").problem;
  check_affine(lq, {0.7});
  std::vector<double> b(1), s(1);
  lq.drift(std::vector<double>{2.0}, std::vector<double>{1.0}, b);
  lq.diffusion(std::vector<double>{2.0}, std::vector<double>{1.0}, s);
  CHECK(b[0] == doctest::Approx(-0.04 + 0.5));
  CHECK(s[0] == doctest::Approx(0.3));
  check_affine(preset_problem("uv_callspread").problem, {104.0});
  check_affine(preset_problem("uv_outperformer").problem, {104.0, 93.0});
  check_affine(preset_problem("uv_outperformer_spread").problem, {104.0, 93.0});
}

TEST_CASE("correlated diffusion uses the Cholesky factor") {
  const auto p = preset_problem("uv_outperformer_spread_rho").problem;
  std::vector<double> s(4);
  p.diffusion(std::vector<double>{100.0, 50.0}, std::vector<double>{0.2, 0.1, 0.5}, s);
  CHECK(s[0] == doctest::Approx(20.0));
  CHECK(s[1] == 0.0);
  CHECK(s[2] == doctest::Approx(0.1 * 0.5 * 50.0));
  CHECK(s[3] == doctest::Approx(0.1 * std::sqrt(0.75) * 50.0));
}

TEST_CASE("negated problem flips the rewards") {
  const auto p = preset_problem("lq").problem;
  const Problem n = negated(p);
  std::vector<double> x{0.4}, a{1.5}, z{0.0};
  CHECK(n.terminal_reward(x) == -p.terminal_reward(x));
  CHECK(n.running_reward(x, a, 0.0, z) == -p.running_reward(x, a, 0.0, z));
  CHECK(n.name == "neg:lq");
}

TEST_CASE("validation rejects malformed problems") {
  Problem p = preset_problem("uv_callspread").problem;
  p.horizon = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = preset_problem("uv_callspread").problem;
  p.initial_state = {1.0, 2.0};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = preset_problem("uv_callspread").problem;
  p.mark_box = ControlBox({0.0}, {0.5});
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
