#include <doctest.h>

#include <cmath>
#include <random>

#include "hjbmc/presets.hpp"
#include "hjbmc/regression.hpp"

using namespace hjbmc;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd random_design(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  MatrixXd a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    a(i, 0) = 1.0;
    for (Eigen::Index k = 1; k < cols; ++k) a(i, k) = n(gen) * static_cast<double>(k);
  }
  return a;
}

VectorXd noise(Eigen::Index rows, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  VectorXd v(rows);
  for (auto& e : v) e = n(gen);
  return v;
}

}  // namespace

TEST_CASE("exact representation is recovered") {
  const MatrixXd a = random_design(5000, 6, 1);
  VectorXd beta(6);
  beta << 1.5, -2.0, 0.25, 3.0, -0.5, 0.125;
  const RegressionFit f = fit(a, a * beta);
  CHECK((f.coefficients - beta).norm() / beta.norm() < 1e-8);
  CHECK(f.residual_mse < 1e-20);
  CHECK_FALSE(f.used_fallback);
}

TEST_CASE("constant targets load on the constant feature") {
  const MatrixXd a = random_design(3000, 4, 2);
  const RegressionFit f = fit(a, VectorXd::Constant(3000, 7.25));
  CHECK(f.coefficients(0) == doctest::Approx(7.25).epsilon(1e-10));
  for (int k = 1; k < 4; ++k) CHECK(std::abs(f.coefficients(k)) < 1e-10);
}

TEST_CASE("duplicated columns fall back and keep the minimal residual") {
  MatrixXd full = random_design(10, 3, 3);
  full.col(2) = full.col(1);
  const VectorXd y = noise(10, 4);
  const RegressionFit f = fit(full, y);
  CHECK(f.used_fallback);
  CHECK(f.condition_estimate > kConditionLimit);
  const RegressionFit sub = fit(full.leftCols(2), y);
  CHECK(std::abs(f.residual_mse - sub.residual_mse) < 1e-8);
  CHECK(std::abs((y - full * f.coefficients).squaredNorm() / 10 - sub.residual_mse) < 1e-8);
  // minimum norm: the weight splits evenly across identical columns
  CHECK(f.coefficients(1) == doctest::Approx(f.coefficients(2)).epsilon(1e-8));
}

TEST_CASE("residual is orthogonal to the design") {
  const MatrixXd a = random_design(20000, 7, 5);
  const VectorXd y = (a.col(3).array().sin() + noise(20000, 6).array()).matrix();
  const RegressionFit f = fit(a, y);
  const VectorXd r = y - a * f.coefficients;
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    CHECK(std::abs(a.col(k).dot(r)) / (a.col(k).norm() * r.norm()) < 1e-6);
  }
  CHECK(f.residual_mse == doctest::Approx(r.squaredNorm() / 20000).epsilon(1e-8));
}

TEST_CASE("projection is a contraction") {
  const MatrixXd a = random_design(4000, 5, 7);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const VectorXd u = noise(4000, 100 + s), v = noise(4000, 200 + s) * 3.0;
    const VectorXd fu = a * fit(a, u).coefficients, fv = a * fit(a, v).coefficients;
    CHECK((fu - fv).norm() <= (u - v).norm() * (1 + 1e-12));
  }
}

TEST_CASE("fit rejects bad inputs") {
  CHECK_THROWS_AS(fit(random_design(3, 5, 1), VectorXd::Zero(3)), UnderdeterminedError);
  MatrixXd a = random_design(10, 2, 1);
  a(3, 1) = std::nan("");
  CHECK_THROWS_AS(fit(a, VectorXd::Zero(10)), std::invalid_argument);
  CHECK_THROWS_AS(fit(random_design(10, 2, 1), VectorXd::Zero(9)), std::invalid_argument);
}

TEST_CASE("zero columns get zero coefficients") {
  MatrixXd a = random_design(100, 3, 9);
  a.col(2).setZero();
  const RegressionFit f = fit(a, noise(100, 1));
  CHECK(f.coefficients(2) == 0.0);
}

TEST_CASE("logistic fit recovers a sigmoid surface") {
  const Eigen::Index n = 20000;
  const MatrixXd phi = random_design(n, 3, 11) * 0.5;
  VectorXd beta(3);
  beta << 0.3, -1.2, 0.8;
  const VectorXd scale = VectorXd::Constant(n, 20.0);
  VectorXd y(n);
  const VectorXd e = noise(n, 12) * 0.5;
  for (Eigen::Index m = 0; m < n; ++m) y(m) = 20.0 * logistic(phi.row(m).dot(beta)) + e(m);
  const RegressionFit f = fit_logistic(phi, scale, y, VectorXd());
  CHECK((f.coefficients - beta).norm() < 0.05);
  CHECK(f.iterations >= 1);
  CHECK(f.residual_mse == doctest::Approx(0.25).epsilon(0.05));

  // warm start at the answer converges immediately to the same point
  const RegressionFit g = fit_logistic(phi, scale, y, f.coefficients);
  CHECK((g.coefficients - f.coefficients).norm() < 1e-6);
}

TEST_CASE("evaluate through a basis") {
  const Basis lq = preset_problem("lq").basis;
  RegressionFit f;
  f.coefficients = VectorXd::Zero(6);
  const std::vector<double> x{0.7}, a{-1.3};
  CHECK(evaluate(f, lq, 0.0, x, a) == 0.0);
  f.coefficients(0) = 1.0;
  for (double xv : {-2.0, 0.0, 3.0}) {
    for (double av : {-10.0, 0.5}) CHECK(evaluate(f, lq, 0.3, std::vector<double>{xv}, std::vector<double>{av}) == 1.0);
  }
  const Basis corr = preset_problem("uvm_callspread_corr").basis;
  RegressionFit s;
  s.coefficients = VectorXd::Zero(6);
  s.coefficients(0) = 800.0;
  CHECK(evaluate(s, corr, 0.0, std::vector<double>{50.0, 50.0}, std::vector<double>{0.3}) == doctest::Approx(10.0));
}

TEST_CASE("declared control structures survive the probe") {
  std::vector<std::vector<double>> one{{90.0}, {100.0}, {120.0}}, two{{90.0, 110.0}, {100.0, 100.0}, {130.0, 70.0}};
  for (const auto& name : preset_names()) {
    const Preset p = preset_problem(name);
    const auto& states = p.problem.dim_x == 1 ? one : two;
    CHECK_MESSAGE(probe_control_structure(p.basis, p.problem.controls, states), name);
  }
  Basis wrong = preset_problem("lq").basis;
  wrong.control_structure = ControlStructure::linear_in_a;
  CHECK_FALSE(probe_control_structure(wrong, ControlBox({-1.0}, {1.0}), one));
  Basis cubic;
  cubic.name = "cubic";
  cubic.feature_names = {"a^3"};
  cubic.features = [](double, ConstVec, ConstVec a, MutVec out) { out[0] = a[0] * a[0] * a[0]; };
  cubic.control_structure = ControlStructure::quadratic_in_a;
  CHECK_FALSE(probe_control_structure(cubic, ControlBox({-1.0}, {1.0}), one));
}
