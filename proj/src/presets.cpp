#include "hjbmc/presets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hjbmc {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

// Features are affine reparameterizations of the printed monomials (prices
// relative to a reference level, volatilities centred on the box midpoint);
// they span the same function space and condition the design far better.
double rel(double s, double ref) { return s / ref - 1.0; }
double vol(double sigma) { return (sigma - 0.15) / 0.05; }

Basis lq_basis() {
  Basis b;
  b.name = "lq_quadratic";
  b.feature_names = {"1", "x", "a", "x*a", "x^2", "a^2"};
  b.features = [](double, ConstVec x, ConstVec a, MutVec out) {
    const double s = x[0], c = a[0];
    out[0] = 1.0;
    out[1] = s;
    out[2] = c;
    out[3] = s * c;
    out[4] = s * s;
    out[5] = c * c;
  };
  b.control_structure = ControlStructure::quadratic_in_a;
  return b;
}

Basis sigmoid_1d_basis(std::string name, double amplitude) {
  Basis b;
  b.name = std::move(name);
  b.feature_names = {"1", "s", "s^2", "sigma", "sigma*s", "sigma*s^2"};
  b.features = [](double, ConstVec x, ConstVec a, MutVec out) {
    const double s = rel(x[0], 100.0), v = vol(a[0]);
    out[0] = 1.0;
    out[1] = s;
    out[2] = s * s;
    out[3] = v;
    out[4] = v * s;
    out[5] = v * s * s;
  };
  b.scale = [amplitude](double, ConstVec) { return amplitude; };
  b.link = Link::logistic;
  b.control_structure = ControlStructure::linear_in_a;
  return b;
}

Basis corr_sigmoid_basis() {
  Basis b;
  b.name = "uvm_corr_sigmoid";
  b.feature_names = {"1", "s1", "s2", "rho", "rho*s1", "rho*s2"};
  b.features = [](double, ConstVec x, ConstVec a, MutVec out) {
    const double s1 = rel(x[0], 50.0), s2 = rel(x[1], 50.0), r = a[0];
    out[0] = 1.0;
    out[1] = s1;
    out[2] = s2;
    out[3] = r;
    out[4] = r * s1;
    out[5] = r * s2;
  };
  b.scale = [](double, ConstVec) { return 10.0; };
  b.link = Link::logistic;
  b.control_structure = ControlStructure::linear_in_a;
  return b;
}

Basis poly_2d_basis() {
  Basis b;
  b.name = "uv_2d_poly";
  b.feature_names = {"1",        "s1",        "s1^2",     "s2",           "s2^2",         "s1*s2",
                     "sigma1",   "sigma1*s1", "sigma1*s1^2", "sigma1*s2", "sigma1*s2^2", "sigma2",
                     "sigma2*s1", "sigma2*s1^2", "sigma2*s2", "sigma2*s2^2"};
  b.features = [](double, ConstVec x, ConstVec a, MutVec out) {
    const double s1 = rel(x[0], 100.0), s2 = rel(x[1], 100.0);
    const double v1 = vol(a[0]), v2 = vol(a[1]);
    out[0] = 1.0;
    out[1] = s1;
    out[2] = s1 * s1;
    out[3] = s2;
    out[4] = s2 * s2;
    out[5] = s1 * s2;
    out[6] = v1;
    out[7] = v1 * s1;
    out[8] = v1 * s1 * s1;
    out[9] = v1 * s2;
    out[10] = v1 * s2 * s2;
    out[11] = v2;
    out[12] = v2 * s1;
    out[13] = v2 * s1 * s1;
    out[14] = v2 * s2;
    out[15] = v2 * s2 * s2;
  };
  b.scale = [](double, ConstVec) { return 100.0; };
  b.control_structure = ControlStructure::linear_in_a;
  return b;
}

Basis spread_sigmoid_basis(bool with_rho) {
  Basis b;
  b.name = with_rho ? "uv_spread_rho_sigmoid" : "uv_spread_sigmoid";
  b.feature_names = {"1", "u", "u^2", "sigma1", "sigma1*u", "sigma1*u^2", "sigma2", "sigma2*u", "sigma2*u^2"};
  if (with_rho) {
    b.feature_names.insert(b.feature_names.end(), {"rho", "rho*u", "rho*u^2"});
  }
  b.features = [with_rho](double, ConstVec x, ConstVec a, MutVec out) {
    const double u = x[1] / std::max(x[0], 1e-12) - 1.0;
    const double u2 = u * u;
    const double v1 = vol(a[0]), v2 = vol(a[1]);
    out[0] = 1.0;
    out[1] = u;
    out[2] = u2;
    out[3] = v1;
    out[4] = v1 * u;
    out[5] = v1 * u2;
    out[6] = v2;
    out[7] = v2 * u;
    out[8] = v2 * u2;
    if (with_rho) {
      const double r = a[2] / 0.5;
      out[9] = r;
      out[10] = r * u;
      out[11] = r * u2;
    }
  };
  b.scale = [](double, ConstVec x) { return 0.2 * x[0]; };
  b.link = Link::logistic;
  b.control_structure = ControlStructure::linear_in_a;
  return b;
}

// Two correlated geometric Brownian motions; `unpack` maps the control to
// (sigma1, sigma2, rho).
using Unpack = std::function<std::array<double, 3>(ConstVec a)>;

Problem make_two_asset_problem(std::string name, double s1, double s2, ControlBox controls, double horizon,
                               Unpack unpack, Problem::Terminal payoff, double lip_g) {
  Problem p;
  p.name = std::move(name);
  p.dim_x = 2;
  p.dim_w = 2;
  p.initial_state = {s1, s2};
  p.drift = [](ConstVec, ConstVec, MutVec out) { out[0] = out[1] = 0.0; };
  p.diffusion = [unpack](ConstVec x, ConstVec a, MutVec out) {
    const auto [v1, v2, rho] = unpack(a);
    out[0] = v1 * x[0];
    out[1] = 0.0;
    out[2] = v2 * rho * x[1];
    out[3] = v2 * std::sqrt(std::max(0.0, 1.0 - rho * rho)) * x[1];
  };
  p.running_reward = [](ConstVec, ConstVec, double, ConstVec) { return 0.0; };
  p.terminal_reward = std::move(payoff);
  p.horizon = horizon;
  p.controls = std::move(controls);
  p.lip_g = lip_g;
  return p;
}

double spread_payoff(ConstVec x) { return pos(x[1] - 0.9 * x[0]) - pos(x[1] - 1.1 * x[0]); }

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "lq",          "uvm_callspread_corr",     "uv_callspread",          "uv_digital",
      "uv_outperformer", "uv_outperformer_rho", "uv_outperformer_spread", "uv_outperformer_spread_rho"};
  return names;
}

LqParameters paper_lq_parameters() { return LqParameters{}; }

Problem make_lq_problem(const LqParameters& c) {
  Problem p;
  p.name = "lq";
  p.dim_x = 1;
  p.dim_w = 1;
  p.initial_state = {0.0};
  p.drift = [c](ConstVec x, ConstVec a, MutVec out) { out[0] = -c.mu0 * x[0] + c.mu1 * a[0]; };
  p.diffusion = [c](ConstVec, ConstVec a, MutVec out) { out[0] = c.sigma0 + c.sigma1 * a[0]; };
  p.running_reward = [c](ConstVec, ConstVec a, double, ConstVec) { return -c.lambda0 * a[0] * a[0]; };
  p.terminal_reward = [c](ConstVec x) { return -c.lambda1 * x[0] * x[0]; };
  p.horizon = c.horizon;
  p.controls = ControlBox({-10.0}, {10.0});
  p.mark_box = ControlBox({-3.0}, {3.0});
  p.lip_f = 2.0 * c.lambda0 * p.controls.bound();
  p.lip_g = 2.0 * c.lambda1;  // on |x| <= 1
  p.f_at_origin = 0.0;
  return p;
}

Problem make_gbm_problem(std::string name, double s0, ControlBox vol_box, double horizon,
                         Problem::Terminal payoff, double lip_g) {
  Problem p;
  p.name = std::move(name);
  p.dim_x = 1;
  p.dim_w = 1;
  p.initial_state = {s0};
  p.drift = [](ConstVec, ConstVec, MutVec out) { out[0] = 0.0; };
  p.diffusion = [](ConstVec x, ConstVec a, MutVec out) { out[0] = a[0] * x[0]; };
  p.running_reward = [](ConstVec, ConstVec, double, ConstVec) { return 0.0; };
  p.terminal_reward = std::move(payoff);
  p.horizon = horizon;
  p.controls = std::move(vol_box);
  p.lip_g = lip_g;
  return p;
}

Preset preset_problem(const std::string& name, const PresetParams& params) {
  Preset out;
  if (name == "lq") {
    out.problem = make_lq_problem(paper_lq_parameters());
    out.basis = lq_basis();
    out.reference = -5.705;
    out.published = {{"scheme", -5.761}};
    out.recommended_steps = 52;
    out.recommended_intensity = 10.0;
    out.control_names = {"alpha"};
    out.mid_control = {0.0};
  } else if (name == "uvm_callspread_corr") {
    const double s1 = 50.0 + params.moneyness;
    if (!(s1 > 0.0)) throw std::invalid_argument("uvm_callspread_corr: S1(0) must be positive");
    out.problem = make_two_asset_problem(
        name, s1, 50.0, ControlBox({-0.8}, {0.8}), 0.25,
        [](ConstVec a) { return std::array<double, 3>{0.4, 0.3, a[0]}; },
        [](ConstVec x) { return pos(x[0] - x[1] + 5.0) - pos(x[0] - x[1] - 5.0); }, std::sqrt(2.0));
    out.basis = corr_sigmoid_basis();
    out.recommended_steps = 26;
    out.control_names = {"rho"};
    out.mid_control = {0.0};
  } else if (name == "uv_callspread") {
    out.problem = make_gbm_problem(
        name, 100.0, ControlBox({0.1}, {0.2}), 1.0,
        [](ConstVec x) { return pos(x[0] - 90.0) - pos(x[0] - 110.0); }, 1.0);
    out.basis = sigmoid_1d_basis("uv_callspread_sigmoid", 20.0);
    out.reference = 11.20;
    out.reference_bs = 9.52;
    out.published = {{"p1", 11.31}, {"p2", 11.14}, {"mid", 11.22}};
    out.control_names = {"sigma"};
    out.mid_control = {0.15};
  } else if (name == "uv_digital") {
    out.problem = make_gbm_problem(
        name, 100.0, ControlBox({0.1}, {0.2}), 1.0, [](ConstVec x) { return x[0] >= 100.0 ? 100.0 : 0.0; },
        std::numeric_limits<double>::infinity());
    out.basis = sigmoid_1d_basis("uv_digital_sigmoid", 100.0);
    out.reference = 63.33;
    out.reference_bs = 46.54;
    out.published = {{"p1", 63.04}, {"p2", 62.15}};
    out.control_names = {"sigma"};
    out.mid_control = {0.15};
  } else if (name == "uv_outperformer" || name == "uv_outperformer_rho") {
    const double rho = name == "uv_outperformer" ? 0.0 : -0.5;
    out.problem = make_two_asset_problem(
        name, 100.0, 100.0, ControlBox({0.1, 0.1}, {0.2, 0.2}), 1.0,
        [rho](ConstVec a) { return std::array<double, 3>{a[0], a[1], rho}; },
        [](ConstVec x) { return pos(x[0] - x[1]); }, std::sqrt(2.0));
    out.basis = poly_2d_basis();
    // The quadratic-in-s surface needs dense control switching to pin the
    // vega sign; coarse grids suffice since the error is mostly Monte Carlo.
    out.recommended_steps = 16;
    out.recommended_intensity = 10.0;
    if (rho == 0.0) {
      out.reference = 11.25;
      out.published = {{"p1", 11.31}, {"p2", 11.25}};
    } else {
      out.reference = 13.75;
      out.published = {{"p1", 13.69}, {"p2", 13.75}};
    }
    out.control_names = {"sigma1", "sigma2"};
    out.mid_control = {0.15, 0.15};
  } else if (name == "uv_outperformer_spread") {
    out.problem = make_two_asset_problem(
        name, 100.0, 100.0, ControlBox({0.1, 0.1}, {0.2, 0.2}), 1.0,
        [](ConstVec a) { return std::array<double, 3>{a[0], a[1], -0.5}; }, spread_payoff, 1.5);
    out.basis = spread_sigmoid_basis(false);
    out.reference = 11.41;
    out.reference_bs = 9.04;
    out.published = {{"p1", 11.53}, {"p2", 11.31}, {"mid", 11.42}};
    out.control_names = {"sigma1", "sigma2"};
    out.mid_control = {0.15, 0.15};
  } else if (name == "uv_outperformer_spread_rho") {
    out.problem = make_two_asset_problem(
        name, 100.0, 100.0, ControlBox({0.1, 0.1, -0.5}, {0.2, 0.2, 0.5}), 1.0,
        [](ConstVec a) { return std::array<double, 3>{a[0], a[1], a[2]}; }, spread_payoff, 1.5);
    out.basis = spread_sigmoid_basis(true);
    out.reference = 12.83;
    out.reference_bs = 9.24;
    out.published = {{"p1", 13.57}, {"p2", 12.12}, {"mid", 12.84}};
    out.control_names = {"sigma1", "sigma2", "rho"};
    out.mid_control = {0.15, 0.15, 0.0};
  } else {
    throw std::invalid_argument("unknown problem preset: " + name);
  }
  out.problem.validate();
  return out;
}

Basis basis_by_name(const std::string& name) {
  const std::string prefix = "neg:";
  if (name.rfind(prefix, 0) == 0) return negated(basis_by_name(name.substr(prefix.size())));
  if (name == "lq_quadratic") return lq_basis();
  if (name == "uvm_corr_sigmoid") return corr_sigmoid_basis();
  if (name == "uv_callspread_sigmoid") return sigmoid_1d_basis(name, 20.0);
  if (name == "uv_digital_sigmoid") return sigmoid_1d_basis(name, 100.0);
  if (name == "uv_2d_poly") return poly_2d_basis();
  if (name == "uv_spread_sigmoid") return spread_sigmoid_basis(false);
  if (name == "uv_spread_rho_sigmoid") return spread_sigmoid_basis(true);
  throw std::invalid_argument("unknown basis: " + name);
}

std::optional<LqFeedback> lq_feedback(const Eigen::VectorXd& beta) {
  if (beta.size() != 6) throw std::invalid_argument("lq_feedback: expected the 6-term quadratic basis");
  if (!(beta(5) < 0.0)) return std::nullopt;
  return LqFeedback{-beta(3) / (2.0 * beta(5)), -beta(2) / (2.0 * beta(5))};
}

}  // namespace hjbmc
