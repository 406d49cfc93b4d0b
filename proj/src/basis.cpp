#include "hjbmc/basis.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace hjbmc {

const char* to_string(ControlStructure s) {
  switch (s) {
    case ControlStructure::quadratic_in_a: return "quadratic_in_a";
    case ControlStructure::linear_in_a: return "linear_in_a";
    case ControlStructure::general: return "general";
  }
  return "general";
}

ControlStructure control_structure_from_string(const std::string& s) {
  if (s == "quadratic_in_a") return ControlStructure::quadratic_in_a;
  if (s == "linear_in_a") return ControlStructure::linear_in_a;
  if (s == "general") return ControlStructure::general;
  throw std::invalid_argument("unknown control structure: " + s);
}

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double Basis::inner(ConstVec beta, double t, ConstVec x, ConstVec a, MutVec scratch) const {
  features(t, x, a, scratch);
  double s = 0.0;
  for (std::size_t k = 0; k < beta.size(); ++k) s += beta[k] * scratch[k];
  return s;
}

double Basis::predict(ConstVec beta, double t, ConstVec x, ConstVec a, MutVec scratch) const {
  const double u = inner(beta, t, x, a, scratch);
  const double s = prefactor(t, x);
  return link == Link::logistic ? s * logistic(u) : s * u;
}

double Basis::predict(ConstVec beta, double t, ConstVec x, ConstVec a) const {
  std::vector<double> scratch(count());
  return predict(beta, t, x, a, scratch);
}

Basis negated(const Basis& basis) {
  Basis out = basis;
  out.name = "neg:" + basis.name;
  auto scale = basis.scale;
  out.scale = [scale](double t, ConstVec x) { return scale ? -scale(t, x) : -1.0; };
  return out;
}

Basis linear_part(const Basis& basis) {
  Basis out = basis;
  out.name = basis.name + ":linear";
  out.scale = nullptr;
  out.link = Link::identity;
  return out;
}

bool probe_control_structure(const Basis& basis, const ControlBox& box,
                             const std::vector<std::vector<double>>& states, double t) {
  if (basis.control_structure == ControlStructure::general) return true;
  std::mt19937_64 gen(12345);
  std::normal_distribution<double> normal;
  const std::size_t q = box.dim();
  std::vector<double> beta(basis.count()), scratch(basis.count());
  for (int trial = 0; trial < 3; ++trial) {
    for (double& b : beta) b = normal(gen);
    for (const auto& x : states) {
      for (std::size_t k = 0; k < q; ++k) {
        const double lo = box.lower()[k];
        const double width = box.upper()[k] - lo;
        const double h = width > 0.0 ? width / 4.0 : 1.0;
        std::vector<double> a = box.midpoint();
        // second differences at two different base points along coordinate k
        double second[2];
        double ref = 0.0;
        for (int base = 0; base < 2; ++base) {
          const double a0 = lo + base * h;
          double v[3];
          for (int j = 0; j < 3; ++j) {
            a[k] = a0 + j * h;
            v[j] = basis.inner(beta, t, x, a, scratch);
            ref = std::max(ref, std::abs(v[j]));
          }
          second[base] = v[2] - 2.0 * v[1] + v[0];
        }
        const double tol = 1e-9 * (1.0 + ref);
        if (basis.control_structure == ControlStructure::linear_in_a) {
          if (std::abs(second[0]) > tol || std::abs(second[1]) > tol) return false;
        } else if (std::abs(second[0] - second[1]) > tol) {
          return false;
        }
      }
    }
  }
  return true;
}

}  // namespace hjbmc
