#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "hjbmc/problem.hpp"

namespace hjbmc {

/// Polynomial degree of the inner predictor beta . phi(t, x, a) in the control.
enum class ControlStructure { quadratic_in_a, linear_in_a, general };

/// How the inner predictor maps to a value.
enum class Link { identity, logistic };

const char* to_string(ControlStructure s);
ControlStructure control_structure_from_string(const std::string& s);

/// Regression basis. Fitted value = scale(t, x) * link(beta . phi(t, x, a)).
/// With the identity link this is an ordinary linear basis with columns
/// scale * phi_k; with the logistic link the fit is nonlinear in beta.
struct Basis {
  using FeatureMap = std::function<void(double t, ConstVec x, ConstVec a, MutVec out)>;
  using Scale = std::function<double(double t, ConstVec x)>;

  std::string name;
  std::vector<std::string> feature_names;
  FeatureMap features;
  Scale scale;  // empty means 1
  Link link = Link::identity;
  ControlStructure control_structure = ControlStructure::general;

  std::size_t count() const { return feature_names.size(); }
  double prefactor(double t, ConstVec x) const { return scale ? scale(t, x) : 1.0; }

  /// beta . phi(t, x, a); `scratch` must hold count() entries.
  double inner(ConstVec beta, double t, ConstVec x, ConstVec a, MutVec scratch) const;
  double predict(ConstVec beta, double t, ConstVec x, ConstVec a) const;
  double predict(ConstVec beta, double t, ConstVec x, ConstVec a, MutVec scratch) const;
};

double logistic(double u);

/// Basis whose fitted values are the negatives of the original ones.
Basis negated(const Basis& basis);

/// Plain linear basis on the inner features (identity link, unit scale).
Basis linear_part(const Basis& basis);

/// Finite-difference probe of the declared control structure at the given
/// states: second differences in each control coordinate must be constant in
/// `a` (quadratic_in_a) or zero (linear_in_a) for random coefficient vectors.
bool probe_control_structure(const Basis& basis, const ControlBox& box,
                             const std::vector<std::vector<double>>& states, double t = 0.0);

}  // namespace hjbmc
