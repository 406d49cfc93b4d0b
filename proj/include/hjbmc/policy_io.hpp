#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "hjbmc/solver.hpp"

namespace hjbmc {

using BasisResolver = std::function<Basis(const std::string& name)>;

/// Line-oriented text format:
///   hjbmc-policy 1
///   problem <name>
///   basis <name> <strategy tag> <count>
///   controls <q> <lower...> <upper...>
///   initial <d> <x0...>
///   truncation <d> <r_x...> <r_w> <c_y> <c_z_scale>
///   knots <N+1> <t...>
///   step <i> y <B coefficients> z <k> [<B coefficients> per component]
/// Numbers are written with 17 significant digits (round-trip exact).
void write_policy(std::ostream& out, const PolicyTable& policy);

/// Parses write_policy output; the basis is rebuilt through `resolve` and
/// must match the stored name, strategy and feature count.
PolicyTable read_policy(std::istream& in, const BasisResolver& resolve);

}  // namespace hjbmc
