#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjbmc::cli {

/// Raised for malformed configuration (exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FixedControlGrid {
  std::string control;  // name of the control component, e.g. "rho"
  std::vector<double> values;
};

struct RunConfig {
  std::string problem = "uv_callspread";
  std::vector<std::size_t> paths = {std::size_t{1} << 16};
  std::vector<std::size_t> steps;  // empty: preset recommendation
  std::uint64_t seed = 1;
  std::optional<double> intensity;  // unset ("auto"): preset recommendation, else 2/T
  std::size_t threads = 0;          // 0: no cap
  std::string output_dir = "hjbmc_out";
  bool emit_policy = false;
  bool truncation = true;
  std::optional<FixedControlGrid> fixed_control_grid;
  std::vector<double> moneyness;  // empty: the preset's own S1(0)
  bool reuse_paths = false;
  bool sub_price = false;   // also solve the inf problem (negated rewards)
  std::size_t dump_paths = 0;
  bool runtime_column = true;
};

/// "2^16..2^21" (every exponent), "65536", "2^17,2^18" or mixes of these.
std::vector<std::size_t> parse_paths(const std::string& text);
/// "8,16,32" or "8..128" (doubling).
std::vector<std::size_t> parse_steps(const std::string& text);
/// "-10..10" (unit step), "-10..10:2.5" or a comma list.
std::vector<double> parse_range(const std::string& text);
/// "rho=-0.8,0,0.8".
FixedControlGrid parse_fixed_control_grid(const std::string& text);
/// Number or "auto".
std::optional<double> parse_intensity(const std::string& text);

/// Applies the keys of a JSON object (same names as the flags, with
/// underscores) on top of `config`.
void apply_json(RunConfig& config, const std::string& json_text);

}  // namespace hjbmc::cli
