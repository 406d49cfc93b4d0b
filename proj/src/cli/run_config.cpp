#include "hjbmc/cli/run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

namespace hjbmc::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string& s) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError("not a positive integer: '" + s + "'");
  }
  const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
  if (v == 0) throw ConfigError("expected a positive integer, got 0");
  return static_cast<std::size_t>(v);
}

// "2^k" or a plain integer; returns the exponent when given as a power.
std::size_t parse_path_count(const std::string& s, std::optional<unsigned>* exponent = nullptr) {
  if (s.rfind("2^", 0) == 0) {
    const std::size_t k = parse_count(s.substr(2));
    if (k > 40) throw ConfigError("path exponent too large: " + s);
    if (exponent) *exponent = static_cast<unsigned>(k);
    return std::size_t{1} << k;
  }
  return parse_count(s);
}

}  // namespace

std::vector<std::size_t> parse_paths(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_path_count(item));
      continue;
    }
    std::optional<unsigned> lo, hi;
    parse_path_count(item.substr(0, dots), &lo);
    parse_path_count(item.substr(dots + 2), &hi);
    if (!lo || !hi || *lo > *hi) throw ConfigError("path ranges are written 2^a..2^b with a <= b: " + item);
    for (unsigned k = *lo; k <= *hi; ++k) out.push_back(std::size_t{1} << k);
  }
  if (out.empty()) throw ConfigError("empty path list");
  return out;
}

std::vector<std::size_t> parse_steps(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& item : split(text, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_count(item));
      continue;
    }
    const std::size_t lo = parse_count(item.substr(0, dots));
    const std::size_t hi = parse_count(item.substr(dots + 2));
    if (lo > hi) throw ConfigError("step range must be increasing: " + item);
    for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
  }
  if (out.empty()) throw ConfigError("empty step list");
  return out;
}

std::vector<double> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(parse_double(item));
    if (out.empty()) throw ConfigError("empty list");
    return out;
  }
  std::string rest = text.substr(dots + 2);
  double step = 1.0;
  if (const auto colon = rest.find(':'); colon != std::string::npos) {
    step = parse_double(rest.substr(colon + 1));
    rest = rest.substr(0, colon);
  }
  const double lo = parse_double(text.substr(0, dots));
  const double hi = parse_double(rest);
  if (!(step > 0.0) || lo > hi) throw ConfigError("bad range: " + text);
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t j = 0; j <= count; ++j) out.push_back(lo + static_cast<double>(j) * step);
  return out;
}

FixedControlGrid parse_fixed_control_grid(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("fixed control grid is written name=v1,v2,...");
  FixedControlGrid g;
  g.control = text.substr(0, eq);
  for (const auto& item : split(text.substr(eq + 1), ',')) g.values.push_back(parse_double(item));
  if (g.values.empty()) throw ConfigError("fixed control grid has no values");
  return g;
}

std::optional<double> parse_intensity(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const double v = parse_double(text);
  if (!(v > 0.0)) throw ConfigError("intensity must be positive");
  return v;
}

void apply_json(RunConfig& c, const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  auto text_of = [](const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string s;
      for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
      return s;
    }
    return v.dump();
  };
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "problem") c.problem = v.get<std::string>();
      else if (key == "paths") c.paths = parse_paths(text_of(v));
      else if (key == "steps") c.steps = parse_steps(text_of(v));
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "intensity") c.intensity = parse_intensity(text_of(v));
      else if (key == "threads") c.threads = v.get<std::size_t>();
      else if (key == "output_dir") c.output_dir = v.get<std::string>();
      else if (key == "emit_policy") c.emit_policy = v.get<bool>();
      else if (key == "no_truncation") c.truncation = !v.get<bool>();
      else if (key == "fixed_control_grid") c.fixed_control_grid = parse_fixed_control_grid(v.get<std::string>());
      else if (key == "moneyness") c.moneyness = parse_range(text_of(v));
      else if (key == "reuse_paths") c.reuse_paths = v.get<bool>();
      else if (key == "sub_price") c.sub_price = v.get<bool>();
      else if (key == "dump_paths") c.dump_paths = v.get<std::size_t>();
      else if (key == "no_runtime") c.runtime_column = !v.get<bool>();
      else throw ConfigError("config file: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
}

}  // namespace hjbmc::cli
