#include "hjbmc/cli/run.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "hjbmc/errors.hpp"
#include "hjbmc/oracles.hpp"
#include "hjbmc/parallel.hpp"
#include "hjbmc/pipeline.hpp"
#include "hjbmc/policy_io.hpp"
#include "hjbmc/presets.hpp"

namespace hjbmc::cli {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw ConfigError("cannot write " + p.string());
  return f;
}

// Plot series: one file per (quantity, M), rows "N value".
struct SeriesStore {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  void add(const std::string& key, double x, double y) { series[key].emplace_back(x, y); }
  void write(const fs::path& dir) const {
    for (const auto& [key, pts] : series) {
      auto f = open_out(dir / (key + ".dat"));
      f << "# x y\n";
      for (const auto& [x, y] : pts) f << fmt(x) << ' ' << fmt(y) << '\n';
    }
  }
};

void write_lq_coefficients(const fs::path& file, const PolicyTable& policy) {
  const LqParameters params = paper_lq_parameters();
  const RiccatiSolution ric = solve_lq_riccati(params, policy.grid);
  auto f = open_out(file);
  f << "i,t,A_est,B_est,A_oracle,B_oracle\n";
  for (std::size_t i = 0; i < policy.steps.size(); ++i) {
    const auto fb = lq_feedback(policy.steps[i].y_coef);
    f << i << ',' << fmt(policy.grid.knot(i)) << ',' << (fb ? fmt(fb->a) : "") << ',' << (fb ? fmt(fb->b) : "")
      << ',' << fmt(ric.a_coef[i]) << ',' << fmt(ric.b_coef[i]) << '\n';
  }
}

std::string tag_for(const std::string& problem, std::optional<double> moneyness) {
  return moneyness ? problem + "[m=" + fmt(*moneyness) + "]" : problem;
}

}  // namespace

int run(const RunConfig& config, std::ostream& log) {
  std::string stage = "configuration";
  try {
    const ThreadLimit limit(config.threads);
    {
      const auto& names = preset_names();
      if (std::find(names.begin(), names.end(), config.problem) == names.end()) {
        throw ConfigError("unknown problem '" + config.problem + "'");
      }
    }
    if (!config.moneyness.empty() && config.problem != "uvm_callspread_corr") {
      throw ConfigError("--moneyness applies to uvm_callspread_corr only");
    }
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

    auto csv = open_out(dir / "estimates.csv");
    csv << csv_header() << '\n';
    std::ofstream fixed_csv;
    if (config.fixed_control_grid) {
      fixed_csv = open_out(dir / "fixed_controls.csv");
      fixed_csv << "problem,control,value,M,N,seed,price,stderr\n";
    }
    SeriesStore plots;

    std::vector<std::optional<double>> sweep;
    if (config.moneyness.empty()) sweep.push_back(std::nullopt);
    for (double m : config.moneyness) sweep.emplace_back(m);

    for (const auto& moneyness : sweep) {
      stage = "preset";
      const Preset preset = preset_problem(config.problem, PresetParams{moneyness.value_or(0.0)});
      const std::string tag = tag_for(config.problem, moneyness);
      const std::vector<std::size_t> steps =
          config.steps.empty() ? std::vector<std::size_t>{preset.recommended_steps} : config.steps;

      std::optional<std::size_t> fixed_index;
      if (config.fixed_control_grid) {
        const auto& names = preset.control_names;
        const auto it = std::find(names.begin(), names.end(), config.fixed_control_grid->control);
        if (it == names.end()) {
          throw ConfigError("problem " + config.problem + " has no control named '" +
                            config.fixed_control_grid->control + "'");
        }
        fixed_index = static_cast<std::size_t>(it - names.begin());
      }

      for (std::size_t n : steps) {
        for (std::size_t m : config.paths) {
          EstimateOptions opt;
          opt.paths = m;
          opt.steps = n;
          opt.seed = config.seed;
          opt.intensity = config.intensity ? config.intensity : preset.recommended_intensity;
          opt.truncation = config.truncation;
          opt.reuse_paths = config.reuse_paths;
          if (config.dump_paths > 0) {
            const fs::path file = dir / ("paths_" + tag + "_N" + std::to_string(n) + "_M" + std::to_string(m) + ".csv");
            opt.record_increments = true;
            opt.inspect_paths = [file, &config](const RandomizedPathSet& p) {
              auto f = open_out(file);
              write_paths(f, p, config.dump_paths);
            };
          }

          stage = "estimate " + tag + " N=" + std::to_string(n) + " M=" + std::to_string(m);
          log << "hjbmc: " << stage << '\n';
          EstimateResult res = run_estimate(preset.problem, preset.basis, opt, preset.reference);
          res.report.problem = tag;
          if (!config.runtime_column) res.report.runtime_s.reset();
          csv << to_csv_row(res.report) << '\n';
          const std::string suffix = "_M" + std::to_string(m);
          const double x = moneyness ? *moneyness : static_cast<double>(n);
          const std::string prefix = moneyness ? "moneyness_" : "steps_";
          plots.add(prefix + "p1" + suffix, x, res.report.p1);
          plots.add(prefix + "p2" + suffix, x, res.report.p2);
          plots.add(prefix + "mid" + suffix, x, res.report.mid);

          if (config.emit_policy) {
            stage = "policy output";
            const std::string stem = tag + "_N" + std::to_string(n) + "_M" + std::to_string(m);
            auto f = open_out(dir / ("policy_" + stem + ".txt"));
            write_policy(f, res.backward.policy);
            if (config.problem == "lq") write_lq_coefficients(dir / ("lq_coefficients_" + stem + ".csv"), res.backward.policy);
          }

          if (config.sub_price) {
            stage = "sub-price " + tag + " N=" + std::to_string(n) + " M=" + std::to_string(m);
            log << "hjbmc: " << stage << '\n';
            const Problem neg = negated(preset.problem);
            EstimateResult inf = run_estimate(neg, negated(preset.basis), opt);
            EstimateReport r = inf.report;
            r.problem = "inf:" + tag;
            r.basis = preset.basis.name;
            r.p1 = -inf.report.p1;
            r.p2 = -inf.report.p2;
            r.mid = -inf.report.mid;
            r.ref_value.reset();
            if (!config.runtime_column) r.runtime_s.reset();
            csv << to_csv_row(r) << '\n';
            plots.add(prefix + "sub_p1" + suffix, x, r.p1);
            plots.add(prefix + "sub_p2" + suffix, x, r.p2);
            plots.add(prefix + "sub_mid" + suffix, x, r.mid);
          }

          if (fixed_index) {
            stage = "fixed-control pricing " + tag;
            const TimeGrid grid = make_uniform_grid(preset.problem.horizon, n);
            for (double v : config.fixed_control_grid->values) {
              std::vector<double> a = preset.mid_control;
              a[*fixed_index] = v;
              const PolicyEvaluation e = evaluate_fixed_control(
                  preset.problem, a, grid, m, RngPolicy{config.seed, kEvaluationStream});
              fixed_csv << tag << ',' << config.fixed_control_grid->control << ',' << fmt(v) << ',' << m << ','
                        << n << ',' << config.seed << ',' << fmt(e.value) << ',' << fmt(e.std_error) << '\n';
              plots.add("fixed_" + config.fixed_control_grid->control + "=" + fmt(v) + suffix, x, e.value);
            }
          }
        }
      }
    }
    stage = "plot output";
    plots.write(dir);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "hjbmc: configuration error (" << stage << "): " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    log << "hjbmc: invalid input in " << stage << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "hjbmc: " << stage << " failed: " << e.what() << '\n';
    return kExitNumerical;
  }
}

int main_with_args(int argc, char** argv) {
  CLI::App app{"Monte Carlo solver for HJB equations by control randomization"};
  std::string config_file, problem, paths, steps, intensity, output_dir, fixed_grid, moneyness;
  std::uint64_t seed = 0;
  std::size_t threads = 0, dump_paths = 0;
  bool emit_policy = false, no_truncation = false, reuse_paths = false, sub_price = false, no_runtime = false;

  auto* o_config = app.add_option("--config", config_file, "JSON run configuration (flags override it)");
  auto* o_problem = app.add_option("--problem", problem, "preset name");
  auto* o_paths = app.add_option("--paths", paths, "path counts, e.g. 2^16..2^21 or 65536,2^18");
  auto* o_steps = app.add_option("--steps", steps, "time steps, e.g. 8,16,32 or 8..128");
  auto* o_seed = app.add_option("--seed", seed, "master seed");
  auto* o_intensity = app.add_option("--intensity", intensity, "jump intensity of the randomized control, or auto");
  auto* o_threads = app.add_option("--threads", threads, "worker thread cap (results do not depend on it)");
  auto* o_out = app.add_option("--output-dir", output_dir, "directory for reports");
  auto* o_emit = app.add_flag("--emit-policy", emit_policy, "write the policy table (and LQ coefficients)");
  auto* o_notrunc = app.add_flag("--no-truncation", no_truncation, "disable all localization clamps");
  auto* o_fixed = app.add_option("--fixed-control-grid", fixed_grid, "constant controls to price, e.g. rho=-0.8,0,0.8");
  auto* o_money = app.add_option("--moneyness", moneyness, "S1(0) - 50 sweep, e.g. -10..10");
  auto* o_reuse = app.add_flag("--reuse-paths", reuse_paths, "evaluate the policy on the solver's Brownian draws");
  auto* o_sub = app.add_flag("--sub-price", sub_price, "also solve the inf problem");
  auto* o_dump = app.add_option("--dump-paths", dump_paths, "write the first K simulated paths");
  auto* o_noruntime = app.add_flag("--no-runtime", no_runtime, "leave the runtime_s column empty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  RunConfig config;
  try {
    if (*o_config) {
      std::ifstream f(config_file);
      if (!f) throw ConfigError("cannot read config file " + config_file);
      std::stringstream ss;
      ss << f.rdbuf();
      apply_json(config, ss.str());
    }
    if (*o_problem) config.problem = problem;
    if (*o_paths) config.paths = parse_paths(paths);
    if (*o_steps) config.steps = parse_steps(steps);
    if (*o_seed) config.seed = seed;
    if (*o_intensity) config.intensity = parse_intensity(intensity);
    if (*o_threads) config.threads = threads;
    if (*o_out) config.output_dir = output_dir;
    if (*o_emit) config.emit_policy = emit_policy;
    if (*o_notrunc) config.truncation = !no_truncation;
    if (*o_fixed) config.fixed_control_grid = parse_fixed_control_grid(fixed_grid);
    if (*o_money) config.moneyness = parse_range(moneyness);
    if (*o_reuse) config.reuse_paths = reuse_paths;
    if (*o_sub) config.sub_price = sub_price;
    if (*o_dump) config.dump_paths = dump_paths;
    if (*o_noruntime) config.runtime_column = !no_runtime;
  } catch (const ConfigError& e) {
    std::cerr << "hjbmc: configuration error: " << e.what() << '\n';
    return kExitConfig;
  }
  return run(config, std::cerr);
}

}  // namespace hjbmc::cli
