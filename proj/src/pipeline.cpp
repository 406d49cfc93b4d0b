#include "hjbmc/pipeline.hpp"

#include <chrono>

namespace hjbmc {

EstimateResult run_estimate(const Problem& problem, const Basis& basis, const EstimateOptions& options,
                            std::optional<double> reference) {
  const auto start = std::chrono::steady_clock::now();
  problem.validate();
  const TimeGrid grid = make_uniform_grid(problem.horizon, options.steps);
  const RngPolicy solver_rng{options.seed, kSolverStream};

  EstimateResult out;
  out.intensity = options.intensity.value_or(default_intensity(problem.horizon));
  {
    const bool increments =
        options.record_increments || options.solver.force_z || problem.reward_depends_on_z;
    ControlPaths controls = simulate_control(problem, grid, options.paths, solver_rng, out.intensity);
    const RandomizedPathSet paths = simulate_forward(problem, std::move(controls), grid, solver_rng, increments);
    if (options.inspect_paths) options.inspect_paths(paths);
    out.truncation = options.truncation
                         ? compute_bounds(problem, grid, terminal_state_radius(paths, options.state_std_multiple),
                                          options.r_w)
                         : TruncationSpec::disabled(problem.dim_x);
    out.backward = backward_solve(paths, problem, basis, out.truncation, options.solver);
  }

  const RngPolicy eval_rng = options.reuse_paths ? solver_rng : solver_rng.with_stream(kEvaluationStream);
  const std::size_t eval_paths = options.eval_paths ? options.eval_paths : options.paths;
  out.evaluation = evaluate_policy(problem, out.backward.policy, grid, eval_paths, eval_rng);

  EstimateReport& r = out.report;
  r.problem = problem.name;
  r.basis = basis.name;
  r.paths = options.paths;
  r.steps = options.steps;
  r.seed = options.seed;
  r.p1 = out.backward.p1;
  r.p1_stderr = out.backward.p1_stderr;
  r.p2 = out.evaluation.value;
  r.p2_stderr = out.evaluation.std_error;
  r.mid = mid_estimate(r.p1, r.p2);
  r.ref_value = reference;
  r.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hjbmc
