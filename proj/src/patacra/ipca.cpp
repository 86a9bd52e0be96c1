#include <cmath>

#include "patacra/subproblem.hpp"

namespace nomamec {

namespace detail {

SurrogateParams floored_params(std::size_t n_ues) {
  return SurrogateParams(n_ues, {kSurrogateFloor, kSurrogateFloor, kServerSurrogateFloor,
                                 kServerSurrogateFloor});
}

SurrogateParams start_params(const std::vector<UeContext>& ctx, const FixedFrequencies& f,
                             const ScenarioConfig& config) {
  SurrogateParams params = floored_params(ctx.size());
  for (std::size_t n = 0; n < ctx.size(); ++n)
    if (auto a = heuristic_start(ctx[n], f.f_s[n], f.f_h[n], config)) params[n] = params_at(ctx[n], *a);
  return params;
}

namespace {

conic::SolveResult solve_built(const Built& built, const std::vector<double>* warm) {
  conic::SolverOptions opts;
  if (warm) opts.warm_start = *warm;
  conic::SolveResult r = conic::solve(built.program, opts);
  if (!r.ok() && warm) r = conic::solve(built.program, {});
  return r;
}

}  // namespace

PatacraSolution run_ipca(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                         SurrogateParams params, const PatacraOptions& options,
                         const FixedFrequencies* fixed) {
  const double eps = options.epsilon.value_or(config.ipca_epsilon);
  PatacraSolution sol;
  sol.surrogate_residual = 0.0;

  Built built = build_program(ctx, config, params, options.objective, fixed);
  conic::SolveResult result = solve_built(built, nullptr);
  if (!result.ok()) {
    params = floored_params(ctx.size());
    built = build_program(ctx, config, params, options.objective, fixed);
    result = solve_built(built, nullptr);
  }
  if (!result.ok()) {
    sol.status = result.status == conic::SolveStatus::Infeasible ? PatacraStatus::Infeasible
                                                                 : PatacraStatus::NumericalFailure;
    sol.alloc.ues.resize(ctx.size());
    sol.alloc.phi = kInfinity;
    sol.final_params = params;
    return sol;
  }

  sol.status = PatacraStatus::IterationLimit;
  for (int it = 1;; ++it) {
    sol.alloc = extract_allocation(built, result, ctx, fixed);
    sol.phi_trace.push_back(result.objective);
    sol.iterations = it;
    if (options.check_surrogates)
      sol.surrogate_residual = std::max(sol.surrogate_residual, surrogate_residual(built, result, ctx));
    params = next_params(built, result, params);
    sol.final_params = params;
    const std::size_t k = sol.phi_trace.size();
    if (k >= 2 && std::abs(sol.phi_trace[k - 1] - sol.phi_trace[k - 2]) < eps) {
      sol.status = PatacraStatus::Converged;
      break;
    }
    if (it >= options.max_iterations) break;

    Built next = build_program(ctx, config, params, options.objective, fixed);
    conic::SolveResult next_result = solve_built(next, options.warm_start ? &result.x : nullptr);
    if (!next_result.ok()) {
      // The previous iterate stays the reported allocation.
      sol.status = PatacraStatus::Stalled;
      break;
    }
    built = std::move(next);
    result = std::move(next_result);
  }
  return sol;
}

}  // namespace detail

std::vector<UeLink> resolve_links(const ScenarioConfig& config, const ChannelRealization& channels,
                                  const Matching& matching, const LinkModel& model) {
  std::vector<UeLink> links;
  links.reserve(matching.units.size());
  for (std::size_t n = 0; n < matching.units.size(); ++n)
    links.push_back(resolve_link(config, channels, matching.units[n], n, model));
  return links;
}

SurrogateParams initial_point(const Matching& matching, const ChannelRealization& channels,
                              const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                              const LinkModel& model) {
  const auto ctx = detail::make_contexts(config, channels, matching, tasks, model);
  return detail::start_params(ctx, detail::equal_split(ctx, config), config);
}

SurrogateParams params_from_allocation(const ContinuousAllocation& alloc,
                                       const std::vector<UeLink>& links,
                                       const std::vector<TaskSpec>& tasks,
                                       const ScenarioConfig& config) {
  if (alloc.ues.size() != links.size() || tasks.size() != links.size())
    throw ModelError("allocation/links/tasks size mismatch");
  SurrogateParams params(links.size());
  for (std::size_t n = 0; n < links.size(); ++n)
    params[n] = detail::params_at(detail::make_context(links[n], tasks[n], config, n), alloc.ues[n]);
  return params;
}

BuiltSubproblem build_subproblem(const Matching& matching, const ChannelRealization& channels,
                                 const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                                 const SurrogateParams& params, const PatacraOptions& options) {
  const auto ctx = detail::make_contexts(config, channels, matching, tasks, options.link);
  detail::Built built = detail::build_program(ctx, config, params, options.objective, nullptr);
  return {std::move(built.program), built.phi};
}

PatacraSolution solve_patacra(const Matching& matching, const ChannelRealization& channels,
                              const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                              const PatacraOptions& options) {
  const auto ctx = detail::make_contexts(config, channels, matching, tasks, options.link);
  auto params = detail::start_params(ctx, detail::equal_split(ctx, config), config);
  return detail::run_ipca(ctx, config, std::move(params), options, nullptr);
}

}  // namespace nomamec
