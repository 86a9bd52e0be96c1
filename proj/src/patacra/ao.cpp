#include <cmath>

#include "patacra/subproblem.hpp"

namespace nomamec {

PatacraSolution solve_ao(const Matching& matching, const ChannelRealization& channels,
                         const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                         const AoOptions& options) {
  const auto ctx = detail::make_contexts(config, channels, matching, tasks, options.patacra.link);
  const double eps = options.patacra.epsilon.value_or(config.ipca_epsilon);

  detail::FixedFrequencies f = detail::equal_split(ctx, config);
  if (options.initial_f) {
    if (options.initial_f->size() != ctx.size()) throw ModelError("initial_f size mismatch");
    f.f_s = *options.initial_f;
  }
  std::vector<UeLink> links;
  links.reserve(ctx.size());
  for (const auto& c : ctx) links.push_back(c.link);

  PatacraSolution out;
  out.surrogate_residual = 0.0;
  std::optional<ContinuousAllocation> previous = options.initial_alloc;

  for (int round = 1; round <= options.max_rounds; ++round) {
    // Block A: transmission and split with the server shares pinned.
    SurrogateParams params = previous ? params_from_allocation(*previous, links, tasks, config)
                                      : detail::start_params(ctx, f, config);
    PatacraSolution block_a = detail::run_ipca(ctx, config, std::move(params), options.patacra, &f);
    out.surrogate_residual = std::max(out.surrogate_residual, block_a.surrogate_residual);
    if (block_a.phi_trace.empty()) {
      if (round == 1) return block_a;
      out.status = PatacraStatus::Stalled;
      break;
    }

    // Block B: server shares with transmission and split pinned.
    detail::Built built = detail::build_frequency_block(ctx, config, block_a.alloc, options.patacra.objective);
    const conic::SolveResult result = conic::solve(built.program);
    if (!result.ok()) {
      out.status = PatacraStatus::Stalled;
      if (out.phi_trace.empty()) {
        out.alloc = block_a.alloc;
        out.phi_trace.push_back(block_a.alloc.phi);
      }
      break;
    }
    ContinuousAllocation alloc = detail::extract_frequency_block(built, result, ctx, block_a.alloc);
    out.alloc = alloc;
    out.final_params = block_a.final_params;
    out.phi_trace.push_back(alloc.phi);
    out.iterations = round;
    for (std::size_t n = 0; n < ctx.size(); ++n) {
      f.f_s[n] = alloc.ues[n].f_s;
      if (ctx[n].link.helper_kind == HelperKind::Server) f.f_h[n] = alloc.ues[n].f_h;
    }
    previous = std::move(alloc);

    const std::size_t k = out.phi_trace.size();
    if (k >= 2 && std::abs(out.phi_trace[k - 1] - out.phi_trace[k - 2]) < eps) {
      out.status = PatacraStatus::Converged;
      break;
    }
    out.status = PatacraStatus::IterationLimit;
  }
  return out;
}

}  // namespace nomamec
