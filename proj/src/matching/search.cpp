#include <future>

#include "nomamec/matching.hpp"

namespace nomamec {

namespace {

/// Index of the first operation whose utility beats `current` by more than
/// the margin. Evaluates in batches of `workers`; the answer is independent
/// of the batch size.
std::optional<std::size_t> first_improving(const MatchingContext& ctx,
                                           const std::vector<Operation>& ops, UtilityCache& cache,
                                           double current, const SearchOptions& options,
                                           double* found_utility) {
  const std::size_t batch = options.workers > 1 ? static_cast<std::size_t>(options.workers) : 1;
  for (std::size_t start = 0; start < ops.size(); start += batch) {
    const std::size_t end = std::min(ops.size(), start + batch);
    std::vector<double> values(end - start);
    if (batch == 1) {
      values[0] = utility(ctx, ops[start].result, cache);
    } else {
      std::vector<std::future<double>> jobs;
      for (std::size_t i = start; i < end; ++i)
        jobs.push_back(std::async(std::launch::async,
                                  [&, i] { return utility(ctx, ops[i].result, cache); }));
      for (std::size_t i = 0; i < jobs.size(); ++i) values[i] = jobs[i].get();
    }
    for (std::size_t i = 0; i < values.size(); ++i)
      if (values[i] < current - options.margin) {
        *found_utility = values[i];
        return start + i;
      }
  }
  return std::nullopt;
}

std::vector<Operation> candidates(const MatchingContext& ctx, const Matching& m, Role role,
                                  bool swap, const SearchOptions& options) {
  return swap ? swap_candidates(ctx.config, m, role, ctx.layout, options.strict_swaps)
              : leave_join_candidates(ctx.config, m, role, ctx.layout);
}

}  // namespace

SearchResult fs_urhsm(const MatchingContext& ctx, UtilityCache& cache, const SearchOptions& options) {
  return fs_urhsm(ctx, cache, initial_matching(ctx.config, ctx.channels, ctx.layout), options);
}

SearchResult fs_urhsm(const MatchingContext& ctx, UtilityCache& cache, const Matching& start,
                      const SearchOptions& options) {
  SearchResult r;
  Matching current = start;
  double u = utility(ctx, current, cache);
  r.utility_trace.push_back(u);
  bool budget_left = true;
  while (budget_left) {
    ++r.sweeps;
    bool accepted_any = false;
    for (bool swap : {true, false}) {
      const auto roles = swap ? swap_roles(ctx.layout) : leave_join_roles(ctx.config, ctx.layout);
      for (Role role : roles) {
        while (budget_left) {
          const auto ops = candidates(ctx, current, role, swap, options);
          double next = kInfinity;
          const auto idx = first_improving(ctx, ops, cache, u, options, &next);
          if (!idx) break;
          current = ops[*idx].result;
          u = next;
          r.utility_trace.push_back(u);
          r.operations.push_back(ops[*idx].describe());
          ++r.accepted;
          accepted_any = true;
          budget_left = r.accepted < options.max_operations;
        }
      }
    }
    if (!accepted_any) {
      r.stable = true;
      break;
    }
  }
  const auto entry = evaluate(ctx, current, cache);
  r.matching = std::move(current);
  r.solution = entry->solution;
  r.utility = entry->phi;
  return r;
}

std::optional<Operation> find_blocking(const MatchingContext& ctx, const Matching& matching,
                                       UtilityCache& cache, const SearchOptions& options) {
  const double u = utility(ctx, matching, cache);
  for (bool swap : {true, false}) {
    const auto roles = swap ? swap_roles(ctx.layout) : leave_join_roles(ctx.config, ctx.layout);
    for (Role role : roles) {
      auto ops = candidates(ctx, matching, role, swap, options);
      double next = kInfinity;
      if (const auto idx = first_improving(ctx, ops, cache, u, options, &next))
        return std::move(ops[*idx]);
    }
  }
  return std::nullopt;
}

}  // namespace nomamec
