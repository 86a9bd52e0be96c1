#include <algorithm>
#include <chrono>

#include "nomamec/schemes.hpp"

namespace nomamec {

const char* to_string(SchemeId id) {
  switch (id) {
    case SchemeId::ProposedNoma: return "proposed";
    case SchemeId::FdmaNoHelpers: return "fdma_no_helpers";
    case SchemeId::NomaNoHelpers: return "noma_no_helpers";
    case SchemeId::TdmaWithHelpers: return "tdma_helpers";
    case SchemeId::FdmaWithHelpers: return "fdma_helpers";
    case SchemeId::SumEdtVariant: return "sum_edt";
  }
  return "unknown";
}

const std::vector<SchemeId>& all_schemes() {
  static const std::vector<SchemeId> ids{SchemeId::ProposedNoma,    SchemeId::FdmaNoHelpers,
                                         SchemeId::NomaNoHelpers,   SchemeId::TdmaWithHelpers,
                                         SchemeId::FdmaWithHelpers, SchemeId::SumEdtVariant};
  return ids;
}

std::optional<SchemeId> parse_scheme(const std::string& name) {
  for (SchemeId id : all_schemes())
    if (name == to_string(id)) return id;
  return std::nullopt;
}

SchemeSetup scheme_setup(SchemeId id, const ScenarioConfig& config) {
  SchemeSetup s;
  switch (id) {
    case SchemeId::ProposedNoma:
      break;
    case SchemeId::SumEdtVariant:
      s.patacra.objective = Objective::Sum;
      break;
    case SchemeId::FdmaNoHelpers:
      s.layout.helper = false;
      s.patacra.link = {LinkMode::Fdma, HelperKind::None};
      break;
    case SchemeId::NomaNoHelpers:
      s.layout.helper = false;
      s.layout.second_server = true;
      s.patacra.link = {LinkMode::Noma, HelperKind::Server};
      break;
    case SchemeId::TdmaWithHelpers:
      s.patacra.link = {LinkMode::Tdma, HelperKind::Device};
      break;
    case SchemeId::FdmaWithHelpers:
      s.patacra.link = {LinkMode::Fdma, HelperKind::Device};
      // A second RB per UE when the pool allows it, else half-bands of one RB.
      s.layout.second_rb = config.n_rbs >= 2 * config.n_ues;
      break;
  }
  return s;
}

std::optional<std::string> scheme_inapplicable(SchemeId id, const ScenarioConfig& config) {
  if (id == SchemeId::NomaNoHelpers) {
    if (config.n_servers < 2) return "needs at least two servers";
    if (config.total_server_capacity() < 2 * config.n_ues) return "server capacity below two per UE";
  }
  return std::nullopt;
}

SchemeResult solve_scheme(SchemeId id, const ScenarioConfig& config,
                          const ChannelRealization& channels, const std::vector<TaskSpec>& tasks,
                          const SchemeOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SchemeResult r;
  r.scheme = id;
  if (auto why = scheme_inapplicable(id, config)) {
    r.applicable = false;
    r.note = *why;
    return r;
  }
  const SchemeSetup setup = scheme_setup(id, config);
  r.link = setup.patacra.link;
  r.layout = setup.layout;

  const MatchingContext ctx{config, channels, tasks, setup.layout, setup.patacra};
  UtilityCache local_cache;
  UtilityCache& cache = options.cache ? *options.cache : local_cache;
  SearchResult search = fs_urhsm(ctx, cache, options.search);
  r.matching = search.matching;
  r.solution = std::move(search.solution);
  r.accepted_operations = search.accepted;
  for (const std::string& op : search.operations)
    ++(op.rfind("SS", 0) == 0 ? r.swap_operations : r.leave_join_operations);
  r.sweeps = search.sweeps;
  r.solves = cache.solves();
  r.stable = search.stable;
  r.objective = r.solution.phi();
  if (r.solution.feasible()) {
    const EdtReport rep = evaluate_edt(config, tasks, channels, r.matching, r.solution.alloc, r.link);
    r.medt = rep.medt;
    for (const UeReport& u : rep.ues) {
      r.edt.push_back(u.edt);
      r.energy.push_back(u.energy);
      r.delay.push_back(u.delay);
    }
  } else {
    r.note = to_string(r.solution.status);
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

FairnessReport fairness_report(const SchemeResult& minmax, const SchemeResult& sum) {
  auto spread = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
  };
  auto min_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  };
  FairnessReport f;
  f.spread_minmax = spread(minmax.edt);
  f.spread_sum = spread(sum.edt);
  f.min_edt_minmax = min_of(minmax.edt);
  f.min_edt_sum = min_of(sum.edt);
  f.minmax_spread_not_larger = f.spread_minmax <= f.spread_sum;
  return f;
}

}  // namespace nomamec
