#include <algorithm>
#include <numeric>
#include <sstream>

#include "nomamec/matching.hpp"

namespace nomamec {

const char* to_string(Role role) {
  switch (role) {
    case Role::Ue: return "ue";
    case Role::Helper: return "helper";
    case Role::Server: return "server";
    case Role::Rb: return "rb";
    case Role::SecondServer: return "server2";
    case Role::SecondRb: return "rb2";
  }
  return "unknown";
}

namespace {

int& slot(MatchingUnit& u, Role role) {
  switch (role) {
    case Role::Helper: return u.helper;
    case Role::Server: return u.server;
    case Role::Rb: return u.rb;
    case Role::SecondServer: return u.server2;
    case Role::SecondRb: return u.rb2;
    case Role::Ue: break;
  }
  throw ModelError("role has no single slot");
}

std::size_t server_slots_per_ue(const AssociationLayout& layout) { return layout.second_server ? 2 : 1; }
std::size_t rb_slots_per_ue(const AssociationLayout& layout) { return layout.second_rb ? 2 : 1; }

std::vector<std::size_t> server_load(const ScenarioConfig& config, const Matching& m) {
  std::vector<std::size_t> load(config.n_servers, 0);
  for (const MatchingUnit& u : m.units) {
    if (u.server >= 0) ++load[static_cast<std::size_t>(u.server)];
    if (u.server2 >= 0) ++load[static_cast<std::size_t>(u.server2)];
  }
  return load;
}

std::vector<bool> used_rbs(const ScenarioConfig& config, const Matching& m) {
  std::vector<bool> used(config.n_rbs, false);
  for (const MatchingUnit& u : m.units) {
    if (u.rb >= 0) used[static_cast<std::size_t>(u.rb)] = true;
    if (u.rb2 >= 0) used[static_cast<std::size_t>(u.rb2)] = true;
  }
  return used;
}

std::vector<bool> used_helpers(const ScenarioConfig& config, const Matching& m) {
  std::vector<bool> used(config.helper_slots(), false);
  for (const MatchingUnit& u : m.units)
    if (u.helper >= 0) used[static_cast<std::size_t>(u.helper)] = true;
  return used;
}

std::optional<Matching> feasible_or_none(const ScenarioConfig& config, Matching m,
                                         const AssociationLayout& layout) {
  if (check_matching(config, m, layout)) return std::nullopt;
  return m;
}

}  // namespace

MatchingState make_state(const ScenarioConfig& config, Matching matching,
                         const AssociationLayout& layout) {
  MatchingState s;
  const auto helpers = used_helpers(config, matching);
  const auto rbs = used_rbs(config, matching);
  const auto load = server_load(config, matching);
  if (layout.helper)
    for (std::size_t m = 0; m < helpers.size(); ++m)
      (helpers[m] ? s.helpers_matched : s.helpers_unmatched).push_back(static_cast<int>(m));
  for (std::size_t l = 0; l < rbs.size(); ++l)
    (rbs[l] ? s.rbs_matched : s.rbs_unmatched).push_back(static_cast<int>(l));
  for (std::size_t k = 0; k < load.size(); ++k) {
    if (load[k] > 0) s.servers_matched.push_back(static_cast<int>(k));
    if (load[k] < config.server_capacity[k]) s.servers_with_slack.push_back(static_cast<int>(k));
  }
  s.matching = std::move(matching);
  return s;
}

std::string canonical_key(const Matching& matching) {
  std::ostringstream os;
  for (std::size_t n = 0; n < matching.units.size(); ++n) {
    const MatchingUnit& u = matching.units[n];
    os << n << ':' << u.helper << ',' << u.server << ',' << u.rb << ',' << u.server2 << ',' << u.rb2 << ';';
  }
  return os.str();
}

std::shared_ptr<const UtilityCache::Entry> UtilityCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return nullptr;
  ++hits_;
  return it->second;
}

std::shared_ptr<const UtilityCache::Entry> UtilityCache::insert(const std::string& key,
                                                                PatacraSolution solution) {
  ++solves_;
  auto entry = std::make_shared<const Entry>(Entry{solution.phi(), std::move(solution)});
  std::lock_guard lock(mutex_);
  return entries_.try_emplace(key, std::move(entry)).first->second;
}

std::size_t UtilityCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::shared_ptr<const UtilityCache::Entry> evaluate(const MatchingContext& ctx,
                                                    const Matching& matching, UtilityCache& cache) {
  if (auto err = check_matching(ctx.config, matching, ctx.layout)) throw ModelError("utility of infeasible matching: " + *err);
  const std::string key = canonical_key(matching);
  if (auto hit = cache.find(key)) return hit;
  return cache.insert(key, solve_patacra(matching, ctx.channels, ctx.tasks, ctx.config, ctx.patacra));
}

double utility(const MatchingContext& ctx, const Matching& matching, UtilityCache& cache) {
  return evaluate(ctx, matching, cache)->phi;
}

Matching initial_matching(const ScenarioConfig& config, const ChannelRealization& channels,
                          const AssociationLayout& layout) {
  const std::size_t n_ues = config.n_ues;
  if (config.total_server_capacity() < n_ues * server_slots_per_ue(layout))
    throw ModelError("server capacity below the number of server slots");
  if (config.n_rbs < n_ues * rb_slots_per_ue(layout)) throw ModelError("fewer RBs than RB slots");
  if (layout.second_server && config.n_servers < 2) throw ModelError("layout needs two servers");

  Matching m;
  m.units.resize(n_ues);
  std::vector<bool> helper_used(config.helper_slots(), false), rb_used(config.n_rbs, false);
  std::vector<std::size_t> load(config.n_servers, 0);

  auto mean_server_gain = [&](std::size_t n, std::size_t k) {
    double s = 0.0;
    for (std::size_t l = 0; l < config.n_rbs; ++l) s += channels.server(n, k, l);
    return s;
  };
  auto pick_server = [&](std::size_t n, int exclude) {
    int best = kUnassigned;
    for (std::size_t k = 0; k < config.n_servers; ++k) {
      if (static_cast<int>(k) == exclude || load[k] >= config.server_capacity[k]) continue;
      if (best < 0) { best = static_cast<int>(k); continue; }
      const auto b = static_cast<std::size_t>(best);
      if (load[k] < load[b] || (load[k] == load[b] && mean_server_gain(n, k) > mean_server_gain(n, b)))
        best = static_cast<int>(k);
    }
    if (best < 0) throw ModelError("no server with room");
    ++load[static_cast<std::size_t>(best)];
    return best;
  };
  auto pick_rb = [&](std::size_t n, int server) {
    int best = kUnassigned;
    double best_gain = -1.0;
    for (std::size_t l = 0; l < config.n_rbs; ++l) {
      if (rb_used[l]) continue;
      const double g = channels.server(n, static_cast<std::size_t>(server), l);
      if (g > best_gain) { best_gain = g; best = static_cast<int>(l); }
    }
    rb_used[static_cast<std::size_t>(best)] = true;
    return best;
  };

  for (std::size_t n = 0; n < n_ues; ++n) {
    MatchingUnit& u = m.units[n];
    if (layout.helper) {
      double best_gain = -1.0;
      for (std::size_t h = 0; h < config.helper_slots(); ++h) {
        if (helper_used[h]) continue;
        double g = 0.0;  // dumb helpers rank last
        if (!config.is_dumb_helper(h))
          for (std::size_t l = 0; l < config.n_rbs; ++l) g += channels.helper(n, h, l);
        if (g > best_gain) { best_gain = g; u.helper = static_cast<int>(h); }
      }
      helper_used[static_cast<std::size_t>(u.helper)] = true;
    }
    u.server = pick_server(n, kUnassigned);
    if (layout.second_server) u.server2 = pick_server(n, u.server);
    u.rb = pick_rb(n, u.server);
    if (layout.second_rb) u.rb2 = pick_rb(n, u.server);
  }
  if (auto err = check_matching(config, m, layout)) throw ModelError("initial matching: " + *err);
  return m;
}

std::optional<Matching> apply_ss(const ScenarioConfig& config, const Matching& matching, Role role,
                                 std::size_t n1, std::size_t n2, const AssociationLayout& layout,
                                 bool strict) {
  if (n1 == n2 || n1 >= matching.units.size() || n2 >= matching.units.size()) return std::nullopt;
  Matching out = matching;
  MatchingUnit& a = out.units[n1];
  MatchingUnit& b = out.units[n2];
  if (strict && ((layout.helper && a.helper == b.helper) || a.server == b.server || a.rb == b.rb))
    return std::nullopt;
  if (role == Role::Ue) {
    std::swap(a, b);
  } else {
    int& x = slot(a, role);
    int& y = slot(b, role);
    if (x == y) return std::nullopt;
    std::swap(x, y);
  }
  return feasible_or_none(config, std::move(out), layout);
}

std::optional<Matching> apply_lj(const ScenarioConfig& config, const Matching& matching, Role role,
                                 std::size_t n, int target, const AssociationLayout& layout) {
  if (n >= matching.units.size() || role == Role::Ue || target < 0) return std::nullopt;
  Matching out = matching;
  int& x = slot(out.units[n], role);
  if (x == target) return std::nullopt;
  switch (role) {
    case Role::Helper:
      if (static_cast<std::size_t>(target) >= config.helper_slots() ||
          used_helpers(config, matching)[static_cast<std::size_t>(target)])
        return std::nullopt;
      break;
    case Role::Rb:
    case Role::SecondRb:
      if (static_cast<std::size_t>(target) >= config.n_rbs ||
          used_rbs(config, matching)[static_cast<std::size_t>(target)])
        return std::nullopt;
      break;
    case Role::Server:
    case Role::SecondServer: {
      const auto k = static_cast<std::size_t>(target);
      if (k >= config.n_servers || server_load(config, matching)[k] >= config.server_capacity[k])
        return std::nullopt;
      break;
    }
    case Role::Ue: break;
  }
  x = target;
  return feasible_or_none(config, std::move(out), layout);
}

std::string Operation::describe() const {
  std::ostringstream os;
  if (kind == Kind::Swap) os << "SS " << to_string(role) << " units " << unit << "<->" << other_unit;
  else os << "LJ " << to_string(role) << " unit " << unit << " -> " << target;
  return os.str();
}

std::vector<Role> swap_roles(const AssociationLayout& layout) {
  std::vector<Role> roles{Role::Ue};
  if (layout.helper) roles.push_back(Role::Helper);
  roles.push_back(Role::Server);
  roles.push_back(Role::Rb);
  if (layout.second_server) roles.push_back(Role::SecondServer);
  if (layout.second_rb) roles.push_back(Role::SecondRb);
  return roles;
}

std::vector<Role> leave_join_roles(const ScenarioConfig& config, const AssociationLayout& layout) {
  std::vector<Role> roles;
  const std::size_t n = config.n_ues;
  if (layout.helper && config.helper_slots() > n) roles.push_back(Role::Helper);
  if (config.total_server_capacity() > n * server_slots_per_ue(layout)) {
    roles.push_back(Role::Server);
    if (layout.second_server) roles.push_back(Role::SecondServer);
  }
  if (config.n_rbs > n * rb_slots_per_ue(layout)) {
    roles.push_back(Role::Rb);
    if (layout.second_rb) roles.push_back(Role::SecondRb);
  }
  return roles;
}

std::vector<Operation> swap_candidates(const ScenarioConfig& config, const Matching& matching,
                                       Role role, const AssociationLayout& layout, bool strict) {
  std::vector<Operation> ops;
  for (std::size_t a = 0; a < matching.units.size(); ++a)
    for (std::size_t b = a + 1; b < matching.units.size(); ++b)
      if (auto m = apply_ss(config, matching, role, a, b, layout, strict)) {
        Operation op;
        op.kind = Operation::Kind::Swap;
        op.role = role;
        op.unit = a;
        op.other_unit = b;
        op.result = std::move(*m);
        ops.push_back(std::move(op));
      }
  return ops;
}

std::vector<Operation> leave_join_candidates(const ScenarioConfig& config, const Matching& matching,
                                             Role role, const AssociationLayout& layout) {
  std::size_t universe = 0;
  switch (role) {
    case Role::Helper: universe = config.helper_slots(); break;
    case Role::Server:
    case Role::SecondServer: universe = config.n_servers; break;
    case Role::Rb:
    case Role::SecondRb: universe = config.n_rbs; break;
    case Role::Ue: return {};
  }
  // Dumb helpers are interchangeable: only the lowest free one is a distinct target.
  int dumb_target = kUnassigned;
  if (role == Role::Helper) {
    const auto used = used_helpers(config, matching);
    for (std::size_t h = config.n_helpers; h < config.helper_slots(); ++h)
      if (!used[h]) { dumb_target = static_cast<int>(h); break; }
  }
  std::vector<Operation> ops;
  for (std::size_t n = 0; n < matching.units.size(); ++n)
    for (std::size_t x = 0; x < universe; ++x) {
      if (role == Role::Helper && config.is_dumb_helper(x) && static_cast<int>(x) != dumb_target) continue;
      if (auto m = apply_lj(config, matching, role, n, static_cast<int>(x), layout)) {
        Operation op;
        op.kind = Operation::Kind::LeaveJoin;
        op.role = role;
        op.unit = n;
        op.target = static_cast<int>(x);
        op.result = std::move(*m);
        ops.push_back(std::move(op));
      }
    }
  return ops;
}

}  // namespace nomamec
