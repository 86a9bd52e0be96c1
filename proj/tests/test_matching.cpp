#include <catch_amalgamated.hpp>

#include "nomamec/matching.hpp"

using namespace nomamec;

namespace {

struct Fixture {
  ScenarioConfig config;
  ChannelRealization channels;
  std::vector<TaskSpec> tasks;

  Fixture(std::size_t n, std::size_t m, std::size_t k, std::size_t l, std::uint64_t seed,
          std::size_t capacity = 0) {
    config = make_uniform_config(n, m, k, l);
    if (capacity) config.server_capacity.assign(k, capacity);
    channels = generate_channels(generate_topology(config, seed), config, seed + 100);
    for (std::size_t u = 0; u < n; ++u) tasks.push_back(make_task(1e5 * (1 + u), 0.5));
  }

  MatchingContext context(AssociationLayout layout = {}) const {
    return MatchingContext{config, channels, tasks, layout, {}};
  }
};

}  // namespace

TEST_CASE("initial matching is feasible and rejects capacity shortfall") {
  Fixture f(3, 2, 2, 3, 4);
  const Matching m = initial_matching(f.config, f.channels);
  REQUIRE_FALSE(check_matching(f.config, m).has_value());
  // Two real helpers for three UEs: one UE gets the padding helper.
  int dumb = 0;
  for (const auto& u : m.units) dumb += f.config.is_dumb_helper(static_cast<std::size_t>(u.helper));
  REQUIRE(dumb == 1);

  Fixture tight(3, 3, 1, 3, 4, 2);
  REQUIRE_THROWS_AS(initial_matching(tight.config, tight.channels), ModelError);
}

TEST_CASE("swap and leave/join reject no-ops and infeasible results") {
  Fixture f(2, 3, 2, 3, 7, 1);
  Matching m;
  m.units = {{0, 0, 0}, {1, 1, 1}};
  REQUIRE(apply_ss(f.config, m, Role::Helper, 0, 1).has_value());
  REQUIRE_FALSE(apply_ss(f.config, m, Role::Helper, 0, 0).has_value());
  // Capacity one per server: moving UE 0 onto server 1 overflows it.
  REQUIRE_FALSE(apply_lj(f.config, m, Role::Server, 0, 1).has_value());
  // Helper 1 is taken; helper 2 is free.
  REQUIRE_FALSE(apply_lj(f.config, m, Role::Helper, 0, 1).has_value());
  const auto moved = apply_lj(f.config, m, Role::Helper, 0, 2);
  REQUIRE(moved.has_value());
  REQUIRE(moved->units[0].helper == 2);
  REQUIRE_FALSE(apply_lj(f.config, m, Role::Rb, 1, 1).has_value());

  const auto swapped = apply_ss(f.config, m, Role::Ue, 0, 1);
  REQUIRE(swapped.has_value());
  REQUIRE(swapped->units[0] == m.units[1]);
  REQUIRE(swapped->units[1] == m.units[0]);
}

TEST_CASE("strict swaps need every slot to differ") {
  Fixture f(2, 2, 1, 2, 3);
  Matching m;
  m.units = {{0, 0, 0}, {1, 0, 1}};
  REQUIRE(apply_ss(f.config, m, Role::Helper, 0, 1).has_value());
  REQUIRE_FALSE(apply_ss(f.config, m, Role::Helper, 0, 1, {}, true).has_value());
}

TEST_CASE("canonical key identifies matchings") {
  Matching a, b;
  a.units = {{0, 0, 1}, {1, 1, 0}};
  b = a;
  REQUIRE(canonical_key(a) == canonical_key(b));
  b.units[0].rb = 0;
  b.units[1].rb = 1;
  REQUIRE(canonical_key(a) != canonical_key(b));
}

TEST_CASE("search descends strictly and stops at a stable matching") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Fixture f(3, 3, 2, 3, seed);
    const MatchingContext ctx = f.context();
    UtilityCache cache;
    const SearchResult r = fs_urhsm(ctx, cache);
    REQUIRE(r.stable);
    REQUIRE(r.utility_trace.size() == r.accepted + 1);
    for (std::size_t i = 1; i < r.utility_trace.size(); ++i)
      REQUIRE(r.utility_trace[i] < r.utility_trace[i - 1] - 1e-9);
    REQUIRE_FALSE(check_matching(f.config, r.matching).has_value());
    REQUIRE_FALSE(find_blocking(ctx, r.matching, cache).has_value());
    REQUIRE(r.utility == r.utility_trace.back());
  }
}

TEST_CASE("worker count does not change the search outcome") {
  Fixture f(3, 4, 2, 3, 9);
  const MatchingContext ctx = f.context();
  UtilityCache serial_cache, parallel_cache;
  SearchOptions serial, parallel;
  parallel.workers = 3;
  const SearchResult a = fs_urhsm(ctx, serial_cache, serial);
  const SearchResult b = fs_urhsm(ctx, parallel_cache, parallel);
  REQUIRE(a.matching == b.matching);
  REQUIRE(a.utility == b.utility);
  REQUIRE(a.operations == b.operations);
}

TEST_CASE("relabeling unmatched helpers leaves the utility unchanged") {
  Fixture f(2, 4, 2, 2, 5);
  const MatchingContext ctx = f.context();
  UtilityCache cache;
  Matching a, b;
  a.units = {{0, 0, 0}, {1, 1, 1}};
  b = a;
  // Helpers 2 and 3 are unmatched in both; only the matched triples matter.
  REQUIRE(utility(ctx, a, cache) == utility(ctx, b, cache));

  // Padding helpers are interchangeable.
  Fixture pad(3, 1, 2, 3, 5);
  const MatchingContext pctx = pad.context();
  Matching p1, p2;
  p1.units = {{0, 0, 0}, {1, 1, 1}, {2, 0, 2}};
  p2.units = {{0, 0, 0}, {2, 1, 1}, {1, 0, 2}};
  REQUIRE(pad.config.is_dumb_helper(1));
  REQUIRE(utility(pctx, p1, cache) == Catch::Approx(utility(pctx, p2, cache)).epsilon(1e-12));
}

TEST_CASE("exhaustive search never loses to the local search") {
  for (std::uint64_t seed : {11, 12}) {
    Fixture f(2, 2, 1, 2, seed);
    const MatchingContext ctx = f.context();
    UtilityCache cache;
    const ExhaustiveResult es = exhaustive_search(ctx, cache);
    const SearchResult fs = fs_urhsm(ctx, cache);
    REQUIRE(es.enumerated == count_matchings(f.config));
    REQUIRE(es.utility <= fs.utility + 1e-12);
  }
}

TEST_CASE("exhaustive search refuses oversized instances") {
  Fixture f(3, 4, 2, 4, 1);
  const MatchingContext ctx = f.context();
  UtilityCache cache;
  REQUIRE(count_matchings(f.config) > 10);
  REQUIRE_THROWS_AS(exhaustive_search(ctx, cache, {}, 10), SearchGuardError);
}

TEST_CASE("cache returns stored entries without new solves") {
  Fixture f(2, 2, 2, 2, 6);
  const MatchingContext ctx = f.context();
  UtilityCache cache;
  const Matching m = initial_matching(f.config, f.channels);
  const double first = utility(ctx, m, cache);
  const std::size_t solves = cache.solves();
  REQUIRE(utility(ctx, m, cache) == first);
  REQUIRE(cache.solves() == solves);
  REQUIRE(cache.hits() >= 1);
}
