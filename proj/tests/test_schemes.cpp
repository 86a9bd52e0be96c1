#include <catch_amalgamated.hpp>

#include "nomamec/oracle.hpp"
#include "nomamec/schemes.hpp"

using namespace nomamec;

namespace {

struct Fixture {
  ScenarioConfig config;
  ChannelRealization channels;
  std::vector<TaskSpec> tasks;

  Fixture(std::size_t n, std::size_t m, std::size_t k, std::size_t l, std::uint64_t seed,
          double bits = 1e5) {
    config = make_uniform_config(n, m, k, l);
    channels = generate_channels(generate_topology(config, seed), config, seed + 1);
    for (std::size_t u = 0; u < n; ++u) tasks.push_back(make_task(bits, 0.5));
  }
};

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (SchemeId id : all_schemes()) {
    const auto parsed = parse_scheme(to_string(id));
    REQUIRE(parsed.has_value());
    REQUIRE(*parsed == id);
  }
  REQUIRE_FALSE(parse_scheme("nope").has_value());
}

TEST_CASE("empty tasks cost nothing under every scheme") {
  Fixture f(2, 2, 2, 4, 3, 0.0);
  for (SchemeId id : all_schemes()) {
    INFO(to_string(id));
    const SchemeResult r = solve_scheme(id, f.config, f.channels, f.tasks);
    REQUIRE(r.feasible());
    REQUIRE(r.medt == Catch::Approx(0.0).margin(1e-9));
  }
}

TEST_CASE("a helper leg never hurts the orthogonal scheme") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Fixture f(1, 1, 1, 2, seed);
    const SchemeResult with = solve_scheme(SchemeId::FdmaWithHelpers, f.config, f.channels, f.tasks);
    const SchemeResult without = solve_scheme(SchemeId::FdmaNoHelpers, f.config, f.channels, f.tasks);
    REQUIRE(with.feasible());
    REQUIRE(without.feasible());
    REQUIRE(with.medt <= without.medt * (1 + 1e-6));
  }
}

TEST_CASE("two-server scheme is inapplicable with one server") {
  Fixture f(2, 2, 1, 2, 1);
  REQUIRE(scheme_inapplicable(SchemeId::NomaNoHelpers, f.config).has_value());
  const SchemeResult r = solve_scheme(SchemeId::NomaNoHelpers, f.config, f.channels, f.tasks);
  REQUIRE_FALSE(r.applicable);
  REQUIRE_FALSE(r.feasible());
  REQUIRE_FALSE(r.note.empty());
  REQUIRE_FALSE(scheme_inapplicable(SchemeId::ProposedNoma, f.config).has_value());
}

TEST_CASE("orthogonal band layout follows the RB count") {
  Fixture wide(2, 2, 2, 4, 1), narrow(2, 2, 2, 2, 1);
  REQUIRE(scheme_setup(SchemeId::FdmaWithHelpers, wide.config).layout.second_rb);
  REQUIRE_FALSE(scheme_setup(SchemeId::FdmaWithHelpers, narrow.config).layout.second_rb);
  REQUIRE(scheme_setup(SchemeId::NomaNoHelpers, wide.config).layout.second_server);
  REQUIRE_FALSE(scheme_setup(SchemeId::FdmaNoHelpers, wide.config).layout.helper);
}

TEST_CASE("every scheme returns an allocation that replays cleanly") {
  for (std::uint64_t seed : {5, 6}) {
    Fixture f(2, 2, 2, 4, seed);
    for (SchemeId id : all_schemes()) {
      INFO(to_string(id) << " seed " << seed);
      const SchemeResult r = solve_scheme(id, f.config, f.channels, f.tasks);
      REQUIRE(r.feasible());
      REQUIRE(r.stable);
      const SchemeSetup setup = scheme_setup(id, f.config);
      const auto report = oracle::replay_constraints(r.solution.alloc, r.matching, f.channels, f.tasks,
                                                     f.config, r.link, r.layout,
                                                     setup.patacra.objective);
      INFO(report.worst());
      REQUIRE(report.max() <= 1e-6);
      REQUIRE(r.edt.size() == 2);
    }
  }
}

TEST_CASE("sum objective bounds the maximum") {
  Fixture f(3, 3, 2, 3, 4);
  const SchemeResult r = solve_scheme(SchemeId::SumEdtVariant, f.config, f.channels, f.tasks);
  REQUIRE(r.feasible());
  double total = 0.0;
  for (double e : r.edt) total += e;
  REQUIRE(r.objective == Catch::Approx(total).epsilon(1e-6));
  REQUIRE(r.objective >= r.medt);
}

TEST_CASE("fairness report arithmetic") {
  SchemeResult a, b;
  a.edt = {0.5, 0.5};
  b.edt = {0.1, 0.9};
  FairnessReport rep = fairness_report(a, b);
  REQUIRE(rep.spread_minmax == 0.0);
  REQUIRE(rep.spread_sum == Catch::Approx(0.8));
  REQUIRE(rep.minmax_spread_not_larger);
  REQUIRE(rep.min_edt_sum == Catch::Approx(0.1));

  b.edt = {0.5, 0.5};
  rep = fairness_report(a, b);
  REQUIRE(rep.spread_minmax == 0.0);
  REQUIRE(rep.spread_sum == 0.0);
  REQUIRE(rep.minmax_spread_not_larger);
}
