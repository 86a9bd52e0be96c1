#include <catch_amalgamated.hpp>

#include <cmath>

#include "nomamec/oracle.hpp"
#include "nomamec/patacra.hpp"

using namespace nomamec;
using Catch::Approx;

namespace {

struct Single {
  ScenarioConfig config = make_uniform_config(1, 1, 1, 1);
  ChannelRealization channels;
  Matching matching;
  std::vector<TaskSpec> tasks;

  explicit Single(std::uint64_t seed, double bits = 1e5) {
    channels = generate_channels(generate_topology(config, seed), config, seed * 7 + 1);
    matching.units = {{0, 0, 0}};
    tasks = {make_task(bits, 0.5)};
  }
};

}  // namespace

TEST_CASE("local-only grid reproduces the local closed form") {
  Single s(3);
  oracle::GridSpec grid;
  grid.offload = false;
  const auto r = oracle::grid_search_patacra(s.matching, s.channels, s.tasks, s.config, grid);
  const double f = s.config.ue_freq[0];
  const double cycles = s.tasks[0].cycles();
  const double expected = 0.5 * cycles * s.config.kappa * f * f + 0.5 * cycles / f;
  REQUIRE(r.phi == Approx(expected).epsilon(1e-12));
}

TEST_CASE("grid refinement never raises the grid optimum") {
  for (std::uint64_t seed : {1, 2, 3}) {
    Single s(seed);
    oracle::GridSpec coarse, fine;
    coarse.eta_resolution = coarse.tau_resolution = 50;
    const auto a = oracle::grid_search_patacra(s.matching, s.channels, s.tasks, s.config, coarse);
    const auto b = oracle::grid_search_patacra(s.matching, s.channels, s.tasks, s.config, fine);
    REQUIRE(b.phi <= a.phi);
  }
}

TEST_CASE("grid oracle agrees with the convex-approximation solver on one UE") {
  for (std::uint64_t seed : {4, 5}) {
    Single s(seed);
    const PatacraSolution sol = solve_patacra(s.matching, s.channels, s.tasks, s.config);
    REQUIRE(sol.feasible());
    const auto grid = oracle::grid_search_patacra(s.matching, s.channels, s.tasks, s.config);
    REQUIRE(std::abs(sol.phi() - grid.phi) / grid.phi <= 0.05);
    // The grid is a finite subset of the feasible set.
    REQUIRE(sol.phi() <= grid.phi * (1 + 1e-6));
  }
}

TEST_CASE("grid oracle handles two UEs on one server") {
  ScenarioConfig config = make_uniform_config(2, 2, 1, 2);
  const ChannelRealization channels = generate_channels(generate_topology(config, 8), config, 9);
  Matching m;
  m.units = {{0, 0, 0}, {1, 0, 1}};
  const std::vector<TaskSpec> tasks{make_task(1e5, 0.3), make_task(2e5, 0.6)};
  oracle::GridSpec grid;
  grid.eta_resolution = grid.tau_resolution = 60;
  const auto r = oracle::grid_search_patacra(m, channels, tasks, config, grid);
  REQUIRE(std::isfinite(r.phi));
  REQUIRE(r.f_s.size() == 2);
  REQUIRE(r.f_s[0] + r.f_s[1] == Approx(config.server_fmax[0]));
  const PatacraSolution sol = solve_patacra(m, channels, tasks, config);
  REQUIRE(sol.phi() <= r.phi * 1.05);

  config.n_ues = 3;
  REQUIRE_THROWS_AS(oracle::grid_search_patacra(m, channels, tasks, config, grid), ModelError);
}

TEST_CASE("perspective Hessian is PSD with the expected null direction") {
  REQUIRE(oracle::hessian_psd_sample(10000, 17) >= -1e-9);
  for (double x : {-1.5, 0.3, 1.9})
    for (double y : {0.5, 1.0, 2.0}) {
      const double v2 = 0.7;
      REQUIRE(std::abs(oracle::hessian_quadratic_form(x, y, v2 * x / y, v2)) <= 1e-12);
    }
  // Blows up as y -> 0 but keeps its sign.
  double previous = 0.0;
  for (double y : {1.0, 0.1, 0.01}) {
    const double q = oracle::hessian_quadratic_form(0.01, y, 1.0, 0.0);
    REQUIRE(q > previous);
    previous = q;
  }
}

TEST_CASE("Hessian matches finite differences of y 2^(x/y)") {
  auto f = [](double x, double y) { return y * std::exp2(x / y); };
  const double x = 0.8, y = 1.3, h = 1e-4;
  const auto hess = oracle::perspective_hessian(x, y);
  const double fxx = (f(x + h, y) - 2 * f(x, y) + f(x - h, y)) / (h * h);
  const double fyy = (f(x, y + h) - 2 * f(x, y) + f(x, y - h)) / (h * h);
  const double fxy = (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / (4 * h * h);
  REQUIRE(hess[0] == Approx(fxx).epsilon(1e-5));
  REQUIRE(hess[1] == Approx(fxy).epsilon(1e-5));
  REQUIRE(hess[3] == Approx(fyy).epsilon(1e-5));
}

TEST_CASE("replay flags a constructed power violation") {
  Single s(2);
  const PatacraSolution sol = solve_patacra(s.matching, s.channels, s.tasks, s.config);
  REQUIRE(oracle::replay_constraints(sol.alloc, s.matching, s.channels, s.tasks, s.config).max() <= 1e-6);

  ContinuousAllocation bad = sol.alloc;
  const double pmax = s.config.pmax_w();
  bad.ues[0].p_h = 0.5 * pmax;
  bad.ues[0].p_s = 1.0 * pmax;
  const auto report = oracle::replay_constraints(bad, s.matching, s.channels, s.tasks, s.config);
  REQUIRE(report.families.at("power") == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("replay of zero tasks is clean") {
  Single s(2, 0.0);
  ContinuousAllocation alloc;
  alloc.ues.resize(1);
  alloc.ues[0].f_s = 0.0;
  const auto report = oracle::replay_constraints(alloc, s.matching, s.channels, s.tasks, s.config);
  for (const auto& [name, value] : report.families) {
    INFO(name);
    REQUIRE(value == 0.0);
  }
}

TEST_CASE("replay catches deadline, split and helper-energy violations") {
  Single s(6);
  const PatacraSolution sol = solve_patacra(s.matching, s.channels, s.tasks, s.config);
  ContinuousAllocation bad = sol.alloc;
  bad.ues[0].eta_h = 0.8;
  bad.ues[0].eta_s = 0.4;
  const auto r1 = oracle::replay_constraints(bad, s.matching, s.channels, s.tasks, s.config);
  REQUIRE(r1.families.at("task_split") == Approx(0.2));

  ScenarioConfig tight = s.config;
  tight.helper_emax = {1e-6};
  const auto r2 = oracle::replay_constraints(sol.alloc, s.matching, s.channels, s.tasks, tight);
  REQUIRE(r2.families.at("helper_energy") > 1.0);

  std::vector<TaskSpec> hurried = s.tasks;
  hurried[0].t_max = 1e-4;
  const auto r3 = oracle::replay_constraints(sol.alloc, s.matching, s.channels, hurried, s.config);
  REQUIRE(r3.families.at("deadline") > 1.0);
  REQUIRE(r3.worst() == "deadline");
}
