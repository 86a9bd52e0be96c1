#include <catch_amalgamated.hpp>

#include <cmath>

#include "nomamec/patacra.hpp"
#include "nomamec/rng.hpp"
#include "patacra/subproblem.hpp"

using namespace nomamec;
using Catch::Approx;

namespace {

struct Instance {
  ScenarioConfig config;
  ChannelRealization channels;
  Matching matching;
  std::vector<TaskSpec> tasks;
};

Instance two_ue_instance(std::uint64_t seed, double bits, bool shared_server) {
  Instance in;
  in.config = make_uniform_config(2, 2, 2, 2);
  in.channels = generate_channels(generate_topology(in.config, seed), in.config, seed);
  in.matching.units = {{0, 0, 0, -1, -1}, {1, shared_server ? 0 : 1, 1, -1, -1}};
  in.tasks = {make_task(bits, 0.3), make_task(bits, 0.6)};
  return in;
}

}  // namespace

TEST_CASE("power recovery reproduces both rates") {
  Rng rng(11);
  const double bandwidth = 1e6;
  for (int i = 0; i < 500; ++i) {
    const double gh = std::pow(10.0, rng.uniform(2.0, 9.0));
    const double gs = std::pow(10.0, rng.uniform(2.0, 9.0));
    const double eta_h = rng.uniform(0.0, 0.5), eta_s = rng.uniform(0.0, 0.5);
    const double tau = rng.uniform(0.01, 0.9);
    const TaskSpec task = make_task(rng.uniform(1e4, 1e6), 0.5);
    const DerivedCoefficients c = derive_coefficients(gh, gs);
    const auto [ph, ps] = recover_powers(tau, eta_h, eta_s, c, task, bandwidth);
    REQUIRE(ph >= -1e-12);
    REQUIRE(ps >= -1e-12);
    const double bits_h = rate_helper(ph, ps, gh, c.o, bandwidth) * tau;
    const double bits_s = rate_server(ph, ps, gs, c.o, bandwidth) * tau;
    REQUIRE(bits_h == Approx(eta_h * task.data_bits).epsilon(1e-6).margin(1e-9));
    REQUIRE(bits_s == Approx(eta_s * task.data_bits).epsilon(1e-6).margin(1e-9));
  }
}

TEST_CASE("power recovery closed forms at each decoding order") {
  const TaskSpec task = make_task(1e5, 0.5);
  const double tau = 0.1, x = 1e5 / (1e6 * tau);
  // Helper receiver stronger: the server stream is decoded under interference.
  {
    const DerivedCoefficients c = derive_coefficients(1e8, 1e6);
    const auto [ph, ps] = recover_powers(tau, 0.3, 0.4, c, task, 1e6);
    if (c.o == 0) {
      REQUIRE(ph == Approx(pow2m1(0.3 * x) / 1e8).epsilon(1e-12));
    } else {
      REQUIRE(ps == Approx(pow2m1(0.4 * x) / 1e6).epsilon(1e-12));
    }
    REQUIRE(ph + ps == Approx(c.a1 * pow2m1(c.eta_o2(0.3, 0.4) * x) + c.a2 * pow2m1(0.7 * x)));
  }
  {
    const DerivedCoefficients c = derive_coefficients(1e6, 1e8);
    const auto [ph, ps] = recover_powers(tau, 0.3, 0.4, c, task, 1e6);
    if (c.o == 1) {
      REQUIRE(ps == Approx(pow2m1(0.4 * x) / 1e8).epsilon(1e-12));
    } else {
      REQUIRE(ph == Approx(pow2m1(0.3 * x) / 1e6).epsilon(1e-12));
    }
    REQUIRE(ph >= 0.0);
    REQUIRE(ps >= 0.0);
  }
  REQUIRE(recover_powers(tau, 0.0, 0.0, derive_coefficients(1e6, 1e7), task, 1e6) ==
          std::pair{0.0, 0.0});
  REQUIRE_THROWS_AS(recover_powers(0.0, 0.2, 0.2, derive_coefficients(1e6, 1e7), task, 1e6),
                    ModelError);
}

TEST_CASE("subproblem has the expected constraint inventory") {
  const Instance in = two_ue_instance(3, 2e5, false);
  const SurrogateParams params = initial_point(in.matching, in.channels, in.tasks, in.config);
  const BuiltSubproblem b = build_subproblem(in.matching, in.channels, in.tasks, in.config, params);
  // Per UE with both NOMA terms and energy weight:
  //   exp cones: 2 power epigraphs + 2 energy perspectives
  //   soc cones: 2 transmission LMIs + 1 execution LMI
  REQUIRE(b.program.exp_cones().size() == 8);
  REQUIRE(b.program.soc_cones().size() == 6);
  REQUIRE(b.phi.has_value());
  const auto ctx = detail::make_contexts(in.config, in.channels, in.matching, in.tasks, {});
  const detail::Built sum = detail::build_program(ctx, in.config, params, Objective::Sum, nullptr);
  REQUIRE_FALSE(sum.phi.has_value());
  REQUIRE(sum.ues[0].phi_n.has_value());
}

TEST_CASE("IPCA descends, converges and replays feasibly") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (bool shared : {false, true}) {
      const Instance in = two_ue_instance(seed, 2e5, shared);
      const PatacraSolution sol = solve_patacra(in.matching, in.channels, in.tasks, in.config);
      INFO("seed " << seed << " shared " << shared);
      REQUIRE(sol.status == PatacraStatus::Converged);
      REQUIRE(sol.iterations <= 15);
      for (std::size_t r = 1; r < sol.phi_trace.size(); ++r)
        REQUIRE(sol.phi_trace[r] <= sol.phi_trace[r - 1] + 1e-9);
      REQUIRE(sol.surrogate_residual <= 1e-7);
      const EdtReport rep = evaluate_edt(in.config, in.tasks, in.channels, in.matching, sol.alloc);
      REQUIRE(rep.flags.all());
      REQUIRE(rep.medt == Approx(sol.phi()).epsilon(1e-6));
    }
  }
}

TEST_CASE("orthogonal link modes solve and replay") {
  for (LinkMode mode : {LinkMode::Tdma, LinkMode::Fdma}) {
    const Instance in = two_ue_instance(5, 3e5, true);
    PatacraOptions opts;
    opts.link.mode = mode;
    const PatacraSolution sol = solve_patacra(in.matching, in.channels, in.tasks, in.config, opts);
    REQUIRE(sol.feasible());
    const EdtReport rep = evaluate_edt(in.config, in.tasks, in.channels, in.matching, sol.alloc, opts.link);
    REQUIRE(rep.flags.all());
    REQUIRE(rep.medt == Approx(sol.phi()).epsilon(1e-6));
  }
}

TEST_CASE("empty tasks give zero objective") {
  Instance in = two_ue_instance(1, 1e5, false);
  for (auto& t : in.tasks) t.data_bits = 0.0;
  const PatacraSolution sol = solve_patacra(in.matching, in.channels, in.tasks, in.config);
  REQUIRE(sol.feasible());
  REQUIRE(sol.phi() == Approx(0.0).margin(1e-8));
}

TEST_CASE("zero power budget keeps everything local") {
  Instance in = two_ue_instance(2, 1e5, false);
  in.config.pmax_dbm = -std::numeric_limits<double>::infinity();
  const PatacraSolution sol = solve_patacra(in.matching, in.channels, in.tasks, in.config);
  REQUIRE(sol.feasible());
  for (const UeAllocation& a : sol.alloc.ues) {
    REQUIRE(a.eta_h == 0.0);
    REQUIRE(a.eta_s == 0.0);
  }
  // Local delay of 1e8 cycles at 5 GHz plus its energy.
  const double t_local = 1e8 / 5e9, e_local = 1e8 * 1e-29 * 25e18;
  REQUIRE(sol.phi() == Approx(0.4 * t_local + 0.6 * e_local).epsilon(1e-6));
}

TEST_CASE("deadline beyond reach is infeasible") {
  Instance in = two_ue_instance(4, 1e5, false);
  in.config.pmax_dbm = -std::numeric_limits<double>::infinity();
  for (auto& t : in.tasks) t.t_max = 1e-3;
  const PatacraSolution sol = solve_patacra(in.matching, in.channels, in.tasks, in.config);
  REQUIRE(sol.status == PatacraStatus::Infeasible);
  REQUIRE(sol.phi() == kInfinity);
}

TEST_CASE("AO is monotone and never beats IPCA by more than tolerance") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Instance in = two_ue_instance(seed, 2e5, true);
    const PatacraSolution ipca = solve_patacra(in.matching, in.channels, in.tasks, in.config);
    const PatacraSolution ao = solve_ao(in.matching, in.channels, in.tasks, in.config);
    REQUIRE(ao.feasible());
    for (std::size_t r = 1; r < ao.phi_trace.size(); ++r)
      REQUIRE(ao.phi_trace[r] <= ao.phi_trace[r - 1] + 1e-9);
    REQUIRE(ipca.phi() <= ao.phi() + 1e-9);
    const EdtReport rep = evaluate_edt(in.config, in.tasks, in.channels, in.matching, ao.alloc);
    REQUIRE(rep.flags.all());
  }
}

TEST_CASE("AO started at the IPCA optimum stays there") {
  const Instance in = two_ue_instance(7, 2e5, true);
  const PatacraSolution ipca = solve_patacra(in.matching, in.channels, in.tasks, in.config);
  AoOptions opts;
  std::vector<double> f;
  for (const UeAllocation& a : ipca.alloc.ues) f.push_back(a.f_s);
  opts.initial_f = f;
  opts.initial_alloc = ipca.alloc;
  const PatacraSolution ao = solve_ao(in.matching, in.channels, in.tasks, in.config, opts);
  REQUIRE(ao.feasible());
  // Both stop on an absolute change below epsilon.
  REQUIRE(std::abs(ao.phi() - ipca.phi()) <= in.config.ipca_epsilon);
}
