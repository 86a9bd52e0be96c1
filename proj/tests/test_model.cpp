#include <catch_amalgamated.hpp>

#include <cmath>

#include "nomamec/model.hpp"
#include "nomamec/rng.hpp"

using namespace nomamec;
using Catch::Approx;

TEST_CASE("noise power is density times RB bandwidth") {
  ScenarioConfig c = make_uniform_config(1, 1, 1, 1);
  REQUIRE(c.noise_power_w() == Approx(std::pow(10.0, -17.4) * 1e-3 * 1e6).epsilon(1e-12));
  REQUIRE(c.pmax_w() == Approx(0.630957).epsilon(1e-5));
}

TEST_CASE("config validation rejects broken invariants") {
  ScenarioConfig c = make_uniform_config(2, 2, 2, 2);
  REQUIRE_NOTHROW(c.validate());
  ScenarioConfig few_rbs = c;
  few_rbs.n_rbs = 1;
  REQUIRE_THROWS_AS(few_rbs.validate(), ModelError);
  ScenarioConfig low_cap = c;
  low_cap.server_capacity = {1, 0};
  REQUIRE_THROWS_AS(low_cap.validate(), ModelError);
  low_cap.server_capacity = {0, 0};
  REQUIRE_THROWS_AS(low_cap.validate(), ModelError);
  TaskSpec t = make_task(1e5, 0.3);
  REQUIRE_NOTHROW(t.validate());
  t.weight_t = 0.9;
  REQUIRE_THROWS_AS(t.validate(), ModelError);
}

TEST_CASE("topology stays on the disc and is deterministic") {
  ScenarioConfig c = make_uniform_config(4, 4, 4, 4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Topology t = generate_topology(c, seed);
    for (const auto* set : {&t.ues, &t.helpers, &t.servers})
      for (const Point& p : *set) REQUIRE(std::hypot(p.x, p.y) <= 500.0 + 1e-9);
  }
  const Topology a = generate_topology(c, 7), b = generate_topology(c, 7);
  REQUIRE(a.ues[3].x == b.ues[3].x);
  REQUIRE(a.servers[1].y == b.servers[1].y);
  c.disc_radius_m = 0.0;
  const Topology z = generate_topology(c, 3);
  REQUIRE(z.ue_helper_distance(0, 1) == 0.0);
}

TEST_CASE("mean channel power follows the pathloss law") {
  REQUIRE(mean_channel_power(10.0, 10.0, 4.7) == Approx(0.5));
  REQUIRE(mean_channel_power(100.0, 10.0, 4.7) == Approx(1.995e-5).epsilon(1e-3));
}

TEST_CASE("exponential sampler matches its mean within three standard errors") {
  Rng rng(42);
  const double mean = 1.995e-5;
  const int n = 100000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(mean);
  // The exponential's standard deviation equals its mean.
  REQUIRE(std::abs(sum / n - mean) <= 3.0 * mean / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("channels are positive, finite and seed-deterministic") {
  ScenarioConfig c = make_uniform_config(2, 3, 2, 2);
  const Topology t = generate_topology(c, 1);
  const ChannelRealization a = generate_channels(t, c, 1), b = generate_channels(t, c, 1);
  for (std::size_t n = 0; n < 2; ++n)
    for (std::size_t l = 0; l < 2; ++l) {
      for (std::size_t m = 0; m < 3; ++m) {
        REQUIRE(a.helper(n, m, l) > 0.0);
        REQUIRE(std::isfinite(a.helper(n, m, l)));
        REQUIRE(a.helper(n, m, l) == b.helper(n, m, l));
      }
      for (std::size_t k = 0; k < 2; ++k) REQUIRE(a.server(n, k, l) > 0.0);
    }
  REQUIRE_THROWS(a.helper(2, 0, 0));
}

TEST_CASE("decoding indicator resolves ties to zero") {
  REQUIRE(decoding_indicator(2.0, 1.0) == 0);
  REQUIRE(decoding_indicator(1.0, 1.0) == 0);
  REQUIRE(decoding_indicator(0.5, 1.0) == 1);
}

TEST_CASE("NOMA rates on hand-computed points") {
  REQUIRE(rate_helper(1.0, 0.0, 1.0, 0, 1.0) == Approx(1.0));
  REQUIRE(rate_helper(3.0, 1.0, 1.0, 1, 1.0) == Approx(std::log2(2.5)));
  REQUIRE(rate_helper(0.0, 1.0, 1.0, 1, 1.0) == 0.0);
  REQUIRE(rate_server(0.0, 1.0, 1.0, 1, 1.0) == Approx(1.0));
  REQUIRE(rate_server(0.25, 0.75, 2.0, 0, 1.0) == Approx(1.0));
  REQUIRE(rate_server(1.0, 0.0, 2.0, 0, 1.0) == 0.0);
}

TEST_CASE("rates are monotone in gain at fixed decoding order") {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double ph = rng.uniform(0, 1), ps = rng.uniform(0, 1), g = rng.uniform(0.1, 10);
    const int o = i % 2;
    REQUIRE(rate_helper(ph, ps, g * 1.1, o, 1.0) >= rate_helper(ph, ps, g, o, 1.0));
    REQUIRE(rate_server(ph, ps, g * 1.1, o, 1.0) >= rate_server(ph, ps, g, o, 1.0));
  }
}

TEST_CASE("matching validator enforces exclusivity and capacity") {
  ScenarioConfig c = make_uniform_config(2, 2, 2, 2);
  c.server_capacity = {1, 1};
  Matching m{{{0, 0, 0}, {1, 1, 1}}};
  REQUIRE_FALSE(check_matching(c, m).has_value());
  Matching shared_helper{{{0, 0, 0}, {0, 1, 1}}};
  REQUIRE(check_matching(c, shared_helper).has_value());
  Matching shared_rb{{{0, 0, 1}, {1, 1, 1}}};
  REQUIRE(check_matching(c, shared_rb).has_value());
  Matching over_capacity{{{0, 0, 0}, {1, 0, 1}}};
  REQUIRE(check_matching(c, over_capacity).has_value());
}

TEST_CASE("fully local execution has the closed-form EDT") {
  ScenarioConfig c = make_uniform_config(1, 1, 1, 1);
  const ChannelRealization ch(1, 1, 1, 1);
  const std::vector<TaskSpec> tasks{make_task(1e5, 0.5)};
  ContinuousAllocation alloc;
  alloc.ues.resize(1);
  const EdtReport r = evaluate_edt(c, tasks, ch, Matching{{{0, 0, 0}}}, alloc);
  REQUIRE(r.ues[0].delay == Approx(0.02));
  REQUIRE(r.ues[0].energy == Approx(0.025));
  REQUIRE(r.ues[0].edt == Approx(0.0225));
  REQUIRE(r.medt == Approx(0.0225));
  REQUIRE(r.flags.all());
}

TEST_CASE("mEDT is the elementwise maximum of per-UE EDTs") {
  ScenarioConfig c = make_uniform_config(2, 2, 1, 2);
  c.ue_freq = {5e9, 2e9};
  const ChannelRealization ch(2, 2, 1, 2);
  const std::vector<TaskSpec> tasks{make_task(1e5, 0.5), make_task(1e5, 0.5)};
  ContinuousAllocation alloc;
  alloc.ues.resize(2);
  const EdtReport r = evaluate_edt(c, tasks, ch, Matching{{{0, 0, 0}, {1, 0, 1}}}, alloc);
  REQUIRE(r.medt == std::max(r.ues[0].edt, r.ues[1].edt));
  REQUIRE(r.sum_edt == Approx(r.ues[0].edt + r.ues[1].edt));
}

TEST_CASE("evaluate_edt flags offload without rate instead of crashing") {
  ScenarioConfig c = make_uniform_config(1, 1, 1, 1);
  const ChannelRealization ch(1, 1, 1, 1);
  const std::vector<TaskSpec> tasks{make_task(1e5, 0.5)};
  ContinuousAllocation alloc;
  alloc.ues.resize(1);
  alloc.ues[0].eta_s = 0.5;
  alloc.ues[0].tau = 0.1;
  const EdtReport r = evaluate_edt(c, tasks, ch, Matching{{{0, 0, 0}}}, alloc);
  REQUIRE_FALSE(r.flags.rates);
  REQUIRE_FALSE(r.flags.all());
}

TEST_CASE("evaluate_edt flags a power budget overrun") {
  ScenarioConfig c = make_uniform_config(1, 1, 1, 1);
  const ChannelRealization ch(1, 1, 1, 1);
  const std::vector<TaskSpec> tasks{make_task(1e5, 0.5)};
  ContinuousAllocation alloc;
  alloc.ues.resize(1);
  alloc.ues[0].p_h = c.pmax_w();
  alloc.ues[0].p_s = 0.5 * c.pmax_w();
  REQUIRE_FALSE(evaluate_edt(c, tasks, ch, Matching{{{0, 0, 0}}}, alloc).flags.power);
}
