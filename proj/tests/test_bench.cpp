#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "nomamec/bench.hpp"

using namespace nomamec;
using namespace nomamec::bench;

namespace {

ExperimentSpec small_spec() {
  ExperimentSpec spec;
  spec.figure = "unit";
  spec.shapes = {{2, 2, 2, 2}};
  spec.seeds = {1, 2, 3};
  spec.axis = SweepAxis::DataBits;
  spec.sweep_values = {1e5, 2e5};
  spec.runs = {"proposed", "tdma_helpers"};
  spec.record_wall_time = false;
  return spec;
}

std::string csv_of(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

ResultRow row(const std::string& run, std::uint64_t seed, double medt) {
  ResultRow r;
  r.figure = "t";
  r.run = run;
  r.seed = seed;
  r.medt = medt;
  r.shape = {2, 2, 2, 2};
  return r;
}

}  // namespace

TEST_CASE("instances are pure functions of the seed") {
  const ExperimentSpec spec = small_spec();
  const Instance a = make_instance(spec, spec.shapes[0], 1e5, 42);
  const Instance b = make_instance(spec, spec.shapes[0], 1e5, 42);
  const Instance c = make_instance(spec, spec.shapes[0], 1e5, 43);
  REQUIRE(to_json(a) == to_json(b));
  REQUIRE(to_json(a) != to_json(c));
  // The sweep value overrides after the draws; topology is unchanged.
  const Instance d = make_instance(spec, spec.shapes[0], 3e5, 42);
  REQUIRE(to_json(a)["topology"] == to_json(d)["topology"]);
  REQUIRE(d.tasks[0].data_bits == 3e5);
}

TEST_CASE("sampled parameters stay inside their ranges") {
  const ExperimentSpec spec = small_spec();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Instance in = make_instance(spec, {3, 4, 2, 3}, std::nullopt, seed);
    for (double f : in.config.server_fmax) REQUIRE((f >= 20e9 && f <= 25e9));
    for (double f : in.config.helper_freq) REQUIRE((f >= 15e9 && f <= 20e9));
    for (double f : in.config.ue_freq) REQUIRE((f >= 2e9 && f <= 8e9));
    for (double e : in.config.helper_emax) REQUIRE((e >= 0.8 && e <= 1.0));
  }
}

TEST_CASE("instance JSON round-trips") {
  const ExperimentSpec spec = small_spec();
  const Instance a = make_instance(spec, {2, 3, 2, 3}, std::nullopt, 9);
  const Instance b = instance_from_json(to_json(a));
  REQUIRE(to_json(a) == to_json(b));
  REQUIRE_THROWS_AS(instance_from_json(nlohmann::json::object()), ModelError);
}

TEST_CASE("experiment spec JSON round-trips and validates") {
  const ExperimentSpec spec = small_spec();
  REQUIRE(to_json(spec_from_json(to_json(spec))) == to_json(spec));
  ExperimentSpec bad = spec;
  bad.runs = {"warp_drive"};
  REQUIRE_THROWS_AS(bad.validate(), ModelError);
  for (const std::string& name : preset_names()) {
    const auto specs = preset(name, 2);
    REQUIRE(specs.has_value());
    for (const auto& s : *specs) {
      REQUIRE(s.figure == name);
      REQUIRE(s.seeds.size() == 2);
      REQUIRE_NOTHROW(s.validate());
    }
  }
  REQUIRE_FALSE(preset("fig99").has_value());
}

TEST_CASE("empty seed list gives a header-only CSV") {
  ExperimentSpec spec = small_spec();
  spec.seeds.clear();
  const std::string csv = csv_of(run_experiment(spec));
  REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 1);
  REQUIRE(csv.rfind("figure,seed,sweep,run", 0) == 0);
}

TEST_CASE("runs are byte-identical across worker counts") {
  ExperimentSpec spec = small_spec();
  const std::string serial = csv_of(run_experiment(spec));
  spec.workers = 3;
  const std::string parallel = csv_of(run_experiment(spec));
  REQUIRE(serial == parallel);

  std::istringstream is(serial);
  const auto rows = read_csv(is);
  REQUIRE(rows.size() == 3 * 2 * 2);
  REQUIRE(csv_of(rows) == serial);
  for (const auto& r : rows) REQUIRE(r.status == "ok");
}

TEST_CASE("a failing trial is recorded and the sweep continues") {
  ExperimentSpec spec = small_spec();
  spec.runs = {"proposed", "noma_no_helpers"};
  spec.shapes = {{2, 2, 1, 2}};  // one server: the two-server scheme cannot run
  spec.sweep_values = {1e5};
  const auto rows = run_experiment(spec);
  REQUIRE(rows.size() == 6);
  std::size_t ok = 0, skipped = 0;
  for (const auto& r : rows) {
    if (r.run == "proposed") ok += r.status == "ok";
    else skipped += r.status != "ok" && !std::isfinite(r.medt);
  }
  REQUIRE(ok == 3);
  REQUIRE(skipped == 3);
}

TEST_CASE("summary statistics and paired gaps") {
  {
    const auto s = summarize({row("proposed", 1, 0.25)});
    REQUIRE(s.size() == 1);
    REQUIRE(s[0].mean == 0.25);
    REQUIRE(s[0].stddev == 0.0);
    REQUIRE(s[0].count == 1);
  }
  {
    const auto s = summarize({row("proposed", 1, 0.2), row("tdma_helpers", 1, 0.2)});
    for (const auto& r : s) REQUIRE(r.gap == 0.0);
  }
  {
    const auto s = summarize({row("proposed", 1, 0.2), row("ao", 1, 0.25), row("proposed", 2, 0.4),
                              row("ao", 2, 0.4)});
    const auto ao = std::find_if(s.begin(), s.end(), [](const SummaryRow& r) { return r.run == "ao"; });
    REQUIRE(ao != s.end());
    REQUIRE(ao->gap == Catch::Approx(0.125));  // mean of 0.25 and 0
    REQUIRE(ao->gap_count == 2);
  }
  {
    const auto s = summarize({row("exhaustive", 1, 0.2), row("proposed", 1, 0.21)});
    REQUIRE(reference_run({row("exhaustive", 1, 0.2)}) == "exhaustive");
    for (const auto& r : s)
      if (r.run == "proposed") REQUIRE(r.gap == Catch::Approx(0.05));
  }
  ResultRow other = row("proposed", 1, 0.1);
  other.figure = "u";
  REQUIRE_THROWS_AS(summarize({row("proposed", 1, 0.1), other}), ModelError);
}
