// Command-line front end: instance generation, single solves, matching traces,
// experiment sweeps, aggregation and the oracle checks.
//
// Exit codes: 0 success, 1 infeasible instance, 2 bad configuration,
// 3 solver failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "nomamec/bench.hpp"
#include "nomamec/matching.hpp"
#include "nomamec/oracle.hpp"
#include "nomamec/schemes.hpp"

namespace {

using nlohmann::json;
using namespace nomamec;

enum Exit { kOk = 0, kInfeasible = 1, kBadConfig = 2, kSolverFailure = 3 };

struct BadConfig : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Args {
  std::string config;
  std::uint64_t seed = 1;
  std::size_t seeds = 20;
  std::string scheme = "proposed";
  std::string out;
  int workers = 1;
  std::string preset;
  std::string shape = "2,2,2,2";
  std::string input;
  std::optional<double> sweep;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw BadConfig("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw BadConfig(path + ": " + e.what());
  }
}

/// Writes to --out when given, stdout otherwise.
template <class F>
void emit(const std::string& out, F&& write) {
  if (out.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream os(out);
  if (!os) throw BadConfig("cannot write " + out);
  write(os);
}

bench::Shape parse_shape(const std::string& text) {
  bench::Shape s{};
  std::stringstream ss(text);
  std::string item;
  std::size_t i = 0;
  while (std::getline(ss, item, ',')) {
    if (i == 4) throw BadConfig("shape takes four counts N,M,K,L");
    try {
      s[i++] = std::stoul(item);
    } catch (const std::exception&) {
      throw BadConfig("bad shape: " + text);
    }
  }
  if (i != 4) throw BadConfig("shape takes four counts N,M,K,L");
  return s;
}

std::vector<bench::ExperimentSpec> experiment_specs(const Args& a) {
  if (!a.preset.empty()) {
    auto specs = bench::preset(a.preset, a.seeds);
    if (!specs) throw BadConfig("unknown preset " + a.preset);
    for (auto& s : *specs) s.workers = a.workers;
    return *specs;
  }
  bench::ExperimentSpec spec;
  if (!a.config.empty()) spec = bench::spec_from_json(read_json(a.config));
  if (spec.seeds.empty())
    for (std::uint64_t s = 1; s <= a.seeds; ++s) spec.seeds.push_back(s);
  spec.workers = a.workers;
  spec.validate();
  return {spec};
}

/// --config names an instance file; otherwise one is drawn from --seed.
bench::Instance load_instance(const Args& a) {
  if (!a.config.empty()) {
    const json j = read_json(a.config);
    if (j.contains("config")) return bench::instance_from_json(j);
    bench::ExperimentSpec spec = bench::spec_from_json(j);
    return bench::make_instance(spec, spec.shapes.front(), a.sweep, a.seed);
  }
  bench::ExperimentSpec spec;
  if (!a.preset.empty()) spec = experiment_specs(a).front();
  spec.shapes = {parse_shape(a.shape)};
  return bench::make_instance(spec, spec.shapes.front(), a.sweep, a.seed);
}

json matching_json(const Matching& m) {
  json arr = json::array();
  for (std::size_t n = 0; n < m.size(); ++n) {
    const MatchingUnit& u = m.units[n];
    json e = {{"ue", n}, {"helper", u.helper}, {"server", u.server}, {"rb", u.rb}};
    if (u.server2 != kUnassigned) e["server2"] = u.server2;
    if (u.rb2 != kUnassigned) e["rb2"] = u.rb2;
    arr.push_back(e);
  }
  return arr;
}

json allocation_json(const ContinuousAllocation& alloc) {
  json arr = json::array();
  for (const UeAllocation& u : alloc.ues)
    arr.push_back({{"tau", u.tau}, {"tau_s", u.tau_s}, {"eta_h", u.eta_h}, {"eta_s", u.eta_s},
                   {"f_s", u.f_s}, {"f_h", u.f_h}, {"p_h", u.p_h}, {"p_s", u.p_s}});
  return arr;
}

int exit_for(const PatacraSolution& s) {
  if (s.feasible()) return kOk;
  return s.status == PatacraStatus::Infeasible ? kInfeasible : kSolverFailure;
}

SchemeId scheme_of(const std::string& name) {
  auto id = parse_scheme(name);
  if (!id) throw BadConfig("unknown scheme " + name);
  return *id;
}

int cmd_gen(const Args& a) {
  const bench::Instance in = load_instance(a);
  emit(a.out, [&](std::ostream& os) { os << bench::to_json(in).dump(2) << '\n'; });
  return kOk;
}

int cmd_solve(const Args& a) {
  const bench::Instance in = load_instance(a);
  SchemeOptions opts;
  opts.search.workers = a.workers;
  const SchemeResult r = solve_scheme(scheme_of(a.scheme), in.config, in.channels, in.tasks, opts);
  if (!r.applicable) {
    std::cerr << "scheme inapplicable: " << r.note << '\n';
    return kBadConfig;
  }
  json j = {{"scheme", to_string(r.scheme)},
            {"status", to_string(r.solution.status)},
            {"medt", r.feasible() ? json(r.medt) : json(nullptr)},
            {"objective", r.feasible() ? json(r.objective) : json(nullptr)},
            {"edt", r.edt},
            {"energy", r.energy},
            {"delay", r.delay},
            {"iterations", r.solution.iterations},
            {"phi_trace", r.solution.phi_trace},
            {"matching", matching_json(r.matching)},
            {"allocation", allocation_json(r.solution.alloc)},
            {"operations", r.accepted_operations}};
  emit(a.out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  return exit_for(r.solution);
}

int cmd_match(const Args& a) {
  const bench::Instance in = load_instance(a);
  const SchemeSetup setup = scheme_setup(scheme_of(a.scheme), in.config);
  if (auto why = scheme_inapplicable(scheme_of(a.scheme), in.config)) {
    std::cerr << "scheme inapplicable: " << *why << '\n';
    return kBadConfig;
  }
  const MatchingContext ctx{in.config, in.channels, in.tasks, setup.layout, setup.patacra};
  UtilityCache cache;
  SearchOptions opts;
  opts.workers = a.workers;
  const SearchResult r = fs_urhsm(ctx, cache, opts);

  std::cerr << "utility " << r.utility << " after " << r.accepted << " operations, "
            << r.sweeps << " sweeps, " << (r.stable ? "stable" : "not stable") << '\n';
  std::cerr << "matching " << matching_json(r.matching).dump() << '\n';
  emit(a.out, [&](std::ostream& os) {
    os << "step,operation,utility\n";
    char buf[32];
    for (std::size_t i = 0; i < r.utility_trace.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.9g", r.utility_trace[i]);
      os << i << ',' << (i == 0 ? "initial" : r.operations[i - 1]) << ',' << buf << '\n';
    }
  });
  return exit_for(r.solution);
}

int cmd_sweep(const Args& a) {
  const auto specs = experiment_specs(a);
  std::vector<bench::ResultRow> rows;
  for (const auto& spec : specs) {
    auto part = bench::run_experiment(spec);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  emit(a.out, [&](std::ostream& os) { bench::write_csv(os, rows); });
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status != "ok";
  if (failed) std::cerr << failed << " of " << rows.size() << " rows did not finish ok\n";
  return kOk;
}

int cmd_summarize(const Args& a) {
  std::ifstream in(a.input);
  if (!in) throw BadConfig("cannot open " + a.input);
  const auto rows = bench::read_csv(in);
  emit(a.out, [&](std::ostream& os) { bench::write_summary_csv(os, bench::summarize(rows)); });
  return kOk;
}

int cmd_validate(const Args& a) {
  bool ok = true;
  auto line = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
  };

  const double worst = oracle::hessian_psd_sample(10000, a.seed);
  line(worst >= -1e-9, "hessian sampled min v'Hv = " + std::to_string(worst));

  bench::ExperimentSpec spec;
  spec.shapes = {{1, 1, 1, 1}};
  double max_gap = 0.0, max_violation = 0.0;
  for (std::uint64_t s = a.seed; s < a.seed + a.seeds; ++s) {
    const bench::Instance in = bench::make_instance(spec, spec.shapes[0], std::nullopt, s);
    Matching m;
    m.units = {{0, 0, 0}};
    const PatacraSolution sol = solve_patacra(m, in.channels, in.tasks, in.config);
    const oracle::GridResult grid = oracle::grid_search_patacra(m, in.channels, in.tasks, in.config);
    if (!sol.feasible()) return kSolverFailure;
    max_gap = std::max(max_gap, std::abs(sol.phi() - grid.phi) / grid.phi);
    max_violation = std::max(
        max_violation,
        oracle::replay_constraints(sol.alloc, m, in.channels, in.tasks, in.config).max());
  }
  line(max_gap <= 0.05, "grid oracle max relative gap = " + std::to_string(max_gap));
  line(max_violation <= 1e-6, "replay max relative violation = " + std::to_string(max_violation));
  return ok ? kOk : kSolverFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Helper-assisted NOMA edge offloading: solver and experiment harness"};
  app.require_subcommand(1);
  Args a;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", a.config, "Instance or experiment JSON");
    sub->add_option("--seed", a.seed, "Instance seed");
    sub->add_option("--out", a.out, "Output path (stdout when absent)");
    sub->add_option("--workers", a.workers, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto instance_opts = [&](CLI::App* sub) {
    sub->add_option("--preset", a.preset, "Draw parameters from a figure preset");
    sub->add_option("--shape", a.shape, "N,M,K,L for drawn instances");
    sub->add_option("--sweep", a.sweep, "Sweep value applied to the drawn instance");
  };

  auto* gen = app.add_subcommand("gen", "Emit a scenario JSON");
  common(gen);
  instance_opts(gen);
  auto* solve = app.add_subcommand("solve", "Solve one instance with one scheme");
  common(solve);
  instance_opts(solve);
  solve->add_option("--scheme", a.scheme, "Scheme id");
  auto* match = app.add_subcommand("match", "Run the matching search and print its utility trace");
  common(match);
  instance_opts(match);
  match->add_option("--scheme", a.scheme, "Scheme id");
  auto* sweep = app.add_subcommand("sweep", "Run an experiment and write result rows as CSV");
  common(sweep);
  sweep->add_option("--preset", a.preset, "Figure preset (fig2 ... fig8)");
  sweep->add_option("--seeds", a.seeds, "Seeds per sweep point");
  auto* summarize = app.add_subcommand("summarize", "Aggregate a result CSV");
  summarize->add_option("input", a.input, "Result CSV")->required();
  summarize->add_option("--out", a.out, "Output path");
  auto* validate = app.add_subcommand("validate", "Run the oracle checks");
  validate->add_option("--seed", a.seed, "First seed");
  validate->add_option("--seeds", a.seeds, "Single-UE instances checked against the grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadConfig;
  }

  try {
    if (*gen) return cmd_gen(a);
    if (*solve) return cmd_solve(a);
    if (*match) return cmd_match(a);
    if (*sweep) return cmd_sweep(a);
    if (*summarize) return cmd_summarize(a);
    if (*validate) return cmd_validate(a);
  } catch (const BadConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadConfig;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  }
  return kOk;
}
