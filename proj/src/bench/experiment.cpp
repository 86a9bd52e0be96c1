#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

#include "nomamec/bench.hpp"
#include "nomamec/matching.hpp"
#include "nomamec/rng.hpp"

namespace nomamec::bench {

using nlohmann::json;

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::DataBits: return "data_bits";
    case SweepAxis::Helpers: return "helpers";
    case SweepAxis::WeightE: return "weight_e";
    case SweepAxis::HelperFreq: return "helper_freq";
  }
  return "unknown";
}

std::optional<SweepAxis> parse_axis(const std::string& name) {
  for (SweepAxis a : {SweepAxis::None, SweepAxis::DataBits, SweepAxis::Helpers, SweepAxis::WeightE,
                      SweepAxis::HelperFreq})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

namespace {

constexpr std::uint64_t kTopologyStream = 1;
constexpr std::uint64_t kChannelStream = 2;
constexpr std::uint64_t kNodeStream = 3;

bool known_run(const std::string& run) {
  return run == "ao" || run == "exhaustive" || parse_scheme(run).has_value();
}

void check_range(const Range& r, const char* name) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo)) throw ModelError(std::string("bad range for ") + name);
}

double per_ue(const std::vector<double>& v, std::size_t n) { return v.size() == 1 ? v[0] : v.at(n); }

json range_json(const Range& r) { return json::array({r.lo, r.hi}); }
Range range_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

}  // namespace

void ExperimentSpec::validate() const {
  if (shapes.empty()) throw ModelError("experiment has no shapes");
  for (const Shape& s : shapes)
    if (s[0] == 0 || s[2] == 0 || s[3] < s[0]) throw ModelError("shape needs N >= 1, K >= 1, L >= N");
  check_range(server_freq, "server_freq");
  check_range(helper_freq, "helper_freq");
  check_range(ue_freq, "ue_freq");
  if (!(helper_emax.lo >= 0.0) || !(helper_emax.hi >= helper_emax.lo)) throw ModelError("bad helper_emax range");
  if (data_bits.empty() || weight_e.empty()) throw ModelError("data_bits and weight_e need values");
  for (const Shape& s : shapes) {
    if (data_bits.size() != 1 && data_bits.size() != s[0]) throw ModelError("data_bits must have 1 or N entries");
    if (weight_e.size() != 1 && weight_e.size() != s[0]) throw ModelError("weight_e must have 1 or N entries");
  }
  for (double w : weight_e)
    if (!(w >= 0.0 && w <= 1.0)) throw ModelError("weight_e must lie in [0, 1]");
  for (double d : data_bits)
    if (!(d >= 0.0)) throw ModelError("data_bits must be non-negative");
  if (axis != SweepAxis::None && sweep_values.empty()) throw ModelError("sweep axis without values");
  for (const std::string& r : runs)
    if (!known_run(r)) throw ModelError("unknown run '" + r + "'");
  if (workers < 1) throw ModelError("workers must be at least 1");
}

json to_json(const ExperimentSpec& s) {
  json j;
  j["figure"] = s.figure;
  j["shapes"] = s.shapes;
  if (s.server_capacity) j["server_capacity"] = *s.server_capacity;
  j["server_freq"] = range_json(s.server_freq);
  j["helper_freq"] = range_json(s.helper_freq);
  j["ue_freq"] = range_json(s.ue_freq);
  j["helper_emax"] = range_json(s.helper_emax);
  j["pmax_dbm"] = s.pmax_dbm;
  j["intensity"] = s.intensity;
  j["t_max"] = s.t_max;
  j["epsilon"] = s.epsilon;
  j["data_bits"] = s.data_bits;
  j["weight_e"] = s.weight_e;
  j["axis"] = to_string(s.axis);
  j["sweep_values"] = s.sweep_values;
  j["seeds"] = s.seeds;
  j["runs"] = s.runs;
  j["workers"] = s.workers;
  j["record_wall_time"] = s.record_wall_time;
  return j;
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  try {
    s.figure = j.value("figure", s.figure);
    if (j.contains("shapes")) s.shapes = j.at("shapes").get<std::vector<Shape>>();
    if (j.contains("server_capacity")) s.server_capacity = j.at("server_capacity").get<std::size_t>();
    if (j.contains("server_freq")) s.server_freq = range_from(j.at("server_freq"));
    if (j.contains("helper_freq")) s.helper_freq = range_from(j.at("helper_freq"));
    if (j.contains("ue_freq")) s.ue_freq = range_from(j.at("ue_freq"));
    if (j.contains("helper_emax")) s.helper_emax = range_from(j.at("helper_emax"));
    s.pmax_dbm = j.value("pmax_dbm", s.pmax_dbm);
    s.intensity = j.value("intensity", s.intensity);
    s.t_max = j.value("t_max", s.t_max);
    s.epsilon = j.value("epsilon", s.epsilon);
    if (j.contains("data_bits")) s.data_bits = j.at("data_bits").get<std::vector<double>>();
    if (j.contains("weight_e")) s.weight_e = j.at("weight_e").get<std::vector<double>>();
    if (j.contains("axis")) {
      const auto axis = parse_axis(j.at("axis").get<std::string>());
      if (!axis) throw ModelError("unknown sweep axis");
      s.axis = *axis;
    }
    if (j.contains("sweep_values")) s.sweep_values = j.at("sweep_values").get<std::vector<double>>();
    if (j.contains("seeds")) s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("runs")) s.runs = j.at("runs").get<std::vector<std::string>>();
    s.workers = j.value("workers", s.workers);
    s.record_wall_time = j.value("record_wall_time", s.record_wall_time);
  } catch (const json::exception& e) {
    throw ModelError(std::string("bad experiment JSON: ") + e.what());
  }
  s.validate();
  return s;
}

Instance make_instance(const ExperimentSpec& spec, const Shape& shape,
                       std::optional<double> sweep_value, std::uint64_t seed) {
  auto [n, m, k, l] = shape;
  if (sweep_value && spec.axis == SweepAxis::Helpers) m = static_cast<std::size_t>(std::llround(*sweep_value));

  Instance in;
  ScenarioConfig& c = in.config;
  c = make_uniform_config(n, m, k, l);
  c.pmax_dbm = spec.pmax_dbm;
  c.ipca_epsilon = spec.epsilon;
  c.server_capacity.assign(k, spec.server_capacity.value_or(n));

  Rng rng(derive_seed(seed, kNodeStream));
  for (double& f : c.server_fmax) f = rng.uniform(spec.server_freq.lo, spec.server_freq.hi);
  for (double& f : c.helper_freq) f = rng.uniform(spec.helper_freq.lo, spec.helper_freq.hi);
  for (double& e : c.helper_emax) e = rng.uniform(spec.helper_emax.lo, spec.helper_emax.hi);
  for (double& f : c.ue_freq) f = rng.uniform(spec.ue_freq.lo, spec.ue_freq.hi);
  if (sweep_value && spec.axis == SweepAxis::HelperFreq) c.helper_freq.assign(m, *sweep_value);
  c.validate();

  in.topology = generate_topology(c, derive_seed(seed, kTopologyStream));
  in.channels = generate_channels(in.topology, c, derive_seed(seed, kChannelStream));
  for (std::size_t u = 0; u < n; ++u) {
    double bits = per_ue(spec.data_bits, u);
    double we = per_ue(spec.weight_e, u);
    if (sweep_value && spec.axis == SweepAxis::DataBits) bits = *sweep_value;
    if (sweep_value && spec.axis == SweepAxis::WeightE) we = *sweep_value;
    in.tasks.push_back(make_task(bits, we, spec.intensity, spec.t_max));
  }
  return in;
}

json to_json(const Instance& in) {
  const ScenarioConfig& c = in.config;
  json j;
  j["config"] = {{"n_ues", c.n_ues},
                 {"n_helpers", c.n_helpers},
                 {"n_servers", c.n_servers},
                 {"n_rbs", c.n_rbs},
                 {"bandwidth_hz", c.bandwidth_hz},
                 {"noise_dbm_per_hz", c.noise_dbm_per_hz},
                 {"pmax_dbm", c.pmax_dbm},
                 {"disc_radius_m", c.disc_radius_m},
                 {"d0", c.d0},
                 {"alpha", c.alpha},
                 {"kappa", c.kappa},
                 {"server_capacity", c.server_capacity},
                 {"server_fmax", c.server_fmax},
                 {"helper_freq", c.helper_freq},
                 {"helper_emax", c.helper_emax},
                 {"ue_freq", c.ue_freq},
                 {"ipca_epsilon", c.ipca_epsilon}};
  auto points = [](const std::vector<Point>& ps) {
    json a = json::array();
    for (const Point& p : ps) a.push_back({p.x, p.y});
    return a;
  };
  j["topology"] = {{"ues", points(in.topology.ues)},
                   {"helpers", points(in.topology.helpers)},
                   {"servers", points(in.topology.servers)}};
  json tasks = json::array();
  for (const TaskSpec& t : in.tasks)
    tasks.push_back({{"data_bits", t.data_bits},
                     {"intensity", t.intensity},
                     {"t_max", t.t_max},
                     {"weight_e", t.weight_e},
                     {"weight_t", t.weight_t}});
  j["tasks"] = tasks;

  const ChannelRealization& ch = in.channels;
  json helper = json::array(), server = json::array();
  for (std::size_t n = 0; n < ch.n_ues(); ++n) {
    json hn = json::array(), sn = json::array();
    for (std::size_t m = 0; m < ch.n_helpers(); ++m) {
      json row = json::array();
      for (std::size_t l = 0; l < ch.n_rbs(); ++l) row.push_back(ch.helper(n, m, l));
      hn.push_back(row);
    }
    for (std::size_t k = 0; k < ch.n_servers(); ++k) {
      json row = json::array();
      for (std::size_t l = 0; l < ch.n_rbs(); ++l) row.push_back(ch.server(n, k, l));
      sn.push_back(row);
    }
    helper.push_back(hn);
    server.push_back(sn);
  }
  j["channels"] = {{"helper", helper}, {"server", server}};
  return j;
}

Instance instance_from_json(const json& j) {
  try {
    Instance in;
    const json& c = j.at("config");
    ScenarioConfig& cfg = in.config;
    cfg.n_ues = c.at("n_ues").get<std::size_t>();
    cfg.n_helpers = c.at("n_helpers").get<std::size_t>();
    cfg.n_servers = c.at("n_servers").get<std::size_t>();
    cfg.n_rbs = c.at("n_rbs").get<std::size_t>();
    cfg.bandwidth_hz = c.value("bandwidth_hz", cfg.bandwidth_hz);
    cfg.noise_dbm_per_hz = c.value("noise_dbm_per_hz", cfg.noise_dbm_per_hz);
    cfg.pmax_dbm = c.value("pmax_dbm", cfg.pmax_dbm);
    cfg.disc_radius_m = c.value("disc_radius_m", cfg.disc_radius_m);
    cfg.d0 = c.value("d0", cfg.d0);
    cfg.alpha = c.value("alpha", cfg.alpha);
    cfg.kappa = c.value("kappa", cfg.kappa);
    cfg.server_capacity = c.at("server_capacity").get<std::vector<std::size_t>>();
    cfg.server_fmax = c.at("server_fmax").get<std::vector<double>>();
    cfg.helper_freq = c.at("helper_freq").get<std::vector<double>>();
    cfg.helper_emax = c.at("helper_emax").get<std::vector<double>>();
    cfg.ue_freq = c.at("ue_freq").get<std::vector<double>>();
    cfg.ipca_epsilon = c.value("ipca_epsilon", cfg.ipca_epsilon);
    cfg.validate();

    auto points = [](const json& a) {
      std::vector<Point> ps;
      for (const json& p : a) ps.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      return ps;
    };
    if (j.contains("topology")) {
      const json& t = j.at("topology");
      in.topology.ues = points(t.at("ues"));
      in.topology.helpers = points(t.at("helpers"));
      in.topology.servers = points(t.at("servers"));
    }
    for (const json& t : j.at("tasks")) {
      TaskSpec task = make_task(t.at("data_bits").get<double>(), t.at("weight_e").get<double>(),
                                t.value("intensity", 1e3), t.value("t_max", 0.9));
      task.weight_t = t.value("weight_t", 1.0 - task.weight_e);
      task.validate();
      in.tasks.push_back(task);
    }
    if (in.tasks.size() != cfg.n_ues) throw ModelError("task count differs from n_ues");

    if (j.contains("channels")) {
      in.channels = ChannelRealization(cfg.n_ues, cfg.n_helpers, cfg.n_servers, cfg.n_rbs);
      const json& h = j.at("channels").at("helper");
      const json& s = j.at("channels").at("server");
      for (std::size_t n = 0; n < cfg.n_ues; ++n)
        for (std::size_t l = 0; l < cfg.n_rbs; ++l) {
          for (std::size_t m = 0; m < cfg.n_helpers; ++m)
            in.channels.set_helper(n, m, l, h.at(n).at(m).at(l).get<double>());
          for (std::size_t k = 0; k < cfg.n_servers; ++k)
            in.channels.set_server(n, k, l, s.at(n).at(k).at(l).get<double>());
        }
    } else if (j.contains("topology")) {
      const std::uint64_t seed = j.value("channel_seed", std::uint64_t{0});
      in.channels = generate_channels(in.topology, cfg, derive_seed(seed, kChannelStream));
    } else {
      throw ModelError("instance needs channels or a topology");
    }
    return in;
  } catch (const json::exception& e) {
    throw ModelError(std::string("bad instance JSON: ") + e.what());
  }
}

namespace {

void fill_from_scheme(ResultRow& row, const SchemeResult& r) {
  row.medt = r.medt;
  row.objective = r.objective;
  row.iterations = r.solution.iterations;
  row.ss_ops = r.swap_operations;
  row.lj_ops = r.leave_join_operations;
  row.edt = r.edt;
  row.trace = r.solution.phi_trace;
  if (!r.energy.empty()) row.max_energy = *std::max_element(r.energy.begin(), r.energy.end());
  if (!r.delay.empty()) row.max_delay = *std::max_element(r.delay.begin(), r.delay.end());
  if (!r.applicable) row.status = "inapplicable";
  else if (!r.feasible()) row.status = r.note;
}

void fill_from_solution(ResultRow& row, const Instance& in, const Matching& matching,
                        const PatacraSolution& sol, const LinkModel& link) {
  row.objective = sol.phi();
  row.iterations = sol.iterations;
  row.trace = sol.phi_trace;
  if (!sol.feasible()) {
    row.status = to_string(sol.status);
    return;
  }
  const EdtReport rep = evaluate_edt(in.config, in.tasks, in.channels, matching, sol.alloc, link);
  row.medt = rep.medt;
  for (const UeReport& u : rep.ues) {
    row.edt.push_back(u.edt);
    row.max_energy = std::max(row.max_energy, u.energy);
    row.max_delay = std::max(row.max_delay, u.delay);
  }
}

}  // namespace

std::vector<ResultRow> run_trial(const ExperimentSpec& spec, const Shape& shape,
                                 std::optional<double> sweep_value, std::uint64_t seed) {
  std::vector<ResultRow> rows;
  ResultRow base;
  base.figure = spec.figure;
  base.seed = seed;
  base.sweep = sweep_value.value_or(0.0);
  base.shape = shape;

  std::optional<Instance> in;
  try {
    in = make_instance(spec, shape, sweep_value, seed);
    base.shape = {in->config.n_ues, in->config.n_helpers, in->config.n_servers, in->config.n_rbs};
    base.data_bits = in->tasks.front().data_bits;
    base.weight_e = in->tasks.front().weight_e;
  } catch (const std::exception& e) {
    for (const std::string& run : spec.runs) {
      ResultRow row = base;
      row.run = run;
      row.status = std::string("error: ") + e.what();
      rows.push_back(row);
    }
    return rows;
  }

  std::optional<SchemeResult> proposed;
  auto get_proposed = [&]() -> const SchemeResult& {
    if (!proposed) proposed = solve_scheme(SchemeId::ProposedNoma, in->config, in->channels, in->tasks);
    return *proposed;
  };

  for (const std::string& run : spec.runs) {
    ResultRow row = base;
    row.run = run;
    const auto start = std::chrono::steady_clock::now();
    try {
      if (run == "ao") {
        const SchemeResult& p = get_proposed();
        if (!p.feasible()) {
          row.status = "no proposed matching";
        } else {
          const PatacraSolution ao = solve_ao(p.matching, in->channels, in->tasks, in->config);
          fill_from_solution(row, *in, p.matching, ao, {});
        }
      } else if (run == "exhaustive") {
        const SchemeSetup setup = scheme_setup(SchemeId::ProposedNoma, in->config);
        const MatchingContext ctx{in->config, in->channels, in->tasks, setup.layout, setup.patacra};
        UtilityCache cache;
        const ExhaustiveResult es = exhaustive_search(ctx, cache);
        fill_from_solution(row, *in, es.matching, es.solution, {});
      } else {
        const SchemeId id = *parse_scheme(run);
        if (id == SchemeId::ProposedNoma) fill_from_scheme(row, get_proposed());
        else fill_from_scheme(row, solve_scheme(id, in->config, in->channels, in->tasks));
      }
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    if (spec.record_wall_time)
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Trial {
    Shape shape;
    std::optional<double> sweep;
    std::uint64_t seed;
  };
  std::vector<Trial> trials;
  for (const Shape& shape : spec.shapes) {
    std::vector<std::optional<double>> points;
    if (spec.axis == SweepAxis::None) points.push_back(std::nullopt);
    else points.assign(spec.sweep_values.begin(), spec.sweep_values.end());
    for (const auto& p : points)
      for (std::uint64_t seed : spec.seeds) trials.push_back({shape, p, seed});
  }

  std::vector<std::vector<ResultRow>> out(trials.size());
  const auto workers = static_cast<std::size_t>(spec.workers);
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials.size(); ++i)
      out[i] = run_trial(spec, trials[i].shape, trials[i].sweep, trials[i].seed);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < trials.size(); i += workers)
          out[i] = run_trial(spec, trials[i].shape, trials[i].sweep, trials[i].seed);
      }));
    for (auto& j : jobs) j.get();
  }
  std::vector<ResultRow> rows;
  for (auto& r : out) rows.insert(rows.end(), r.begin(), r.end());
  return rows;
}

// --- CSV ---------------------------------------------------------------------

namespace {

constexpr const char* kHeader =
    "figure,seed,sweep,run,n_ues,n_helpers,n_servers,n_rbs,data_bits,weight_e,medt,objective,"
    "max_energy,max_delay,iterations,ss_ops,lj_ops,wall_ms,status,edt,trace";

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ';';
    s += num(v[i]);
  }
  return s;
}

std::vector<double> split_numbers(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ';'))
    if (!item.empty()) v.push_back(std::stod(item));
  return v;
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

void write_csv_header(std::ostream& os) { os << kHeader << '\n'; }

void write_csv_row(std::ostream& os, const ResultRow& r) {
  os << r.figure << ',' << r.seed << ',' << num(r.sweep) << ',' << r.run << ',' << r.shape[0] << ','
     << r.shape[1] << ',' << r.shape[2] << ',' << r.shape[3] << ',' << num(r.data_bits) << ','
     << num(r.weight_e) << ',' << num(r.medt) << ',' << num(r.objective) << ',' << num(r.max_energy)
     << ',' << num(r.max_delay) << ',' << r.iterations << ',' << r.ss_ops << ',' << r.lj_ops << ','
     << num(r.wall_ms) << ',' << sanitize(r.status) << ',' << join(r.edt) << ',' << join(r.trace)
     << '\n';
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  write_csv_header(os);
  for (const ResultRow& r : rows) write_csv_row(os, r);
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw ModelError("CSV header mismatch");
  std::vector<ResultRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    while (f.size() < 21) f.emplace_back();
    if (f.size() != 21) throw ModelError("CSV row has " + std::to_string(f.size()) + " fields");
    try {
      ResultRow r;
      r.figure = f[0];
      r.seed = std::stoull(f[1]);
      r.sweep = std::stod(f[2]);
      r.run = f[3];
      for (int i = 0; i < 4; ++i) r.shape[static_cast<std::size_t>(i)] = std::stoul(f[4 + static_cast<std::size_t>(i)]);
      r.data_bits = std::stod(f[8]);
      r.weight_e = std::stod(f[9]);
      r.medt = std::stod(f[10]);
      r.objective = std::stod(f[11]);
      r.max_energy = std::stod(f[12]);
      r.max_delay = std::stod(f[13]);
      r.iterations = std::stoi(f[14]);
      r.ss_ops = std::stoul(f[15]);
      r.lj_ops = std::stoul(f[16]);
      r.wall_ms = std::stod(f[17]);
      r.status = f[18];
      r.edt = split_numbers(f[19]);
      r.trace = split_numbers(f[20]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ModelError(std::string("bad CSV row: ") + e.what());
    }
  }
  return rows;
}

}  // namespace nomamec::bench
