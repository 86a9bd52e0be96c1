#pragma once

// Seeded Monte-Carlo experiments: instance sampling, scheme runs, CSV rows,
// figure presets and the aggregation pass.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nomamec/model.hpp"
#include "nomamec/schemes.hpp"

namespace nomamec::bench {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

enum class SweepAxis { None, DataBits, Helpers, WeightE, HelperFreq };

const char* to_string(SweepAxis axis);
std::optional<SweepAxis> parse_axis(const std::string& name);

/// (N, M, K, L)
using Shape = std::array<std::size_t, 4>;

struct ExperimentSpec {
  std::string figure = "custom";
  std::vector<Shape> shapes{{2, 2, 2, 2}};
  /// Per-server capacity; the UE count when absent.
  std::optional<std::size_t> server_capacity;

  Range server_freq{20e9, 25e9};
  Range helper_freq{15e9, 20e9};
  Range ue_freq{2e9, 8e9};
  Range helper_emax{0.8, 1.0};
  double pmax_dbm = 28.0;
  double intensity = 1e3;
  double t_max = 0.9;
  double epsilon = 1e-6;

  /// Per-UE values; a single entry applies to every UE.
  std::vector<double> data_bits{1e5};
  std::vector<double> weight_e{0.5};

  SweepAxis axis = SweepAxis::None;
  std::vector<double> sweep_values;

  std::vector<std::uint64_t> seeds;
  /// Scheme names, plus "ao" (alternating solver on the proposed matching)
  /// and "exhaustive" (exhaustive association search, proposed model).
  std::vector<std::string> runs{"proposed"};

  int workers = 1;
  bool record_wall_time = true;

  /// Throws ModelError on unknown runs, empty shapes or bad ranges.
  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct Instance {
  ScenarioConfig config;
  Topology topology;
  ChannelRealization channels;
  std::vector<TaskSpec> tasks;
};

/// One trial. Draws depend only on (seed, shape); the sweep value overrides
/// its parameter after the draws.
Instance make_instance(const ExperimentSpec& spec, const Shape& shape,
                       std::optional<double> sweep_value, std::uint64_t seed);

/// Includes the channel gains, so instance_from_json reproduces the instance exactly.
nlohmann::json to_json(const Instance& instance);
/// Throws ModelError on malformed input. Without stored gains, channels are
/// redrawn from the topology and "channel_seed".
Instance instance_from_json(const nlohmann::json& j);

struct ResultRow {
  std::string figure;
  std::uint64_t seed = 0;
  double sweep = 0.0;
  std::string run;
  Shape shape{};
  double data_bits = 0.0;
  double weight_e = 0.0;
  double medt = kInfinity;
  double objective = kInfinity;
  double max_energy = 0.0;
  double max_delay = 0.0;
  int iterations = 0;
  std::size_t ss_ops = 0;
  std::size_t lj_ops = 0;
  double wall_ms = 0.0;
  std::string status = "ok";
  std::vector<double> edt;    // per UE
  std::vector<double> trace;  // objective per iteration (rounds for "ao")
};

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

/// Rows of one trial, in spec.runs order.
std::vector<ResultRow> run_trial(const ExperimentSpec& spec, const Shape& shape,
                                 std::optional<double> sweep_value, std::uint64_t seed);

void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const ResultRow& row);
void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);

/// Figure presets fig2 ... fig8 with the given seed count. A figure with
/// several fixed settings (weights, data sizes) expands into several specs
/// sharing its tag.
std::optional<std::vector<ExperimentSpec>> preset(const std::string& name, std::size_t seeds = 20);
std::vector<std::string> preset_names();

struct SummaryRow {
  Shape shape{};
  double sweep = 0.0;
  double weight_e = 0.0;
  double data_bits = 0.0;
  std::string run;
  std::size_t count = 0;  // finite mEDT values
  double mean = 0.0;
  double stddev = 0.0;
  /// Mean over seeds of (run - reference) / reference; NaN when no pairs.
  double gap = 0.0;
  std::size_t gap_count = 0;
};

/// Reference run for normalized gaps: "exhaustive" when present, else "proposed".
std::string reference_run(const std::vector<ResultRow>& rows);

/// Throws ModelError when rows mix figure tags.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace nomamec::bench
