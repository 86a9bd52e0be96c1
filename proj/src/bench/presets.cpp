#include <numeric>

#include "nomamec/bench.hpp"

namespace nomamec::bench {

namespace {

const std::vector<std::string> kComparison{"proposed", "fdma_helpers", "tdma_helpers",
                                           "fdma_no_helpers", "noma_no_helpers"};

ExperimentSpec base(const std::string& figure, std::size_t seeds) {
  ExperimentSpec s;
  s.figure = figure;
  s.seeds.resize(seeds);
  std::iota(s.seeds.begin(), s.seeds.end(), std::uint64_t{0});
  return s;
}

std::vector<double> steps(double first, double last, double step) {
  std::vector<double> v;
  for (double x = first; x <= last + 1e-9 * step; x += step) v.push_back(x);
  return v;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"};
}

std::optional<std::vector<ExperimentSpec>> preset(const std::string& name, std::size_t seeds) {
  std::vector<ExperimentSpec> out;
  if (name == "fig2") {
    // Convergence traces: every (D, weight) combination.
    for (double we : {0.3, 0.6}) {
      ExperimentSpec s = base(name, seeds);
      s.weight_e = {we};
      s.axis = SweepAxis::DataBits;
      s.sweep_values = {1e5, 2e5};
      s.runs = {"proposed"};
      out.push_back(s);
    }
  } else if (name == "fig3") {
    for (double bits : {1e5, 2e5}) {
      ExperimentSpec s = base(name, seeds);
      s.data_bits = {bits};
      s.axis = SweepAxis::HelperFreq;
      s.sweep_values = steps(15e9, 20e9, 1e9);
      s.runs = {"proposed", "ao"};
      out.push_back(s);
    }
  } else if (name == "fig4") {
    ExperimentSpec s = base(name, seeds);
    s.shapes = {{2, 2, 1, 2}, {2, 5, 1, 3}};
    s.weight_e = {0.6, 0.3};
    s.axis = SweepAxis::DataBits;
    s.sweep_values = steps(1e5, 5e5, 1e5);
    s.runs = {"proposed", "exhaustive"};
    out.push_back(s);
  } else if (name == "fig5") {
    ExperimentSpec s = base(name, seeds);
    s.data_bits = {1e5};
    s.axis = SweepAxis::WeightE;
    s.sweep_values = steps(0.0, 1.0, 0.1);
    s.runs = kComparison;
    out.push_back(s);
  } else if (name == "fig6") {
    ExperimentSpec s = base(name, seeds);
    s.shapes = {{4, 4, 4, 4}};
    s.data_bits = {1e6};
    s.weight_e = {0.5};
    s.runs = {"proposed", "sum_edt"};
    out.push_back(s);
  } else if (name == "fig7") {
    ExperimentSpec s = base(name, seeds);
    s.data_bits = {5e5};
    s.weight_e = {0.5};
    s.axis = SweepAxis::Helpers;
    s.sweep_values = steps(2, 10, 2);
    s.runs = kComparison;
    out.push_back(s);
  } else if (name == "fig8") {
    ExperimentSpec s = base(name, seeds);
    s.weight_e = {0.5};
    s.axis = SweepAxis::DataBits;
    s.sweep_values = steps(1e5, 1e6, 1e5);
    s.runs = kComparison;
    out.push_back(s);
  } else {
    return std::nullopt;
  }
  return out;
}

}  // namespace nomamec::bench
