#pragma once

// Independent validators: brute-force grid search over the continuous
// allocation, the perspective-function Hessian sampler and a constraint
// replay written from the raw model formulas.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nomamec/model.hpp"
#include "nomamec/patacra.hpp"

namespace nomamec::oracle {

struct GridSpec {
  int eta_resolution = 200;  // steps on [0, 1] for each share
  int tau_resolution = 200;  // log-spaced points on (tau_min_fraction * t_max, t_max]
  double tau_min_fraction = 1e-4;
  int split_resolution = 20;  // proportional server splits (21 points) when two UEs share a server
  bool offload = true;        // false pins both shares to 0
};

struct GridResult {
  double phi = kInfinity;
  std::vector<double> eta_h, eta_s, tau, f_s;  // per UE at the best point
  std::size_t evaluated = 0;
};

/// Best mEDT over the grid for the proposed NOMA model. N <= 2.
GridResult grid_search_patacra(const Matching& matching, const ChannelRealization& channels,
                               const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                               const GridSpec& grid = {});

/// Hessian of f(x, y) = y 2^(x/y).
std::array<double, 4> perspective_hessian(double x, double y);
double hessian_quadratic_form(double x, double y, double v1, double v2);

/// Most negative v^T H v over random (x, y > 0, v).
double hessian_psd_sample(std::size_t samples, std::uint64_t seed);

struct ViolationReport {
  /// Max relative violation per constraint family (0 when satisfied).
  std::map<std::string, double> families;
  double max() const;
  std::string worst() const;
};

/// Replays every original constraint on the raw numbers of an allocation.
/// A finite `alloc.phi` is checked as the bound on max EDT (MinMax) or the
/// EDT sum (Sum).
ViolationReport replay_constraints(const ContinuousAllocation& alloc, const Matching& matching,
                                   const ChannelRealization& channels,
                                   const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                                   const LinkModel& model = {},
                                   const AssociationLayout& layout = {},
                                   Objective objective = Objective::MinMax);

}  // namespace nomamec::oracle
