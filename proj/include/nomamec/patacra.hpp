#pragma once

// Continuous allocation for a fixed association: power recovery, the convex
// approximation solved at each iteration, the iterative solver and the
// alternating (two-block) comparison solver.

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "nomamec/conic.hpp"
#include "nomamec/model.hpp"

namespace nomamec {

/// Inverse-gain combinations that turn the two NOMA rate equations into a
/// closed-form total power.
struct DerivedCoefficients {
  double a1 = 0.0;  // weight of 2^(eta_o2 x) - 1
  double a2 = 0.0;  // weight of 2^((eta_h + eta_s) x) - 1
  int o = 0;

  /// Share decoded first at the stronger receiver.
  double eta_o1(double eta_h, double eta_s) const { return (1 - o) * eta_h + o * eta_s; }
  /// Share decoded under interference.
  double eta_o2(double eta_h, double eta_s) const { return o * eta_h + (1 - o) * eta_s; }
};

/// For a link without a helper leg the server stream is alone: a1 = 1/g_s, a2 = 0.
DerivedCoefficients derive_coefficients(const UeLink& link);
DerivedCoefficients derive_coefficients(double gain_h, double gain_s);

/// g(x) = 2^x - 1
double pow2m1(double x);

/// Transmit powers (p_h, p_s) that deliver eta_h D and eta_s D bits in tau
/// seconds over one NOMA block of the given bandwidth.
std::pair<double, double> recover_powers(double tau, double eta_h, double eta_s,
                                         const DerivedCoefficients& coeffs, const TaskSpec& task,
                                         double bandwidth_hz);
std::pair<double, double> recover_powers(double tau, double eta_h, double eta_s,
                                         const DerivedCoefficients& coeffs, const TaskSpec& task,
                                         const ScenarioConfig& config);

/// Linearization points per UE: {u1, u2, u3, u4}. The meaning of each slot
/// depends on the link mode (see the builder).
using SurrogateParams = std::vector<std::array<double, 4>>;

inline constexpr double kSurrogateFloor = 1e-6;
inline constexpr double kServerSurrogateFloor = 1e-9;

enum class Objective { MinMax, Sum };

/// Stalled: a later convexified solve failed; the last solved iterate is
/// reported and remains feasible. NumericalFailure: nothing was solved.
enum class PatacraStatus { Converged, IterationLimit, Stalled, Infeasible, NumericalFailure };

const char* to_string(PatacraStatus status);

struct PatacraOptions {
  LinkModel link;
  Objective objective = Objective::MinMax;
  std::optional<double> epsilon;  // defaults to config.ipca_epsilon
  int max_iterations = 100;
  bool warm_start = true;
  /// Record the surrogate-safety residual of each iteration.
  bool check_surrogates = true;
};

struct PatacraSolution {
  ContinuousAllocation alloc;
  std::vector<double> phi_trace;
  int iterations = 0;
  PatacraStatus status = PatacraStatus::Infeasible;
  /// Worst value of (lower bound - u^2) seen over all iterations; <= 0 when safe.
  double surrogate_residual = 0.0;
  SurrogateParams final_params;

  bool feasible() const {
    return status == PatacraStatus::Converged || status == PatacraStatus::IterationLimit ||
           status == PatacraStatus::Stalled;
  }
  double phi() const { return feasible() ? alloc.phi : kInfinity; }
};

/// Links of every UE under the given association and link model.
std::vector<UeLink> resolve_links(const ScenarioConfig& config, const ChannelRealization& channels,
                                  const Matching& matching, const LinkModel& model);

/// Heuristic feasible starting point. Falls back to all-local with floored
/// surrogates when no offloading point passes the checks.
SurrogateParams initial_point(const Matching& matching, const ChannelRealization& channels,
                              const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                              const LinkModel& model = {});

/// Linearization points tight at a given allocation.
SurrogateParams params_from_allocation(const ContinuousAllocation& alloc,
                                       const std::vector<UeLink>& links,
                                       const std::vector<TaskSpec>& tasks,
                                       const ScenarioConfig& config);

/// The convex approximation around `params`, with handles to its variables.
struct BuiltSubproblem {
  conic::ConicProgram program;
  std::optional<conic::VarId> phi;  // MinMax only
};

BuiltSubproblem build_subproblem(const Matching& matching, const ChannelRealization& channels,
                                 const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                                 const SurrogateParams& params, const PatacraOptions& options = {});

PatacraSolution solve_patacra(const Matching& matching, const ChannelRealization& channels,
                              const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                              const PatacraOptions& options = {});

struct AoOptions {
  PatacraOptions patacra;
  /// Starting frequency split (cycles/s per UE, server leg). Equal split when absent.
  std::optional<std::vector<double>> initial_f;
  /// Starting allocation for the first block. Heuristic start when absent.
  std::optional<ContinuousAllocation> initial_alloc;
  int max_rounds = 100;
};

PatacraSolution solve_ao(const Matching& matching, const ChannelRealization& channels,
                         const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                         const AoOptions& options = {});

}  // namespace nomamec
