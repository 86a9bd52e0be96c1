#pragma once

// Internal assembly of the per-iteration convex programs. Shared by the
// iterative solver, the alternating solver and the comparison schemes.

#include <optional>
#include <vector>

#include "nomamec/conic.hpp"
#include "nomamec/model.hpp"
#include "nomamec/patacra.hpp"

namespace nomamec::detail {

using conic::VarId;

struct UeContext {
  UeLink link;
  TaskSpec task;
  double f_local = 0.0;
  double server_fmax = 0.0;
  double helper_server_fmax = 0.0;  // HelperKind::Server only
  DerivedCoefficients coeffs;       // LinkMode::Noma only
  double pmax = 0.0;
  double kappa = 0.0;

  bool active() const { return task.data_bits > 0.0; }
  bool can_offload() const { return active() && pmax > 0.0; }
  double cycles() const { return task.cycles(); }
  double local_energy_per_share() const;  // J for the whole task run locally
};

UeContext make_context(const UeLink& link, const TaskSpec& task, const ScenarioConfig& config,
                       std::size_t ue);
std::vector<UeContext> make_contexts(const ScenarioConfig& config,
                                     const ChannelRealization& channels, const Matching& matching,
                                     const std::vector<TaskSpec>& tasks, const LinkModel& model);

/// Frequencies pinned for the server leg (and a server-executed helper leg).
struct FixedFrequencies {
  std::vector<double> f_s;
  std::vector<double> f_h;
};

struct UeVars {
  std::optional<VarId> tau, tau_s, eta_h, eta_s, fhat_s, fhat_h, beta, xi_s, xi_h;
  std::optional<VarId> z1, z2, u1, u2, u3, u4, w1, w2, t1, t2, phi_n;
  /// (exact lower bound on u^2, u) for every linearized slot.
  std::vector<std::pair<conic::LinearExpr, VarId>> surrogates;
};

struct Built {
  conic::ConicProgram program;
  std::optional<VarId> phi;  // MinMax only
  std::vector<UeVars> ues;
};

Built build_program(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                    const SurrogateParams& params, Objective objective,
                    const FixedFrequencies* fixed);

/// Frequency block of the alternating solver: (tau, eta) pinned at `alloc`,
/// server shares, execution bounds, beta and phi free.
Built build_frequency_block(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                            const ContinuousAllocation& alloc, Objective objective);

ContinuousAllocation extract_allocation(const Built& built, const conic::SolveResult& result,
                                        const std::vector<UeContext>& ctx,
                                        const FixedFrequencies* fixed);

/// Frequencies of a frequency-block solution, with (tau, eta, powers) copied from `base`.
ContinuousAllocation extract_frequency_block(const Built& built, const conic::SolveResult& result,
                                             const std::vector<UeContext>& ctx,
                                             const ContinuousAllocation& base);

SurrogateParams next_params(const Built& built, const conic::SolveResult& result,
                            const SurrogateParams& previous);

/// max over surrogate slots of (exact lower bound - u^2) at the solution.
double surrogate_residual(const Built& built, const conic::SolveResult& result,
                          const std::vector<UeContext>& ctx);

/// Transmission energy of a UE's allocation under its link model.
double transmission_energy(const UeContext& ctx, const UeAllocation& a);

/// Tight linearization points at the given allocation.
std::array<double, 4> params_at(const UeContext& ctx, const UeAllocation& a);

/// Heuristic starting allocation for one UE; nullopt when only local execution passes.
std::optional<UeAllocation> heuristic_start(const UeContext& ctx, double f_s, double f_h,
                                            const ScenarioConfig& config);

/// Tight points at the heuristic start for the given frequencies; floored
/// points for UEs with no offloading start.
SurrogateParams start_params(const std::vector<UeContext>& ctx, const FixedFrequencies& f,
                             const ScenarioConfig& config);

SurrogateParams floored_params(std::size_t n_ues);

/// Successive convex approximation from `params`. With `fixed` set the
/// server shares are pinned.
PatacraSolution run_ipca(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                         SurrogateParams params, const PatacraOptions& options,
                         const FixedFrequencies* fixed);

/// Equal split of every server among the legs it executes.
FixedFrequencies equal_split(const std::vector<UeContext>& ctx, const ScenarioConfig& config);

}  // namespace nomamec::detail
