#include <algorithm>
#include <cmath>

#include "nomamec/model.hpp"

namespace nomamec {

namespace {

bool leq(double lhs, double rhs, double tol) {
  return lhs <= rhs + tol * std::max(1.0, std::abs(rhs));
}

bool leq_rel(double lhs, double rhs, double tol) { return lhs <= rhs + tol * std::abs(rhs); }

/// Per-leg transmission rates of one UE under its link model.
struct LegRates {
  double helper = 0.0;
  double server = 0.0;
};

LegRates leg_rates(const UeLink& link, double p_h, double p_s) {
  LegRates r;
  switch (link.mode) {
    case LinkMode::Noma:
      if (link.has_helper()) r.helper = rate_helper(p_h, p_s, link.gain_h, link.o, link.bandwidth_h);
      r.server = rate_server(link.has_helper() ? p_h : 0.0, p_s, link.gain_s, link.o, link.bandwidth_s);
      break;
    case LinkMode::Tdma:
    case LinkMode::Fdma:
      if (link.has_helper() && p_h > 0.0) r.helper = link.bandwidth_h * std::log2(1.0 + p_h * link.gain_h);
      if (p_s > 0.0) r.server = link.bandwidth_s * std::log2(1.0 + p_s * link.gain_s);
      break;
  }
  return r;
}

}  // namespace

EdtReport evaluate_edt(const ScenarioConfig& config, const std::vector<TaskSpec>& tasks,
                       const ChannelRealization& channels, const Matching& matching,
                       const ContinuousAllocation& alloc, const LinkModel& model,
                       double tolerance) {
  const std::size_t n_ues = config.n_ues;
  if (tasks.size() != n_ues || matching.size() != n_ues || alloc.ues.size() != n_ues)
    throw ModelError("evaluate_edt: dimension mismatch");

  EdtReport report;
  report.ues.resize(n_ues);
  FeasibilityFlags& flags = report.flags;
  const double pmax = config.pmax_w();
  std::vector<double> server_load(config.n_servers, 0.0);
  std::vector<double> helper_energy(config.n_helpers, 0.0);

  for (std::size_t n = 0; n < n_ues; ++n) {
    const TaskSpec& task = tasks[n];
    const UeAllocation& a = alloc.ues[n];
    const UeLink link = resolve_link(config, channels, matching.units[n], n, model);
    UeReport& ue = report.ues[n];

    const double eta_h = link.has_helper() ? a.eta_h : 0.0;
    if (!link.has_helper() && std::abs(a.eta_h) > tolerance) flags.task_split = false;
    const double eta_s = a.eta_s;
    if (eta_h < -tolerance || eta_s < -tolerance || eta_h + eta_s > 1.0 + tolerance)
      flags.task_split = false;
    const double local_share = std::max(0.0, 1.0 - eta_h - eta_s);
    const double bits = task.data_bits;
    const double cycles = task.cycles();

    // Power budget.
    if (a.p_h < -tolerance * pmax || a.p_s < -tolerance * pmax) flags.power = false;
    const double power_used = link.mode == LinkMode::Tdma ? std::max(a.p_h, a.p_s) : a.p_h + a.p_s;
    if (!leq_rel(power_used, pmax, tolerance)) flags.power = false;

    // Transmission from achieved rates.
    const LegRates r = leg_rates(link, std::max(a.p_h, 0.0), std::max(a.p_s, 0.0));
    const bool carries_h = eta_h * bits > 0.0;
    const bool carries_s = eta_s * bits > 0.0;
    if (carries_h) {
      if (r.helper > 0.0) ue.tau_h = eta_h * bits / r.helper;
      else { flags.rates = false; ue.tau_h = kInfinity; }
    }
    if (carries_s) {
      if (r.server > 0.0) ue.tau_s = eta_s * bits / r.server;
      else { flags.rates = false; ue.tau_s = kInfinity; }
    }
    if (link.mode == LinkMode::Noma) {
      const double tau = a.tau;
      if (carries_h && std::abs(ue.tau_h - tau) > tolerance * std::max(tau, 1e-12)) flags.noma_timing = false;
      if (carries_s && std::abs(ue.tau_s - tau) > tolerance * std::max(tau, 1e-12)) flags.noma_timing = false;
    }

    // Execution.
    double exec_h = 0.0, exec_s = 0.0;
    if (carries_h) {
      const double f = link.helper_kind == HelperKind::Device ? link.helper_freq : a.f_h;
      if (f > 0.0) exec_h = eta_h * cycles / f;
      else { flags.rates = false; exec_h = kInfinity; }
      if (link.helper_kind == HelperKind::Device)
        helper_energy[static_cast<std::size_t>(link.helper)] += eta_h * cycles * config.kappa * f * f;
    }
    if (carries_s) {
      if (a.f_s > 0.0) exec_s = eta_s * cycles / a.f_s;
      else { flags.rates = false; exec_s = kInfinity; }
    }
    if (a.f_s < -tolerance) flags.server_frequency = false;
    server_load[static_cast<std::size_t>(link.server)] += std::max(a.f_s, 0.0);
    if (link.helper_kind == HelperKind::Server)
      server_load[static_cast<std::size_t>(link.helper)] += std::max(a.f_h, 0.0);

    const double f_local = config.ue_freq[n];
    ue.t_local = local_share * cycles / f_local;
    ue.t_helper = carries_h ? ue.tau_h + exec_h : 0.0;
    ue.t_server = carries_s ? ue.tau_s + exec_s : 0.0;
    if (link.mode == LinkMode::Tdma && carries_s) ue.t_server += ue.tau_h;
    ue.delay = std::max({ue.t_local, ue.t_helper, ue.t_server});
    if (!leq_rel(ue.delay, task.t_max, tolerance)) flags.deadline = false;

    double e_tran = 0.0;
    if (link.mode == LinkMode::Noma)
      e_tran = std::max(a.p_h, 0.0) * ue.tau_s + std::max(a.p_s, 0.0) * ue.tau_h;
    else
      e_tran = std::max(a.p_h, 0.0) * ue.tau_h + std::max(a.p_s, 0.0) * ue.tau_s;
    if (link.mode == LinkMode::Noma && !(carries_h && carries_s)) {
      // A single active stream: the idle stream's power multiplies the active duration.
      const double tau = std::max(ue.tau_h, ue.tau_s);
      e_tran = (std::max(a.p_h, 0.0) + std::max(a.p_s, 0.0)) * tau;
    }
    const double e_local = local_share * cycles * config.kappa * f_local * f_local;
    ue.energy = e_tran + e_local;
    ue.edt = task.weight_e * ue.energy + task.weight_t * ue.delay;
  }

  for (std::size_t k = 0; k < config.n_servers; ++k)
    if (!leq_rel(server_load[k], config.server_fmax[k], tolerance)) flags.server_frequency = false;
  for (std::size_t m = 0; m < config.n_helpers; ++m)
    if (!leq(helper_energy[m], config.helper_emax[m], tolerance)) flags.helper_energy = false;

  for (const UeReport& ue : report.ues) {
    report.medt = std::max(report.medt, ue.edt);
    report.sum_edt += ue.edt;
  }
  return report;
}

}  // namespace nomamec
