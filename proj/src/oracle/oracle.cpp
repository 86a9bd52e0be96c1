#include "nomamec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace nomamec::oracle {

namespace {

// Everything below recomputes the model from its defining formulas on purpose:
// the oracle must not share code with the conic encodings it validates.

double pow2m1_raw(double x) { return std::expm1(x * std::numbers::ln2); }

/// NOMA powers that hit the target spectral efficiencies (bits/s/Hz) exactly.
/// The stronger receiver cancels the other stream first.
std::pair<double, double> noma_powers(double se_h, double se_s, double gain_h, double gain_s,
                                      bool has_helper) {
  if (!has_helper) return {0.0, se_s > 0.0 ? pow2m1_raw(se_s) / gain_s : 0.0};
  if (gain_h >= gain_s) {
    // Helper decodes the server stream and removes it; server sees the helper stream as noise.
    const double p_h = pow2m1_raw(se_h) / gain_h;
    const double p_s = pow2m1_raw(se_s) * (p_h + 1.0 / gain_s);
    return {p_h, p_s};
  }
  const double p_s = pow2m1_raw(se_s) / gain_s;
  const double p_h = pow2m1_raw(se_h) * (p_s + 1.0 / gain_h);
  return {p_h, p_s};
}

struct UeGridInput {
  double bits = 0.0, cycles = 0.0, t_max = 0.0, w_e = 0.0, w_t = 0.0;
  double f_local = 0.0, kappa = 0.0, pmax = 0.0, bandwidth = 0.0;
  bool has_helper = false;
  double gain_h = 0.0, gain_s = 0.0, f_helper = 0.0, emax = kInfinity;
};

struct UeGridBest {
  double edt = kInfinity;
  double eta_h = 0.0, eta_s = 0.0, tau = 0.0;
  std::size_t evaluated = 0;
};

UeGridBest grid_one_ue(const UeGridInput& in, double f_server, const GridSpec& grid) {
  UeGridBest best;
  const double local_rate = in.f_local;
  const double local_energy_per_cycle = in.kappa * in.f_local * in.f_local;
  const int r_eta = grid.eta_resolution;
  // Points t_max * frac^(1 - i/R), i = 1..R: a finer resolution that is a
  // multiple of a coarser one contains all of its points.
  std::vector<double> taus(static_cast<std::size_t>(grid.tau_resolution));
  for (int i = 1; i <= grid.tau_resolution; ++i) {
    const double t = static_cast<double>(i) / grid.tau_resolution;
    taus[static_cast<std::size_t>(i - 1)] = in.t_max * std::pow(grid.tau_min_fraction, 1.0 - t);
  }

  const int eta_steps = grid.offload ? r_eta : 0;
  for (int ih = 0; ih <= (in.has_helper ? eta_steps : 0); ++ih) {
    const double eta_h = static_cast<double>(ih) / std::max(r_eta, 1);
    if (in.has_helper && eta_h * in.cycles * in.kappa * in.f_helper * in.f_helper > in.emax) break;
    for (int is = 0; ih + is <= eta_steps; ++is) {
      const double eta_s = static_cast<double>(is) / std::max(r_eta, 1);
      const double local = std::max(0.0, 1.0 - eta_h - eta_s);
      const double t_local = local * in.cycles / local_rate;
      const double e_local = local * in.cycles * local_energy_per_cycle;
      if (t_local > in.t_max) continue;
      if (eta_h == 0.0 && eta_s == 0.0) {
        ++best.evaluated;
        const double edt = in.w_e * e_local + in.w_t * t_local;
        if (edt < best.edt) best = {edt, 0.0, 0.0, 0.0, best.evaluated};
        continue;
      }
      if (eta_s > 0.0 && f_server <= 0.0) continue;
      const double exec_h = eta_h > 0.0 ? eta_h * in.cycles / in.f_helper : 0.0;
      const double exec_s = eta_s > 0.0 ? eta_s * in.cycles / f_server : 0.0;
      const double exec = std::max(exec_h, exec_s);
      for (double tau : taus) {
        ++best.evaluated;
        const double t_total = std::max(t_local, tau + exec);
        if (t_total > in.t_max) break;  // taus ascend
        const double scale = in.bits / (in.bandwidth * tau);
        const auto [p_h, p_s] =
            noma_powers(eta_h * scale, eta_s * scale, in.gain_h, in.gain_s, in.has_helper);
        if (p_h + p_s > in.pmax) continue;
        const double edt = in.w_e * ((p_h + p_s) * tau + e_local) + in.w_t * t_total;
        if (edt < best.edt) {
          const std::size_t count = best.evaluated;
          best = {edt, eta_h, eta_s, tau, count};
        }
      }
    }
  }
  return best;
}

double relative_excess(double lhs, double rhs) {
  const double excess = lhs - rhs;
  if (!(excess > 0.0)) return std::isnan(excess) ? kInfinity : 0.0;
  return rhs != 0.0 ? excess / std::abs(rhs) : excess;
}

}  // namespace

GridResult grid_search_patacra(const Matching& matching, const ChannelRealization& channels,
                               const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                               const GridSpec& grid) {
  const std::size_t n_ues = config.n_ues;
  if (n_ues > 2) throw ModelError("grid_search_patacra: at most two UEs");
  if (matching.size() != n_ues || tasks.size() != n_ues)
    throw ModelError("grid_search_patacra: dimension mismatch");
  if (grid.eta_resolution < 1 || grid.tau_resolution < 1 || grid.split_resolution < 1 ||
      !(grid.tau_min_fraction > 0.0 && grid.tau_min_fraction <= 1.0))
    throw ModelError("grid_search_patacra: bad grid");
  if (auto bad = check_matching(config, matching)) throw ModelError(*bad);

  std::vector<UeGridInput> inputs(n_ues);
  for (std::size_t n = 0; n < n_ues; ++n) {
    const MatchingUnit& unit = matching.units[n];
    const TaskSpec& task = tasks[n];
    UeGridInput& in = inputs[n];
    in.bits = task.data_bits;
    in.cycles = task.data_bits * task.intensity;
    in.t_max = task.t_max;
    in.w_e = task.weight_e;
    in.w_t = task.weight_t;
    in.f_local = config.ue_freq[n];
    in.kappa = config.kappa;
    in.pmax = config.pmax_w();
    in.bandwidth = config.bandwidth_hz;
    const auto k = static_cast<std::size_t>(unit.server);
    const auto l = static_cast<std::size_t>(unit.rb);
    in.gain_s = channels.server(n, k, l);
    in.has_helper = unit.helper != kUnassigned && !config.is_dumb_helper(static_cast<std::size_t>(unit.helper));
    if (in.has_helper) {
      const auto m = static_cast<std::size_t>(unit.helper);
      in.gain_h = channels.helper(n, m, l);
      in.f_helper = config.helper_freq[m];
      in.emax = config.helper_emax[m];
    }
  }

  GridResult result;
  auto record = [&](const std::vector<UeGridBest>& bests, const std::vector<double>& f) {
    double phi = 0.0;
    for (const UeGridBest& b : bests) phi = std::max(phi, b.edt);
    if (phi < result.phi) {
      result.phi = phi;
      result.eta_h.clear();
      result.eta_s.clear();
      result.tau.clear();
      for (const UeGridBest& b : bests) {
        result.eta_h.push_back(b.eta_h);
        result.eta_s.push_back(b.eta_s);
        result.tau.push_back(b.tau);
      }
      result.f_s = f;
    }
  };

  const bool shared = n_ues == 2 && matching.units[0].server == matching.units[1].server;
  if (!shared) {
    // The EDT is non-increasing in the server frequency and nothing else
    // competes for it, so each UE takes the whole server.
    std::vector<UeGridBest> bests;
    std::vector<double> f;
    for (std::size_t n = 0; n < n_ues; ++n) {
      f.push_back(config.server_fmax[static_cast<std::size_t>(matching.units[n].server)]);
      bests.push_back(grid_one_ue(inputs[n], f.back(), grid));
      result.evaluated += bests.back().evaluated;
    }
    record(bests, f);
    if (n_ues == 0) result.phi = 0.0;
    return result;
  }

  const double fmax = config.server_fmax[static_cast<std::size_t>(matching.units[0].server)];
  for (int s = 0; s <= grid.split_resolution; ++s) {
    const double share = static_cast<double>(s) / grid.split_resolution;
    const std::vector<double> f{share * fmax, (1.0 - share) * fmax};
    std::vector<UeGridBest> bests;
    for (std::size_t n = 0; n < 2; ++n) {
      bests.push_back(grid_one_ue(inputs[n], f[n], grid));
      result.evaluated += bests.back().evaluated;
    }
    record(bests, f);
  }
  return result;
}

std::array<double, 4> perspective_hessian(double x, double y) {
  const double r = x / y;
  const double ln2 = std::numbers::ln2;
  const double c = ln2 * ln2 * std::exp2(r) / y;
  return {c, -c * r, -c * r, c * r * r};
}

double hessian_quadratic_form(double x, double y, double v1, double v2) {
  const auto h = perspective_hessian(x, y);
  return h[0] * v1 * v1 + (h[1] + h[2]) * v1 * v2 + h[3] * v2 * v2;
}

double hessian_psd_sample(std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw ModelError("hessian_psd_sample: samples must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xs(-4.0, 4.0), ys(0.1, 4.0), vs(-1.0, 1.0);
  double worst = kInfinity;
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = xs(rng), y = ys(rng), v1 = vs(rng), v2 = vs(rng);
    worst = std::min(worst, hessian_quadratic_form(x, y, v1, v2));
  }
  return worst;
}

double ViolationReport::max() const {
  double worst = 0.0;
  for (const auto& [name, value] : families) worst = std::max(worst, value);
  return worst;
}

std::string ViolationReport::worst() const {
  std::string name;
  double worst = -1.0;
  for (const auto& [family, value] : families)
    if (value > worst) {
      worst = value;
      name = family;
    }
  return name;
}

ViolationReport replay_constraints(const ContinuousAllocation& alloc, const Matching& matching,
                                   const ChannelRealization& channels,
                                   const std::vector<TaskSpec>& tasks, const ScenarioConfig& config,
                                   const LinkModel& model, const AssociationLayout& layout,
                                   Objective objective) {
  ViolationReport report;
  auto& fam = report.families;
  for (const char* name : {"matching", "power", "helper_energy", "task_split", "server_frequency",
                           "deadline", "rates", "epigraph"})
    fam[name] = 0.0;
  auto raise = [&](const char* name, double value) { fam[name] = std::max(fam[name], value); };

  const std::size_t n_ues = config.n_ues;
  if (matching.size() != n_ues || alloc.ues.size() != n_ues || tasks.size() != n_ues ||
      check_matching(config, matching, layout)) {
    fam["matching"] = 1.0;
    return report;
  }

  const double pmax = config.pmax_w();
  std::vector<double> server_load(config.n_servers, 0.0);
  std::vector<double> helper_energy(config.n_helpers, 0.0);
  double edt_max = 0.0, edt_sum = 0.0;

  for (std::size_t n = 0; n < n_ues; ++n) {
    const UeAllocation& a = alloc.ues[n];
    const TaskSpec& task = tasks[n];
    const UeLink link = resolve_link(config, channels, matching.units[n], n, model);
    const double bits = task.data_bits;
    const double cycles = task.data_bits * task.intensity;

    // Task split (absolute: shares are dimensionless fractions).
    const double eta_h = a.eta_h, eta_s = a.eta_s;
    raise("task_split", std::max({0.0, -eta_h, -eta_s, eta_h + eta_s - 1.0}));
    if (!link.has_helper()) raise("task_split", std::abs(eta_h));

    // Power budget.
    raise("power", std::max({0.0, -a.p_h, -a.p_s}) / pmax);
    const double power = link.mode == LinkMode::Tdma ? std::max(a.p_h, a.p_s) : a.p_h + a.p_s;
    raise("power", relative_excess(power, pmax));

    // Delivered bits per leg.
    double cap_h = 0.0, cap_s = 0.0;
    const double tau_h = a.tau;
    const double tau_s = link.mode == LinkMode::Noma ? a.tau : a.tau_s;
    if (link.mode == LinkMode::Noma) {
      // SINR under SIC, written out directly.
      const bool helper_decodes_first = link.gain_h >= link.gain_s;
      if (link.has_helper() && a.p_h > 0.0) {
        const double interference = helper_decodes_first ? 0.0 : a.p_s * link.gain_h;
        cap_h = link.bandwidth_h * std::log2(1.0 + a.p_h * link.gain_h / (interference + 1.0));
      }
      if (a.p_s > 0.0) {
        const double interference =
            link.has_helper() && helper_decodes_first ? a.p_h * link.gain_s : 0.0;
        cap_s = link.bandwidth_s * std::log2(1.0 + a.p_s * link.gain_s / (interference + 1.0));
      }
    } else {
      if (link.has_helper() && a.p_h > 0.0) cap_h = link.bandwidth_h * std::log2(1.0 + a.p_h * link.gain_h);
      if (a.p_s > 0.0) cap_s = link.bandwidth_s * std::log2(1.0 + a.p_s * link.gain_s);
    }
    const bool carries_h = link.has_helper() && eta_h * bits > 0.0;
    const bool carries_s = eta_s * bits > 0.0;
    if (carries_h) raise("rates", relative_excess(eta_h * bits, cap_h * std::max(tau_h, 0.0)));
    if (carries_s) raise("rates", relative_excess(eta_s * bits, cap_s * std::max(tau_s, 0.0)));

    // Execution and resources.
    double exec_h = 0.0, exec_s = 0.0;
    if (carries_h) {
      const double f = link.helper_kind == HelperKind::Device ? link.helper_freq : a.f_h;
      exec_h = f > 0.0 ? eta_h * cycles / f : kInfinity;
      if (link.helper_kind == HelperKind::Device)
        helper_energy[static_cast<std::size_t>(link.helper)] += eta_h * cycles * config.kappa * f * f;
      else
        server_load[static_cast<std::size_t>(link.helper)] += a.f_h;
    }
    if (carries_s) exec_s = a.f_s > 0.0 ? eta_s * cycles / a.f_s : kInfinity;
    server_load[static_cast<std::size_t>(link.server)] += a.f_s;
    raise("server_frequency", std::max({0.0, -a.f_s, -a.f_h}) / config.server_fmax[static_cast<std::size_t>(link.server)]);

    const double local = std::max(0.0, 1.0 - eta_h - eta_s);
    const double f_local = config.ue_freq[n];
    const double t_local = local * cycles / f_local;
    double t_helper = carries_h ? tau_h + exec_h : 0.0;
    double t_server = carries_s ? tau_s + exec_s : 0.0;
    if (link.mode == LinkMode::Tdma && carries_s && link.has_helper()) t_server += tau_h;
    const double delay = std::max({t_local, t_helper, t_server});
    raise("deadline", relative_excess(delay, task.t_max));

    double e_tran = 0.0;
    if (link.mode == LinkMode::Noma) {
      e_tran = (std::max(a.p_h, 0.0) + std::max(a.p_s, 0.0)) * std::max(a.tau, 0.0);
    } else {
      if (link.has_helper()) e_tran += std::max(a.p_h, 0.0) * std::max(tau_h, 0.0);
      e_tran += std::max(a.p_s, 0.0) * std::max(tau_s, 0.0);
    }
    const double energy = e_tran + local * cycles * config.kappa * f_local * f_local;
    const double edt = task.weight_e * energy + task.weight_t * delay;
    edt_max = std::max(edt_max, edt);
    edt_sum += edt;
  }

  for (std::size_t k = 0; k < config.n_servers; ++k)
    raise("server_frequency", relative_excess(server_load[k], config.server_fmax[k]));
  for (std::size_t m = 0; m < config.n_helpers; ++m)
    raise("helper_energy", relative_excess(helper_energy[m], config.helper_emax[m]));
  if (std::isfinite(alloc.phi)) {
    const double bound_target = objective == Objective::Sum ? edt_sum : edt_max;
    raise("epigraph", relative_excess(bound_target, alloc.phi));
  }
  return report;
}

}  // namespace nomamec::oracle
