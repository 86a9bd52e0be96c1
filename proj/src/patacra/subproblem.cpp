#include "patacra/subproblem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nomamec::detail {

using conic::LinearExpr;

double UeContext::local_energy_per_share() const { return task.cycles() * kappa * f_local * f_local; }

UeContext make_context(const UeLink& link, const TaskSpec& task, const ScenarioConfig& config,
                       std::size_t ue) {
  UeContext c;
  c.link = link;
  c.task = task;
  c.f_local = config.ue_freq.at(ue);
  c.server_fmax = config.server_fmax.at(static_cast<std::size_t>(link.server));
  if (link.helper_kind == HelperKind::Server)
    c.helper_server_fmax = config.server_fmax.at(static_cast<std::size_t>(link.helper));
  if (link.mode == LinkMode::Noma) c.coeffs = derive_coefficients(link);
  c.pmax = config.pmax_w();
  c.kappa = config.kappa;
  return c;
}

std::vector<UeContext> make_contexts(const ScenarioConfig& config,
                                     const ChannelRealization& channels, const Matching& matching,
                                     const std::vector<TaskSpec>& tasks, const LinkModel& model) {
  if (matching.units.size() != config.n_ues || tasks.size() != config.n_ues)
    throw ModelError("matching/tasks do not match the number of UEs");
  std::vector<UeContext> ctx;
  ctx.reserve(config.n_ues);
  for (std::size_t n = 0; n < config.n_ues; ++n)
    ctx.push_back(make_context(resolve_link(config, channels, matching.units[n], n, model), tasks[n],
                               config, n));
  return ctx;
}

namespace {

struct Legs {
  bool helper = false;
  bool server = false;
};

Legs active_legs(const UeContext& c, std::size_t n, const FixedFrequencies* fixed) {
  Legs legs;
  if (!c.can_offload()) return legs;
  legs.server = !(fixed && fixed->f_s[n] <= 0.0);
  legs.helper = c.link.has_helper() &&
                !(fixed && c.link.helper_kind == HelperKind::Server && fixed->f_h[n] <= 0.0);
  return legs;
}

/// One power-limited transmission term a * (2^(bits_expr / tau) - 1), with
/// bits_expr measured in bits/Hz: exponent variable z, LMI z tau >= u^2,
/// linearized u^2 >= bits_expr, and the budget share w >= (a / P) 2^z.
struct PowerTerm {
  VarId z, u, w;
  std::optional<VarId> t;
};

PowerTerm add_power_term(conic::ConicProgram& p, const std::string& tag, double a,
                         const LinearExpr& bits_per_hz, VarId tau, double u_ref, double pmax,
                         bool with_energy, UeVars& v) {
  PowerTerm term;
  term.z = p.add_variable("z" + tag);
  term.u = p.add_variable("u" + tag);
  term.w = p.add_variable("w" + tag);
  conic::encode_pow2_epigraph(p, LinearExpr(term.z) + std::log2(a / pmax), term.w);
  conic::encode_lmi2x2(p, term.z, tau, term.u);
  p.add_leq(bits_per_hz, 2.0 * u_ref * LinearExpr(term.u) - u_ref * u_ref);
  v.surrogates.emplace_back(bits_per_hz, term.u);
  if (with_energy) {
    term.t = p.add_variable("t" + tag);
    conic::encode_perspective_pow2(p, bits_per_hz + std::log2(a) * LinearExpr(tau), tau, *term.t);
  }
  return term;
}

/// Energy a * tau * (2^(bits / tau) - 1) of a perspective term.
LinearExpr term_energy(const PowerTerm& term, double a, VarId tau) {
  return LinearExpr(*term.t) - a * LinearExpr(tau);
}

}  // namespace

Built build_program(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                    const SurrogateParams& params, Objective objective,
                    const FixedFrequencies* fixed) {
  if (params.size() != ctx.size()) throw ModelError("surrogate parameters do not match UEs");
  Built b;
  conic::ConicProgram& p = b.program;
  b.ues.resize(ctx.size());
  std::vector<LinearExpr> share(config.n_servers);
  LinearExpr sum_objective;
  if (objective == Objective::MinMax) {
    b.phi = p.add_variable("phi");
    p.add_leq(0.0, *b.phi);
  }

  for (std::size_t n = 0; n < ctx.size(); ++n) {
    const UeContext& c = ctx[n];
    UeVars& v = b.ues[n];
    if (!c.active()) continue;
    const std::string tag = "_" + std::to_string(n);
    const double bits = c.task.data_bits;
    const double cycles = c.cycles();
    const bool with_energy = c.task.weight_e > 0.0;
    const Legs legs = active_legs(c, n, fixed);
    const auto& u_ref = params[n];

    v.beta = p.add_variable("beta" + tag);
    p.add_leq(*v.beta, c.task.t_max);

    LinearExpr eta_h(0.0), eta_s(0.0);
    if (legs.server) {
      v.eta_s = p.add_variable("eta_s" + tag);
      p.add_leq(0.0, *v.eta_s);
      eta_s = *v.eta_s;
    }
    if (legs.helper) {
      v.eta_h = p.add_variable("eta_h" + tag);
      p.add_leq(0.0, *v.eta_h);
      eta_h = *v.eta_h;
    }
    const LinearExpr offloaded = eta_h + eta_s;
    if (legs.server || legs.helper) p.add_leq(offloaded, 1.0);
    p.add_leq((cycles / c.f_local) * (1.0 - offloaded), *v.beta);
    LinearExpr energy = c.local_energy_per_share() * (1.0 - offloaded);

    LinearExpr done_h, done_s;  // end of each leg's transmission
    const double pmax = c.pmax;
    if (legs.server || legs.helper) {
      switch (c.link.mode) {
        case LinkMode::Noma: {
          v.tau = p.add_variable("tau" + tag);
          p.add_leq(0.0, *v.tau);
          const double bits_per_hz = bits / c.link.bandwidth_s;
          const DerivedCoefficients& co = c.coeffs;
          const LinearExpr eta_o2 = co.o == 1 ? eta_h : eta_s;
          LinearExpr budget;
          double a_used = 0.0;
          if (co.a1 > 0.0 && !eta_o2.is_constant()) {
            const PowerTerm t = add_power_term(p, "1" + tag, co.a1, bits_per_hz * eta_o2, *v.tau,
                                               u_ref[0], pmax, with_energy, v);
            v.z1 = t.z; v.u1 = t.u; v.w1 = t.w; v.t1 = t.t;
            budget += t.w;
            a_used += co.a1;
            if (with_energy) energy += term_energy(t, co.a1, *v.tau);
          }
          if (co.a2 > 0.0 && !offloaded.is_constant()) {
            const PowerTerm t = add_power_term(p, "2" + tag, co.a2, bits_per_hz * offloaded, *v.tau,
                                               u_ref[1], pmax, with_energy, v);
            v.z2 = t.z; v.u2 = t.u; v.w2 = t.w; v.t2 = t.t;
            budget += t.w;
            a_used += co.a2;
            if (with_energy) energy += term_energy(t, co.a2, *v.tau);
          }
          if (!budget.is_constant()) p.add_leq(budget, 1.0 + a_used / pmax);
          done_h = *v.tau;
          done_s = *v.tau;
          break;
        }
        case LinkMode::Tdma: {
          // Interference-free legs in sequence; p <= P is linear in (eta, tau).
          if (legs.helper) {
            v.tau = p.add_variable("tau_h" + tag);
            p.add_leq(0.0, *v.tau);
            const double bph = bits / c.link.bandwidth_h;
            p.add_leq(bph * eta_h, std::log2(1.0 + pmax * c.link.gain_h) * LinearExpr(*v.tau));
            if (with_energy) {
              v.t1 = p.add_variable("t1" + tag);
              conic::encode_perspective_pow2(p, bph * eta_h - std::log2(c.link.gain_h) * LinearExpr(*v.tau),
                                             *v.tau, *v.t1);
              energy += LinearExpr(*v.t1) - (1.0 / c.link.gain_h) * LinearExpr(*v.tau);
            }
            done_h = *v.tau;
          }
          if (legs.server) {
            v.tau_s = p.add_variable("tau_s" + tag);
            p.add_leq(0.0, *v.tau_s);
            const double bps = bits / c.link.bandwidth_s;
            p.add_leq(bps * eta_s, std::log2(1.0 + pmax * c.link.gain_s) * LinearExpr(*v.tau_s));
            if (with_energy) {
              v.t2 = p.add_variable("t2" + tag);
              conic::encode_perspective_pow2(p, bps * eta_s - std::log2(c.link.gain_s) * LinearExpr(*v.tau_s),
                                             *v.tau_s, *v.t2);
              energy += LinearExpr(*v.t2) - (1.0 / c.link.gain_s) * LinearExpr(*v.tau_s);
            }
            done_s = done_h + LinearExpr(*v.tau_s);
          }
          break;
        }
        case LinkMode::Fdma: {
          // Parallel legs on orthogonal bands sharing the power budget.
          LinearExpr budget;
          double a_used = 0.0;
          if (legs.helper) {
            v.tau = p.add_variable("tau_h" + tag);
            p.add_leq(0.0, *v.tau);
            const double a = 1.0 / c.link.gain_h;
            const PowerTerm t = add_power_term(p, "1" + tag, a, (bits / c.link.bandwidth_h) * eta_h,
                                               *v.tau, u_ref[0], pmax, with_energy, v);
            v.z1 = t.z; v.u1 = t.u; v.w1 = t.w; v.t1 = t.t;
            budget += t.w;
            a_used += a;
            if (with_energy) energy += term_energy(t, a, *v.tau);
            done_h = *v.tau;
          }
          if (legs.server) {
            v.tau_s = p.add_variable("tau_s" + tag);
            p.add_leq(0.0, *v.tau_s);
            const double a = 1.0 / c.link.gain_s;
            const PowerTerm t = add_power_term(p, "2" + tag, a, (bits / c.link.bandwidth_s) * eta_s,
                                               *v.tau_s, u_ref[1], pmax, with_energy, v);
            v.z2 = t.z; v.u2 = t.u; v.w2 = t.w; v.t2 = t.t;
            budget += t.w;
            a_used += a;
            if (with_energy) energy += term_energy(t, a, *v.tau_s);
            done_s = *v.tau_s;
          }
          p.add_leq(budget, 1.0 + a_used / pmax);
          break;
        }
      }
    }

    if (legs.helper) {
      if (c.link.helper_kind == HelperKind::Device) {
        const double f = c.link.helper_freq;
        p.add_leq(done_h + (cycles / f) * eta_h, *v.beta);
        if (std::isfinite(c.link.helper_emax))
          p.add_leq(cycles * c.kappa * f * f * eta_h, c.link.helper_emax);
      } else if (fixed) {
        p.add_leq(done_h + (cycles / fixed->f_h[n]) * eta_h, *v.beta);
      } else {
        v.fhat_h = p.add_variable("fhat_h" + tag);
        v.xi_h = p.add_variable("xi_h" + tag);
        v.u4 = p.add_variable("u4" + tag);
        conic::encode_lmi2x2(p, (c.helper_server_fmax / cycles) * LinearExpr(*v.xi_h), *v.fhat_h, *v.u4);
        p.add_leq(eta_h, 2.0 * u_ref[3] * LinearExpr(*v.u4) - u_ref[3] * u_ref[3]);
        v.surrogates.emplace_back(eta_h, *v.u4);
        p.add_leq(done_h + LinearExpr(*v.xi_h), *v.beta);
        share[static_cast<std::size_t>(c.link.helper)] += *v.fhat_h;
      }
    }
    if (legs.server) {
      if (fixed) {
        p.add_leq(done_s + (cycles / fixed->f_s[n]) * eta_s, *v.beta);
      } else {
        v.fhat_s = p.add_variable("fhat_s" + tag);
        v.xi_s = p.add_variable("xi_s" + tag);
        v.u3 = p.add_variable("u3" + tag);
        conic::encode_lmi2x2(p, (c.server_fmax / cycles) * LinearExpr(*v.xi_s), *v.fhat_s, *v.u3);
        p.add_leq(eta_s, 2.0 * u_ref[2] * LinearExpr(*v.u3) - u_ref[2] * u_ref[2]);
        v.surrogates.emplace_back(eta_s, *v.u3);
        p.add_leq(done_s + LinearExpr(*v.xi_s), *v.beta);
        share[static_cast<std::size_t>(c.link.server)] += *v.fhat_s;
      }
    }

    const LinearExpr edt = c.task.weight_e * energy + c.task.weight_t * LinearExpr(*v.beta);
    if (objective == Objective::MinMax) {
      p.add_leq(edt, *b.phi);
    } else {
      v.phi_n = p.add_variable("phi" + tag);
      p.add_leq(0.0, *v.phi_n);
      p.add_leq(edt, *v.phi_n);
      sum_objective += *v.phi_n;
    }
  }
  for (const LinearExpr& s : share)
    if (!s.is_constant()) p.add_leq(s, 1.0);
  p.minimize(objective == Objective::MinMax ? LinearExpr(*b.phi) : sum_objective);
  return b;
}

double transmission_energy(const UeContext& c, const UeAllocation& a) {
  if (c.link.mode == LinkMode::Noma) return (a.p_h + a.p_s) * a.tau;
  return a.p_h * a.tau + a.p_s * a.tau_s;
}

Built build_frequency_block(const std::vector<UeContext>& ctx, const ScenarioConfig& config,
                            const ContinuousAllocation& alloc, Objective objective) {
  Built b;
  conic::ConicProgram& p = b.program;
  b.ues.resize(ctx.size());
  std::vector<LinearExpr> share(config.n_servers);
  LinearExpr sum_objective;
  if (objective == Objective::MinMax) {
    b.phi = p.add_variable("phi");
    p.add_leq(0.0, *b.phi);
  }
  for (std::size_t n = 0; n < ctx.size(); ++n) {
    const UeContext& c = ctx[n];
    const UeAllocation& a = alloc.ues[n];
    UeVars& v = b.ues[n];
    if (!c.active()) continue;
    const std::string tag = "_" + std::to_string(n);
    const double cycles = c.cycles();
    v.beta = p.add_variable("beta" + tag);
    p.add_leq(*v.beta, c.task.t_max);
    const double local_share = std::max(0.0, 1.0 - a.eta_h - a.eta_s);
    p.add_leq(local_share * cycles / c.f_local, *v.beta);
    const double energy = c.local_energy_per_share() * local_share + transmission_energy(c, a);

    double done_h = a.tau, done_s = a.tau;
    if (c.link.mode == LinkMode::Tdma) done_s = (a.eta_h > 0.0 ? a.tau : 0.0) + a.tau_s;
    if (c.link.mode == LinkMode::Fdma) done_s = a.tau_s;

    if (a.eta_h > 0.0) {
      if (c.link.helper_kind == HelperKind::Device) {
        p.add_leq(done_h + a.eta_h * cycles / c.link.helper_freq, *v.beta);
      } else {
        v.fhat_h = p.add_variable("fhat_h" + tag);
        v.xi_h = p.add_variable("xi_h" + tag);
        conic::encode_lmi2x2(p, (c.helper_server_fmax / cycles) * LinearExpr(*v.xi_h), *v.fhat_h,
                             std::sqrt(a.eta_h));
        p.add_leq(done_h + LinearExpr(*v.xi_h), *v.beta);
        share[static_cast<std::size_t>(c.link.helper)] += *v.fhat_h;
      }
    }
    if (a.eta_s > 0.0) {
      v.fhat_s = p.add_variable("fhat_s" + tag);
      v.xi_s = p.add_variable("xi_s" + tag);
      conic::encode_lmi2x2(p, (c.server_fmax / cycles) * LinearExpr(*v.xi_s), *v.fhat_s,
                           std::sqrt(a.eta_s));
      p.add_leq(done_s + LinearExpr(*v.xi_s), *v.beta);
      share[static_cast<std::size_t>(c.link.server)] += *v.fhat_s;
    }
    const LinearExpr edt = c.task.weight_e * energy + c.task.weight_t * LinearExpr(*v.beta);
    if (objective == Objective::MinMax) {
      p.add_leq(edt, *b.phi);
    } else {
      v.phi_n = p.add_variable("phi" + tag);
      p.add_leq(0.0, *v.phi_n);
      p.add_leq(edt, *v.phi_n);
      sum_objective += *v.phi_n;
    }
  }
  for (const LinearExpr& s : share)
    if (!s.is_constant()) p.add_leq(s, 1.0);
  p.minimize(objective == Objective::MinMax ? LinearExpr(*b.phi) : sum_objective);
  return b;
}

namespace {

double value_or(const conic::SolveResult& r, const std::optional<VarId>& v, double fallback = 0.0) {
  return v ? r.value(*v) : fallback;
}

/// Power of an interference-free leg carrying `share` of the task in tau seconds.
double leg_power(double share, double bits, double bandwidth, double tau, double gain) {
  if (share <= 0.0 || bits <= 0.0) return 0.0;
  return pow2m1(share * bits / (bandwidth * tau)) / gain;
}

}  // namespace

ContinuousAllocation extract_allocation(const Built& built, const conic::SolveResult& result,
                                        const std::vector<UeContext>& ctx,
                                        const FixedFrequencies* fixed) {
  ContinuousAllocation alloc;
  alloc.ues.resize(ctx.size());
  alloc.phi = result.objective;
  for (std::size_t n = 0; n < ctx.size(); ++n) {
    const UeContext& c = ctx[n];
    const UeVars& v = built.ues[n];
    UeAllocation& a = alloc.ues[n];
    if (!c.active()) continue;
    a.beta = value_or(result, v.beta);
    a.eta_h = std::max(0.0, value_or(result, v.eta_h));
    a.eta_s = std::max(0.0, value_or(result, v.eta_s));
    if (v.eta_s) a.f_s = fixed ? fixed->f_s[n] : value_or(result, v.fhat_s) * c.server_fmax;
    if (v.eta_h) {
      if (c.link.helper_kind == HelperKind::Device) a.f_h = c.link.helper_freq;
      else a.f_h = fixed ? fixed->f_h[n] : value_or(result, v.fhat_h) * c.helper_server_fmax;
    }
    const double bits = c.task.data_bits;
    switch (c.link.mode) {
      case LinkMode::Noma:
        a.tau = a.tau_s = value_or(result, v.tau);
        if (a.tau > 0.0) {
          const auto [ph, ps] = recover_powers(a.tau, a.eta_h, a.eta_s, c.coeffs, c.task, c.link.bandwidth_s);
          a.p_h = ph;
          a.p_s = ps;
        }
        break;
      case LinkMode::Tdma:
      case LinkMode::Fdma:
        a.tau_s = value_or(result, v.tau_s);
        a.tau = v.tau ? result.value(*v.tau) : a.tau_s;
        if (v.tau) a.p_h = leg_power(a.eta_h, bits, c.link.bandwidth_h, a.tau, c.link.gain_h);
        if (v.tau_s) a.p_s = leg_power(a.eta_s, bits, c.link.bandwidth_s, a.tau_s, c.link.gain_s);
        break;
    }
  }
  return alloc;
}

ContinuousAllocation extract_frequency_block(const Built& built, const conic::SolveResult& result,
                                             const std::vector<UeContext>& ctx,
                                             const ContinuousAllocation& base) {
  ContinuousAllocation alloc = base;
  alloc.phi = result.objective;
  for (std::size_t n = 0; n < ctx.size(); ++n) {
    const UeContext& c = ctx[n];
    const UeVars& v = built.ues[n];
    UeAllocation& a = alloc.ues[n];
    if (!c.active()) continue;
    a.beta = value_or(result, v.beta);
    a.f_s = v.fhat_s ? result.value(*v.fhat_s) * c.server_fmax : 0.0;
    if (c.link.helper_kind == HelperKind::Server)
      a.f_h = v.fhat_h ? result.value(*v.fhat_h) * c.helper_server_fmax : 0.0;
  }
  return alloc;
}

SurrogateParams next_params(const Built& built, const conic::SolveResult& result,
                            const SurrogateParams& previous) {
  SurrogateParams next = previous;
  for (std::size_t n = 0; n < built.ues.size(); ++n) {
    const UeVars& v = built.ues[n];
    const std::optional<VarId>* slots[4] = {&v.u1, &v.u2, &v.u3, &v.u4};
    for (int i = 0; i < 4; ++i)
      if (*slots[i]) next[n][static_cast<std::size_t>(i)] = std::max(result.value(**slots[i]), 1e-300);
  }
  return next;
}

double surrogate_residual(const Built& built, const conic::SolveResult& result,
                          const std::vector<UeContext>& ctx) {
  (void)ctx;
  double worst = -kInfinity;
  for (const UeVars& v : built.ues)
    for (const auto& [bound, u] : v.surrogates) {
      const double uv = result.value(u);
      worst = std::max(worst, bound.evaluate(result.x) - uv * uv);
    }
  return worst;
}

std::array<double, 4> params_at(const UeContext& c, const UeAllocation& a) {
  const double bits = c.task.data_bits;
  auto root = [](double x, double floor) { return std::max(std::sqrt(std::max(x, 0.0)), floor); };
  std::array<double, 4> u{kSurrogateFloor, kSurrogateFloor, kServerSurrogateFloor, kServerSurrogateFloor};
  if (!c.active()) return u;
  switch (c.link.mode) {
    case LinkMode::Noma: {
      const double bph = bits / c.link.bandwidth_s;
      u[0] = root(bph * c.coeffs.eta_o2(a.eta_h, a.eta_s), kSurrogateFloor);
      u[1] = root(bph * (a.eta_h + a.eta_s), kSurrogateFloor);
      break;
    }
    case LinkMode::Fdma:
      u[0] = root(a.eta_h * bits / c.link.bandwidth_h, kSurrogateFloor);
      u[1] = root(a.eta_s * bits / c.link.bandwidth_s, kSurrogateFloor);
      break;
    case LinkMode::Tdma:
      break;
  }
  u[2] = root(a.eta_s, kServerSurrogateFloor);
  u[3] = root(a.eta_h, kServerSurrogateFloor);
  return u;
}

FixedFrequencies equal_split(const std::vector<UeContext>& ctx, const ScenarioConfig& config) {
  std::vector<int> load(config.n_servers, 0);
  for (const UeContext& c : ctx) {
    if (!c.active()) continue;
    ++load[static_cast<std::size_t>(c.link.server)];
    if (c.link.helper_kind == HelperKind::Server) ++load[static_cast<std::size_t>(c.link.helper)];
  }
  FixedFrequencies f;
  f.f_s.assign(ctx.size(), 0.0);
  f.f_h.assign(ctx.size(), 0.0);
  for (std::size_t n = 0; n < ctx.size(); ++n) {
    const UeContext& c = ctx[n];
    if (!c.active()) continue;
    const auto k = static_cast<std::size_t>(c.link.server);
    f.f_s[n] = config.server_fmax[k] / load[k];
    if (c.link.helper_kind == HelperKind::Server) {
      const auto k2 = static_cast<std::size_t>(c.link.helper);
      f.f_h[n] = config.server_fmax[k2] / load[k2];
    }
  }
  return f;
}

std::optional<UeAllocation> heuristic_start(const UeContext& c, double f_s, double f_h,
                                            const ScenarioConfig& config) {
  (void)config;
  if (!c.can_offload()) return std::nullopt;
  const double bits = c.task.data_bits, cycles = c.cycles(), t_max = c.task.t_max;
  const bool helper = c.link.has_helper();
  const double helper_f = c.link.helper_kind == HelperKind::Device ? c.link.helper_freq : f_h;
  for (int halving = 0; halving < 40; ++halving) {
    const double eta = std::ldexp(1.0 / 3.0, -halving);
    UeAllocation a;
    a.eta_s = eta;
    a.eta_h = helper ? eta : 0.0;
    if ((1.0 - a.eta_h - a.eta_s) * cycles / c.f_local > t_max) return std::nullopt;
    const double exec_h = helper ? a.eta_h * cycles / helper_f : 0.0;
    const double exec_s = a.eta_s * cycles / f_s;
    if (helper && c.link.helper_kind == HelperKind::Device && std::isfinite(c.link.helper_emax) &&
        a.eta_h * cycles * c.kappa * helper_f * helper_f > c.link.helper_emax)
      continue;
    bool power_ok = false;
    switch (c.link.mode) {
      case LinkMode::Noma: {
        const double span = t_max - std::max(exec_h, exec_s);
        if (span <= 0.0) continue;
        a.tau = a.tau_s = 0.95 * span;
        const auto [ph, ps] = recover_powers(a.tau, a.eta_h, a.eta_s, c.coeffs, c.task, c.link.bandwidth_s);
        a.p_h = ph;
        a.p_s = ps;
        power_ok = ph + ps <= c.pmax;
        break;
      }
      case LinkMode::Tdma: {
        const double span = t_max - exec_s;
        if (span <= 0.0) continue;
        a.tau = helper ? 0.475 * span : 0.0;
        a.tau_s = helper ? 0.475 * span : 0.95 * span;
        if (helper && a.tau + exec_h > t_max) continue;
        a.p_h = helper ? leg_power(a.eta_h, bits, c.link.bandwidth_h, a.tau, c.link.gain_h) : 0.0;
        a.p_s = leg_power(a.eta_s, bits, c.link.bandwidth_s, a.tau_s, c.link.gain_s);
        power_ok = a.p_h <= c.pmax && a.p_s <= c.pmax;
        break;
      }
      case LinkMode::Fdma: {
        if (t_max - exec_s <= 0.0 || (helper && t_max - exec_h <= 0.0)) continue;
        a.tau_s = 0.95 * (t_max - exec_s);
        a.tau = helper ? 0.95 * (t_max - exec_h) : a.tau_s;
        a.p_h = helper ? leg_power(a.eta_h, bits, c.link.bandwidth_h, a.tau, c.link.gain_h) : 0.0;
        a.p_s = leg_power(a.eta_s, bits, c.link.bandwidth_s, a.tau_s, c.link.gain_s);
        power_ok = a.p_h + a.p_s <= c.pmax;
        break;
      }
    }
    if (!power_ok) continue;
    a.f_s = f_s;
    a.f_h = helper_f;
    return a;
  }
  return std::nullopt;
}

}  // namespace nomamec::detail
