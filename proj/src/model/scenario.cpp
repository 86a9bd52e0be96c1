#include <cmath>
#include <numeric>
#include <sstream>

#include "nomamec/model.hpp"

namespace nomamec {

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

double ScenarioConfig::noise_power_w() const {
  return dbm_to_watts(noise_dbm_per_hz) * bandwidth_hz;
}

std::size_t ScenarioConfig::total_server_capacity() const {
  return std::accumulate(server_capacity.begin(), server_capacity.end(), std::size_t{0});
}

namespace {

template <typename T>
void require_size(const std::vector<T>& v, std::size_t n, const char* name) {
  if (v.size() != n) {
    std::ostringstream os;
    os << name << " has " << v.size() << " entries, expected " << n;
    throw ModelError(os.str());
  }
}

void require_positive(const std::vector<double>& v, const char* name) {
  for (double x : v)
    if (!(x > 0.0) || !std::isfinite(x)) throw ModelError(std::string(name) + " must be positive");
}

}  // namespace

void ScenarioConfig::validate() const {
  if (n_ues < 1) throw ModelError("n_ues must be at least 1");
  if (n_servers < 1) throw ModelError("n_servers must be at least 1");
  if (n_rbs < n_ues) throw ModelError("n_rbs must be at least n_ues");
  if (!(bandwidth_hz > 0.0)) throw ModelError("bandwidth_hz must be positive");
  if (!(ipca_epsilon > 0.0)) throw ModelError("ipca_epsilon must be positive");
  if (!(disc_radius_m >= 0.0)) throw ModelError("disc_radius_m must be non-negative");
  if (!(d0 > 0.0) || !(alpha > 0.0)) throw ModelError("pathloss parameters must be positive");
  if (!(kappa >= 0.0)) throw ModelError("kappa must be non-negative");
  require_size(server_capacity, n_servers, "server_capacity");
  require_size(server_fmax, n_servers, "server_fmax");
  require_size(helper_freq, n_helpers, "helper_freq");
  require_size(helper_emax, n_helpers, "helper_emax");
  require_size(ue_freq, n_ues, "ue_freq");
  for (std::size_t c : server_capacity)
    if (c == 0) throw ModelError("server_capacity must be positive");
  require_positive(server_fmax, "server_fmax");
  require_positive(helper_freq, "helper_freq");
  require_positive(ue_freq, "ue_freq");
  for (double e : helper_emax)
    if (!(e >= 0.0)) throw ModelError("helper_emax must be non-negative");
  if (total_server_capacity() < n_ues)
    throw ModelError("total server capacity is smaller than the number of UEs");
}

ScenarioConfig make_uniform_config(std::size_t n_ues, std::size_t n_helpers, std::size_t n_servers,
                                   std::size_t n_rbs, double server_fmax, double helper_freq,
                                   double helper_emax, double ue_freq) {
  ScenarioConfig c;
  c.n_ues = n_ues;
  c.n_helpers = n_helpers;
  c.n_servers = n_servers;
  c.n_rbs = n_rbs;
  c.server_capacity.assign(n_servers, n_ues);
  c.server_fmax.assign(n_servers, server_fmax);
  c.helper_freq.assign(n_helpers, helper_freq);
  c.helper_emax.assign(n_helpers, helper_emax);
  c.ue_freq.assign(n_ues, ue_freq);
  return c;
}

void TaskSpec::validate() const {
  if (!(data_bits >= 0.0) || !std::isfinite(data_bits))
    throw ModelError("data_bits must be non-negative");
  if (!(intensity > 0.0)) throw ModelError("intensity must be positive");
  if (!(t_max > 0.0)) throw ModelError("t_max must be positive");
  if (weight_e < 0.0 || weight_e > 1.0 || weight_t < 0.0)
    throw ModelError("weights must lie in [0, 1]");
  if (std::abs(weight_e + weight_t - 1.0) > 1e-12) throw ModelError("weights must sum to 1");
}

TaskSpec make_task(double data_bits, double weight_e, double intensity, double t_max) {
  TaskSpec t;
  t.data_bits = data_bits;
  t.intensity = intensity;
  t.t_max = t_max;
  t.weight_e = weight_e;
  t.weight_t = 1.0 - weight_e;
  return t;
}

}  // namespace nomamec
