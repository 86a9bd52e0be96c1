#pragma once

// System model of a helper-assisted NOMA-MEC cell: scenario constants, task
// descriptions, node placement, Rayleigh block-fading channels, the 0-1
// association (matching) and the continuous allocation of one solution.
//
// Units are SI throughout (W, s, bits, cycles, J). dBm only appears in
// ScenarioConfig and is converted by the accessors.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nomamec {

class ModelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

double dbm_to_watts(double dbm);

struct ScenarioConfig {
  std::size_t n_ues = 2;
  std::size_t n_helpers = 2;
  std::size_t n_servers = 2;
  std::size_t n_rbs = 2;

  double bandwidth_hz = 1e6;
  double noise_dbm_per_hz = -174.0;
  double pmax_dbm = 28.0;
  double disc_radius_m = 500.0;
  double d0 = 10.0;
  double alpha = 4.7;
  double kappa = 1e-29;

  std::vector<std::size_t> server_capacity;  // N_k^max, per server
  std::vector<double> server_fmax;           // cycles/s, per server
  std::vector<double> helper_freq;           // cycles/s, per helper
  std::vector<double> helper_emax;           // J, per helper
  std::vector<double> ue_freq;               // cycles/s, per UE

  double ipca_epsilon = 1e-6;

  /// Noise power over one RB: density times RB bandwidth.
  double noise_power_w() const;
  double pmax_w() const { return dbm_to_watts(pmax_dbm); }

  /// Size of the helper universe. When M < N the universe is padded with
  /// dumb helpers, which occupy indices [n_helpers, n_ues).
  std::size_t helper_slots() const { return n_helpers < n_ues ? n_ues : n_helpers; }
  bool is_dumb_helper(std::size_t m) const { return m >= n_helpers; }

  std::size_t total_server_capacity() const;

  /// Throws ModelError on any violated invariant.
  void validate() const;
};

/// Builds a config with every per-node vector filled with a constant value.
ScenarioConfig make_uniform_config(std::size_t n_ues, std::size_t n_helpers,
                                   std::size_t n_servers, std::size_t n_rbs,
                                   double server_fmax = 22.5e9, double helper_freq = 17.5e9,
                                   double helper_emax = 0.9, double ue_freq = 5e9);

struct TaskSpec {
  double data_bits = 1e5;
  double intensity = 1e3;  // cycles per bit
  double t_max = 0.9;
  double weight_e = 0.5;
  double weight_t = 0.5;

  double cycles() const { return data_bits * intensity; }
  void validate() const;
};

TaskSpec make_task(double data_bits, double weight_e, double intensity = 1e3, double t_max = 0.9);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Point& a, const Point& b);

struct Topology {
  std::vector<Point> ues;
  std::vector<Point> helpers;
  std::vector<Point> servers;

  double ue_helper_distance(std::size_t n, std::size_t m) const;
  double ue_server_distance(std::size_t n, std::size_t k) const;
};

/// Uniform placement of all nodes on the configured disc. Pure function of
/// (config counts, radius, seed).
Topology generate_topology(const ScenarioConfig& config, std::uint64_t seed);

/// Noise-normalized channel gains g = |h|^2 / sigma^2, drawn independently
/// per (UE, receiver, RB).
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(std::size_t n_ues, std::size_t n_helpers, std::size_t n_servers,
                     std::size_t n_rbs);

  std::size_t n_ues() const { return n_ues_; }
  std::size_t n_helpers() const { return n_helpers_; }
  std::size_t n_servers() const { return n_servers_; }
  std::size_t n_rbs() const { return n_rbs_; }

  double helper(std::size_t n, std::size_t m, std::size_t l) const;
  double server(std::size_t n, std::size_t k, std::size_t l) const;
  void set_helper(std::size_t n, std::size_t m, std::size_t l, double gain);
  void set_server(std::size_t n, std::size_t k, std::size_t l, double gain);

 private:
  std::size_t helper_index(std::size_t n, std::size_t m, std::size_t l) const;
  std::size_t server_index(std::size_t n, std::size_t k, std::size_t l) const;

  std::size_t n_ues_ = 0, n_helpers_ = 0, n_servers_ = 0, n_rbs_ = 0;
  std::vector<double> helper_gain_;
  std::vector<double> server_gain_;
};

/// Mean of |h|^2 at distance d: 1 / (1 + (d/d0)^alpha).
double mean_channel_power(double distance_m, double d0, double alpha);

ChannelRealization generate_channels(const Topology& topology, const ScenarioConfig& config,
                                     std::uint64_t seed);

// --- Association -------------------------------------------------------------

inline constexpr int kUnassigned = -1;

/// One matching unit (U_n, H_m, S_k, RB_l). The secondary server/RB slots are
/// only used by the OMA/no-helper comparison schemes.
struct MatchingUnit {
  int helper = kUnassigned;
  int server = kUnassigned;
  int rb = kUnassigned;
  int server2 = kUnassigned;
  int rb2 = kUnassigned;

  friend bool operator==(const MatchingUnit&, const MatchingUnit&) = default;
};

/// Which slots of a MatchingUnit an association structure uses.
struct AssociationLayout {
  bool helper = true;
  bool second_server = false;
  bool second_rb = false;

  friend bool operator==(const AssociationLayout&, const AssociationLayout&) = default;
};

/// units[n] is the matching unit of UE n.
struct Matching {
  std::vector<MatchingUnit> units;

  std::size_t size() const { return units.size(); }
  friend bool operator==(const Matching&, const Matching&) = default;
};

/// Checks the four-sided matching conditions (one unit per UE, exclusive
/// helpers and RBs, server capacities). Returns a description of the first
/// violation, or nullopt when feasible.
std::optional<std::string> check_matching(const ScenarioConfig& config, const Matching& matching,
                                          const AssociationLayout& layout = {});

// --- Links -------------------------------------------------------------------

/// O_{n,k,m,l}: 0 when the helper link is at least as strong as the server
/// link (the helper performs SIC), 1 otherwise.
int decoding_indicator(const ChannelRealization& channels, std::size_t n, std::size_t m,
                       std::size_t k, std::size_t l);
int decoding_indicator(double gain_helper, double gain_server);

/// Helper-side NOMA rate in bits/s.
double rate_helper(double p_h, double p_s, double gain_helper, int o, double bandwidth_hz);
/// Server-side NOMA rate in bits/s.
double rate_server(double p_h, double p_s, double gain_server, int o, double bandwidth_hz);

double rate_helper(double p_h, double p_s, const ChannelRealization& channels, std::size_t n,
                   std::size_t m, std::size_t k, std::size_t l, const ScenarioConfig& config);
double rate_server(double p_h, double p_s, const ChannelRealization& channels, std::size_t n,
                   std::size_t m, std::size_t k, std::size_t l, const ScenarioConfig& config);

/// How a UE moves its two offloaded subtasks over the air.
enum class LinkMode {
  Noma,  // superposition on one RB, common transmission time
  Tdma,  // helper leg then server leg on one RB
  Fdma,  // both legs at once on orthogonal sub-channels, shared power budget
};

/// Who executes the "helper" subtask.
enum class HelperKind {
  None,    // no helper leg (eta_h == 0)
  Device,  // an idle UE with fixed frequency and an energy budget
  Server,  // a second MEC server sharing its frequency budget
};

/// Everything the continuous layer needs to know about one UE's links once
/// the association is fixed.
struct UeLink {
  LinkMode mode = LinkMode::Noma;
  HelperKind helper_kind = HelperKind::Device;
  int helper = kUnassigned;   // helper index (Device) or second server (Server)
  int server = kUnassigned;
  double gain_h = 0.0;        // noise-normalized, helper leg
  double gain_s = 0.0;        // noise-normalized, server leg
  double bandwidth_h = 0.0;   // Hz available to the helper leg
  double bandwidth_s = 0.0;   // Hz available to the server leg
  int o = 0;                  // decoding indicator (NOMA only)
  double helper_freq = 0.0;   // Device only
  double helper_emax = kInfinity;

  bool has_helper() const { return helper_kind != HelperKind::None; }
};

struct LinkModel {
  LinkMode mode = LinkMode::Noma;
  HelperKind helper_kind = HelperKind::Device;

  friend bool operator==(const LinkModel&, const LinkModel&) = default;
};

/// Resolves a matching unit into per-UE link parameters. A dumb helper yields
/// HelperKind::None.
UeLink resolve_link(const ScenarioConfig& config, const ChannelRealization& channels,
                    const MatchingUnit& unit, std::size_t n, const LinkModel& model);

// --- Continuous allocation ---------------------------------------------------

struct UeAllocation {
  double tau = 0.0;     // transmission time (both legs under NOMA; helper leg otherwise)
  double tau_s = 0.0;   // server-leg transmission time; equals tau under NOMA
  double eta_h = 0.0;
  double eta_s = 0.0;
  double f_s = 0.0;     // server frequency allocated to the server leg
  double f_h = 0.0;     // helper-leg executor frequency
  double beta = 0.0;    // completion-time bound
  double p_h = 0.0;
  double p_s = 0.0;
};

struct ContinuousAllocation {
  std::vector<UeAllocation> ues;
  double phi = 0.0;
};

struct FeasibilityFlags {
  bool power = true;
  bool helper_energy = true;
  bool task_split = true;
  bool server_frequency = true;
  bool deadline = true;
  bool noma_timing = true;
  bool rates = true;

  bool all() const {
    return power && helper_energy && task_split && server_frequency && deadline && noma_timing &&
           rates;
  }
};

struct UeReport {
  double tau_h = 0.0;   // helper-leg transmission time from the achieved rate
  double tau_s = 0.0;   // server-leg transmission time from the achieved rate
  double t_local = 0.0;
  double t_helper = 0.0;  // transmission + execution at the helper
  double t_server = 0.0;
  double delay = 0.0;   // T_n
  double energy = 0.0;  // E_n
  double edt = 0.0;
};

struct EdtReport {
  std::vector<UeReport> ues;
  double medt = 0.0;
  double sum_edt = 0.0;
  FeasibilityFlags flags;
};

/// Computes delays, energies and EDTs from the raw allocation and checks
/// every constraint of the joint problem with a relative tolerance.
EdtReport evaluate_edt(const ScenarioConfig& config, const std::vector<TaskSpec>& tasks,
                       const ChannelRealization& channels, const Matching& matching,
                       const ContinuousAllocation& alloc, const LinkModel& model = {},
                       double tolerance = 1e-6);

}  // namespace nomamec
