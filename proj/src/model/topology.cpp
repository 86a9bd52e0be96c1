#include <cmath>
#include <numbers>

#include "nomamec/model.hpp"
#include "nomamec/rng.hpp"

namespace nomamec {

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double Topology::ue_helper_distance(std::size_t n, std::size_t m) const {
  return distance(ues.at(n), helpers.at(m));
}

double Topology::ue_server_distance(std::size_t n, std::size_t k) const {
  return distance(ues.at(n), servers.at(k));
}

namespace {

Point sample_disc(Rng& rng, double radius) {
  const double r = radius * std::sqrt(rng.uniform());
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

Topology generate_topology(const ScenarioConfig& config, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 1));
  Topology t;
  for (std::size_t n = 0; n < config.n_ues; ++n) t.ues.push_back(sample_disc(rng, config.disc_radius_m));
  for (std::size_t m = 0; m < config.n_helpers; ++m)
    t.helpers.push_back(sample_disc(rng, config.disc_radius_m));
  for (std::size_t k = 0; k < config.n_servers; ++k)
    t.servers.push_back(sample_disc(rng, config.disc_radius_m));
  return t;
}

ChannelRealization::ChannelRealization(std::size_t n_ues, std::size_t n_helpers,
                                       std::size_t n_servers, std::size_t n_rbs)
    : n_ues_(n_ues),
      n_helpers_(n_helpers),
      n_servers_(n_servers),
      n_rbs_(n_rbs),
      helper_gain_(n_ues * n_helpers * n_rbs, 1.0),
      server_gain_(n_ues * n_servers * n_rbs, 1.0) {}

std::size_t ChannelRealization::helper_index(std::size_t n, std::size_t m, std::size_t l) const {
  if (n >= n_ues_ || m >= n_helpers_ || l >= n_rbs_)
    throw std::out_of_range("helper channel index out of range");
  return (n * n_helpers_ + m) * n_rbs_ + l;
}

std::size_t ChannelRealization::server_index(std::size_t n, std::size_t k, std::size_t l) const {
  if (n >= n_ues_ || k >= n_servers_ || l >= n_rbs_)
    throw std::out_of_range("server channel index out of range");
  return (n * n_servers_ + k) * n_rbs_ + l;
}

double ChannelRealization::helper(std::size_t n, std::size_t m, std::size_t l) const {
  return helper_gain_[helper_index(n, m, l)];
}
double ChannelRealization::server(std::size_t n, std::size_t k, std::size_t l) const {
  return server_gain_[server_index(n, k, l)];
}
void ChannelRealization::set_helper(std::size_t n, std::size_t m, std::size_t l, double gain) {
  helper_gain_[helper_index(n, m, l)] = gain;
}
void ChannelRealization::set_server(std::size_t n, std::size_t k, std::size_t l, double gain) {
  server_gain_[server_index(n, k, l)] = gain;
}

double mean_channel_power(double distance_m, double d0, double alpha) {
  return 1.0 / (1.0 + std::pow(distance_m / d0, alpha));
}

ChannelRealization generate_channels(const Topology& topology, const ScenarioConfig& config,
                                     std::uint64_t seed) {
  if (topology.ues.size() != config.n_ues || topology.helpers.size() != config.n_helpers ||
      topology.servers.size() != config.n_servers)
    throw ModelError("topology does not match config counts");
  const double sigma2 = config.noise_power_w();
  ChannelRealization ch(config.n_ues, config.n_helpers, config.n_servers, config.n_rbs);
  Rng rng(derive_seed(seed, 2));
  for (std::size_t n = 0; n < config.n_ues; ++n) {
    for (std::size_t m = 0; m < config.n_helpers; ++m) {
      const double mean =
          mean_channel_power(topology.ue_helper_distance(n, m), config.d0, config.alpha);
      for (std::size_t l = 0; l < config.n_rbs; ++l)
        ch.set_helper(n, m, l, rng.exponential(mean) / sigma2);
    }
    for (std::size_t k = 0; k < config.n_servers; ++k) {
      const double mean =
          mean_channel_power(topology.ue_server_distance(n, k), config.d0, config.alpha);
      for (std::size_t l = 0; l < config.n_rbs; ++l)
        ch.set_server(n, k, l, rng.exponential(mean) / sigma2);
    }
  }
  return ch;
}

}  // namespace nomamec
