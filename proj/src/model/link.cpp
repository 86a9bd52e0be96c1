#include <cmath>
#include <set>
#include <sstream>

#include "nomamec/model.hpp"

namespace nomamec {

int decoding_indicator(double gain_helper, double gain_server) {
  return gain_helper >= gain_server ? 0 : 1;
}

int decoding_indicator(const ChannelRealization& channels, std::size_t n, std::size_t m,
                       std::size_t k, std::size_t l) {
  return decoding_indicator(channels.helper(n, m, l), channels.server(n, k, l));
}

double rate_helper(double p_h, double p_s, double gain_helper, int o, double bandwidth_hz) {
  if (p_h <= 0.0) return 0.0;
  return bandwidth_hz * std::log2(1.0 + p_h * gain_helper / (o * p_s * gain_helper + 1.0));
}

double rate_server(double p_h, double p_s, double gain_server, int o, double bandwidth_hz) {
  if (p_s <= 0.0) return 0.0;
  return bandwidth_hz * std::log2(1.0 + p_s * gain_server / ((1 - o) * p_h * gain_server + 1.0));
}

double rate_helper(double p_h, double p_s, const ChannelRealization& channels, std::size_t n,
                   std::size_t m, std::size_t k, std::size_t l, const ScenarioConfig& config) {
  return rate_helper(p_h, p_s, channels.helper(n, m, l), decoding_indicator(channels, n, m, k, l),
                     config.bandwidth_hz);
}

double rate_server(double p_h, double p_s, const ChannelRealization& channels, std::size_t n,
                   std::size_t m, std::size_t k, std::size_t l, const ScenarioConfig& config) {
  return rate_server(p_h, p_s, channels.server(n, k, l), decoding_indicator(channels, n, m, k, l),
                     config.bandwidth_hz);
}

std::optional<std::string> check_matching(const ScenarioConfig& config, const Matching& matching,
                                          const AssociationLayout& layout) {
  std::ostringstream os;
  if (matching.size() != config.n_ues) {
    os << "matching has " << matching.size() << " units for " << config.n_ues << " UEs";
    return os.str();
  }
  std::set<int> helpers, rbs;
  std::vector<std::size_t> load(config.n_servers, 0);
  const auto helper_slots = static_cast<int>(config.helper_slots());
  for (std::size_t n = 0; n < matching.size(); ++n) {
    const MatchingUnit& u = matching.units[n];
    if (layout.helper) {
      if (u.helper < 0 || u.helper >= helper_slots) {
        os << "UE " << n << " has no valid helper";
        return os.str();
      }
      if (!helpers.insert(u.helper).second) {
        os << "helper " << u.helper << " matched twice";
        return os.str();
      }
    } else if (u.helper != kUnassigned) {
      os << "UE " << n << " uses a helper slot the layout does not have";
      return os.str();
    }
    auto take_server = [&](int k) -> bool {
      if (k < 0 || k >= static_cast<int>(config.n_servers)) {
        os << "UE " << n << " has no valid server";
        return false;
      }
      if (++load[static_cast<std::size_t>(k)] > config.server_capacity[static_cast<std::size_t>(k)]) {
        os << "server " << k << " exceeds its capacity";
        return false;
      }
      return true;
    };
    auto take_rb = [&](int l) -> bool {
      if (l < 0 || l >= static_cast<int>(config.n_rbs)) {
        os << "UE " << n << " has no valid RB";
        return false;
      }
      if (!rbs.insert(l).second) {
        os << "RB " << l << " assigned twice";
        return false;
      }
      return true;
    };
    if (!take_server(u.server) || !take_rb(u.rb)) return os.str();
    if (layout.second_server) {
      if (u.server2 == u.server) {
        os << "UE " << n << " uses the same server twice";
        return os.str();
      }
      if (!take_server(u.server2)) return os.str();
    } else if (u.server2 != kUnassigned) {
      os << "UE " << n << " uses a second server the layout does not have";
      return os.str();
    }
    if (layout.second_rb) {
      if (!take_rb(u.rb2)) return os.str();
    } else if (u.rb2 != kUnassigned) {
      os << "UE " << n << " uses a second RB the layout does not have";
      return os.str();
    }
  }
  return std::nullopt;
}

UeLink resolve_link(const ScenarioConfig& config, const ChannelRealization& channels,
                    const MatchingUnit& unit, std::size_t n, const LinkModel& model) {
  UeLink link;
  link.mode = model.mode;
  link.server = unit.server;
  const auto k = static_cast<std::size_t>(unit.server);
  const auto l = static_cast<std::size_t>(unit.rb);
  const double b = config.bandwidth_hz;
  link.gain_s = channels.server(n, k, l);
  link.bandwidth_s = b;
  link.bandwidth_h = b;

  switch (model.helper_kind) {
    case HelperKind::None:
      link.helper_kind = HelperKind::None;
      break;
    case HelperKind::Device:
      if (unit.helper == kUnassigned || config.is_dumb_helper(static_cast<std::size_t>(unit.helper))) {
        link.helper_kind = HelperKind::None;
      } else {
        const auto m = static_cast<std::size_t>(unit.helper);
        link.helper_kind = HelperKind::Device;
        link.helper = unit.helper;
        link.gain_h = channels.helper(n, m, l);
        link.helper_freq = config.helper_freq[m];
        link.helper_emax = config.helper_emax[m];
      }
      break;
    case HelperKind::Server:
      link.helper_kind = HelperKind::Server;
      link.helper = unit.server2;
      link.gain_h = channels.server(n, static_cast<std::size_t>(unit.server2), l);
      break;
  }
  if (!link.has_helper()) link.gain_h = 0.0;

  if (model.mode == LinkMode::Noma) {
    link.o = link.has_helper() ? decoding_indicator(link.gain_h, link.gain_s) : 0;
  } else if (model.mode == LinkMode::Fdma && link.has_helper()) {
    if (unit.rb2 != kUnassigned) {
      // Helper leg on the primary RB, server leg on the secondary RB.
      link.gain_s = channels.server(n, k, static_cast<std::size_t>(unit.rb2));
    } else {
      // Two half-bandwidth sub-bands: noise halves, so normalized gains double.
      link.bandwidth_h = link.bandwidth_s = 0.5 * b;
      link.gain_h *= 2.0;
      link.gain_s *= 2.0;
    }
  }
  return link;
}

}  // namespace nomamec
