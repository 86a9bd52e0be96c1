#include <functional>
#include <future>
#include <limits>
#include <sstream>

#include "nomamec/matching.hpp"

namespace nomamec {

namespace {

std::string guard_message(std::size_t count, std::size_t limit) {
  std::ostringstream os;
  os << "exhaustive search refused: more than " << limit << " matchings (counted " << count << ")";
  return os.str();
}

/// Depth-first walk over feasible matchings, one UE at a time. Stops once
/// `visit` returns false.
class Enumerator {
 public:
  Enumerator(const ScenarioConfig& config, const AssociationLayout& layout)
      : config_(config), layout_(layout), helper_used_(config.helper_slots(), false),
        rb_used_(config.n_rbs, false), load_(config.n_servers, 0) {
    current_.units.resize(config.n_ues);
  }

  void run(const std::function<bool(const Matching&)>& visit) {
    visit_ = &visit;
    stop_ = false;
    ue(0);
  }

 private:
  void ue(std::size_t n) {
    if (stop_) return;
    if (n == config_.n_ues) {
      if (!(*visit_)(current_)) stop_ = true;
      return;
    }
    MatchingUnit& u = current_.units[n];
    if (!layout_.helper) {
      server(n, u);
      return;
    }
    bool dumb_tried = false;
    for (std::size_t h = 0; h < config_.helper_slots() && !stop_; ++h) {
      if (helper_used_[h]) continue;
      if (config_.is_dumb_helper(h)) {
        if (dumb_tried) continue;
        dumb_tried = true;
      }
      helper_used_[h] = true;
      u.helper = static_cast<int>(h);
      server(n, u);
      helper_used_[h] = false;
    }
    u.helper = kUnassigned;
  }

  void server(std::size_t n, MatchingUnit& u) {
    for (std::size_t k = 0; k < config_.n_servers && !stop_; ++k) {
      if (load_[k] >= config_.server_capacity[k]) continue;
      ++load_[k];
      u.server = static_cast<int>(k);
      if (layout_.second_server) {
        for (std::size_t k2 = 0; k2 < config_.n_servers && !stop_; ++k2) {
          if (k2 == k || load_[k2] >= config_.server_capacity[k2]) continue;
          ++load_[k2];
          u.server2 = static_cast<int>(k2);
          rb(n, u);
          --load_[k2];
        }
        u.server2 = kUnassigned;
      } else {
        rb(n, u);
      }
      --load_[k];
    }
    u.server = kUnassigned;
  }

  void rb(std::size_t n, MatchingUnit& u) {
    for (std::size_t l = 0; l < config_.n_rbs && !stop_; ++l) {
      if (rb_used_[l]) continue;
      rb_used_[l] = true;
      u.rb = static_cast<int>(l);
      if (layout_.second_rb) {
        for (std::size_t l2 = 0; l2 < config_.n_rbs && !stop_; ++l2) {
          if (rb_used_[l2]) continue;
          rb_used_[l2] = true;
          u.rb2 = static_cast<int>(l2);
          ue(n + 1);
          rb_used_[l2] = false;
        }
        u.rb2 = kUnassigned;
      } else {
        ue(n + 1);
      }
      rb_used_[l] = false;
    }
    u.rb = kUnassigned;
  }

  const ScenarioConfig& config_;
  AssociationLayout layout_;
  std::vector<bool> helper_used_, rb_used_;
  std::vector<std::size_t> load_;
  Matching current_;
  const std::function<bool(const Matching&)>* visit_ = nullptr;
  bool stop_ = false;
};

std::size_t count_up_to(const ScenarioConfig& config, const AssociationLayout& layout,
                        std::size_t cap) {
  std::size_t count = 0;
  Enumerator(config, layout).run([&](const Matching&) { return ++count < cap; });
  return count;
}

}  // namespace

SearchGuardError::SearchGuardError(std::size_t count_, std::size_t limit)
    : std::runtime_error(guard_message(count_, limit)), count(count_) {}

std::size_t count_matchings(const ScenarioConfig& config, const AssociationLayout& layout) {
  return count_up_to(config, layout, std::numeric_limits<std::size_t>::max());
}

ExhaustiveResult exhaustive_search(const MatchingContext& ctx, UtilityCache& cache,
                                   const SearchOptions& options, std::size_t limit) {
  const std::size_t count = count_up_to(ctx.config, ctx.layout, limit + 1);
  if (count > limit) throw SearchGuardError(count, limit);

  std::vector<Matching> all;
  all.reserve(count);
  Enumerator(ctx.config, ctx.layout).run([&](const Matching& m) {
    all.push_back(m);
    return true;
  });

  std::vector<double> values(all.size());
  const std::size_t workers = options.workers > 1 ? static_cast<std::size_t>(options.workers) : 1;
  if (workers == 1) {
    for (std::size_t i = 0; i < all.size(); ++i) values[i] = utility(ctx, all[i], cache);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < all.size(); i += workers) values[i] = utility(ctx, all[i], cache);
      }));
    for (auto& j : jobs) j.get();
  }

  ExhaustiveResult r;
  r.enumerated = all.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  if (all.empty()) return r;
  r.matching = all[best];
  const auto entry = evaluate(ctx, r.matching, cache);
  r.utility = entry->phi;
  r.solution = entry->solution;
  return r;
}

}  // namespace nomamec
