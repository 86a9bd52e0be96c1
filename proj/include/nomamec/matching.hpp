#pragma once

// Four-sided UE-helper-server-RB association: matching state, swap and
// leave/join operations, the stable-matching local search and the exhaustive
// reference search.

#include <atomic>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "nomamec/model.hpp"
#include "nomamec/patacra.hpp"

namespace nomamec {

/// Slot of a matching unit. The second server/RB slots exist only under
/// layouts that use them.
enum class Role { Ue, Helper, Server, Rb, SecondServer, SecondRb };

const char* to_string(Role role);

/// Everything a utility evaluation needs. Holds references; the instance must
/// outlive it.
struct MatchingContext {
  const ScenarioConfig& config;
  const ChannelRealization& channels;
  const std::vector<TaskSpec>& tasks;
  AssociationLayout layout{};
  PatacraOptions patacra{};
};

/// A matching with its matched/unmatched player sets.
struct MatchingState {
  Matching matching;
  std::vector<int> helpers_matched, helpers_unmatched;
  std::vector<int> rbs_matched, rbs_unmatched;
  std::vector<int> servers_matched, servers_with_slack;
};

MatchingState make_state(const ScenarioConfig& config, Matching matching,
                         const AssociationLayout& layout = {});

/// Sorted (n -> m, k, l[, k2, l2]) tuples.
std::string canonical_key(const Matching& matching);

/// Memoized utilities, safe for concurrent lookup and insert.
class UtilityCache {
 public:
  struct Entry {
    double phi;
    PatacraSolution solution;
  };

  std::shared_ptr<const Entry> find(const std::string& key) const;
  /// Keeps the first entry when two threads race on one key.
  std::shared_ptr<const Entry> insert(const std::string& key, PatacraSolution solution);

  std::size_t size() const;
  std::size_t hits() const { return hits_.load(); }
  std::size_t solves() const { return solves_.load(); }

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<const Entry>> entries_;
  mutable std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> solves_{0};
};

/// Continuous optimum of a feasible matching; +inf when no allocation exists.
std::shared_ptr<const UtilityCache::Entry> evaluate(const MatchingContext& ctx,
                                                    const Matching& matching, UtilityCache& cache);
double utility(const MatchingContext& ctx, const Matching& matching, UtilityCache& cache);

/// UEs in index order take the best-gain free helper, the least-loaded server
/// with room and the best-gain free RB. Throws ModelError on capacity shortfall.
Matching initial_matching(const ScenarioConfig& config, const ChannelRealization& channels,
                          const AssociationLayout& layout = {});

/// Exchanges one slot between units n1 and n2 (Role::Ue exchanges every
/// slot). nullopt when the slot values coincide or the result is infeasible.
/// With `strict` the two units must differ in every slot.
std::optional<Matching> apply_ss(const ScenarioConfig& config, const Matching& matching, Role role,
                                 std::size_t n1, std::size_t n2,
                                 const AssociationLayout& layout = {}, bool strict = false);

/// Unit n releases its slot and takes `target` instead. nullopt when target
/// is the current value, already taken (helpers, RBs), full (servers), or the
/// result is infeasible.
std::optional<Matching> apply_lj(const ScenarioConfig& config, const Matching& matching, Role role,
                                 std::size_t n, int target, const AssociationLayout& layout = {});

struct Operation {
  enum class Kind { Swap, LeaveJoin } kind = Kind::Swap;
  Role role = Role::Ue;
  std::size_t unit = 0;
  std::size_t other_unit = 0;  // Swap
  int target = kUnassigned;    // LeaveJoin
  Matching result;

  std::string describe() const;
};

std::vector<Operation> swap_candidates(const ScenarioConfig& config, const Matching& matching,
                                       Role role, const AssociationLayout& layout, bool strict);
std::vector<Operation> leave_join_candidates(const ScenarioConfig& config, const Matching& matching,
                                             Role role, const AssociationLayout& layout);

/// Roles swept in order for each stage under a layout.
std::vector<Role> swap_roles(const AssociationLayout& layout);
std::vector<Role> leave_join_roles(const ScenarioConfig& config, const AssociationLayout& layout);

struct SearchOptions {
  /// Threads evaluating candidate utilities; acceptance order does not depend on it.
  int workers = 1;
  /// A candidate blocks only when it improves the utility by more than this.
  double margin = 1e-9;
  bool strict_swaps = false;
  std::size_t max_operations = 100000;
};

struct SearchResult {
  Matching matching;
  PatacraSolution solution;
  double utility = kInfinity;
  std::vector<double> utility_trace;  // initial utility, then one entry per accepted operation
  std::vector<std::string> operations;
  std::size_t accepted = 0;
  std::size_t sweeps = 0;
  /// True when the last full sweep found no blocking operation.
  bool stable = false;
};

SearchResult fs_urhsm(const MatchingContext& ctx, UtilityCache& cache,
                      const SearchOptions& options = {});
SearchResult fs_urhsm(const MatchingContext& ctx, UtilityCache& cache, const Matching& start,
                      const SearchOptions& options = {});

/// First swap or leave/join operation that improves on `matching`; nullopt certifies stability.
std::optional<Operation> find_blocking(const MatchingContext& ctx, const Matching& matching,
                                       UtilityCache& cache, const SearchOptions& options = {});

class SearchGuardError : public std::runtime_error {
 public:
  SearchGuardError(std::size_t count, std::size_t limit);
  std::size_t count;
};

/// Feasible matchings up to relabeling of dumb helpers.
std::size_t count_matchings(const ScenarioConfig& config, const AssociationLayout& layout = {});

struct ExhaustiveResult {
  Matching matching;
  double utility = kInfinity;
  PatacraSolution solution;
  std::size_t enumerated = 0;
};

ExhaustiveResult exhaustive_search(const MatchingContext& ctx, UtilityCache& cache,
                                   const SearchOptions& options = {}, std::size_t limit = 100000);

}  // namespace nomamec
