#pragma once

// The proposed NOMA scheme, the sum-objective variant and the four
// orthogonal/no-helper comparison schemes, each run through the same
// association search and continuous solver.

#include <optional>
#include <string>
#include <vector>

#include "nomamec/matching.hpp"
#include "nomamec/model.hpp"
#include "nomamec/patacra.hpp"

namespace nomamec {

enum class SchemeId {
  ProposedNoma,
  FdmaNoHelpers,    // one server, local + one offloaded share
  NomaNoHelpers,    // two servers superposed on one RB
  TdmaWithHelpers,  // helper leg then server leg on one RB
  FdmaWithHelpers,  // helper and server legs on orthogonal bands
  SumEdtVariant,    // proposed model, sum objective
};

const char* to_string(SchemeId id);
std::optional<SchemeId> parse_scheme(const std::string& name);
const std::vector<SchemeId>& all_schemes();

struct SchemeSetup {
  AssociationLayout layout;
  PatacraOptions patacra;
};

/// Association layout and continuous model of a scheme on a given config.
SchemeSetup scheme_setup(SchemeId id, const ScenarioConfig& config);

/// Reason the scheme cannot run on the config, or nullopt.
std::optional<std::string> scheme_inapplicable(SchemeId id, const ScenarioConfig& config);

struct SchemeOptions {
  SearchOptions search;
  /// Utility memo for the search; a private one when null. Must not be shared
  /// across schemes or instances.
  UtilityCache* cache = nullptr;
};

struct SchemeResult {
  SchemeId scheme = SchemeId::ProposedNoma;
  bool applicable = true;
  std::string note;

  double medt = kInfinity;
  /// Solver objective: mEDT, or the EDT sum for SumEdtVariant.
  double objective = kInfinity;
  std::vector<double> edt, energy, delay;

  Matching matching;
  PatacraSolution solution;
  LinkModel link;
  AssociationLayout layout;
  std::size_t accepted_operations = 0;
  std::size_t swap_operations = 0;
  std::size_t leave_join_operations = 0;
  std::size_t sweeps = 0;
  std::size_t solves = 0;
  bool stable = false;
  double wall_ms = 0.0;

  bool feasible() const { return applicable && solution.feasible(); }
};

SchemeResult solve_scheme(SchemeId id, const ScenarioConfig& config,
                          const ChannelRealization& channels, const std::vector<TaskSpec>& tasks,
                          const SchemeOptions& options = {});

struct FairnessReport {
  double spread_minmax = 0.0;  // max - min per-UE EDT
  double spread_sum = 0.0;
  double min_edt_minmax = 0.0;
  double min_edt_sum = 0.0;
  bool minmax_spread_not_larger = true;
};

FairnessReport fairness_report(const SchemeResult& minmax, const SchemeResult& sum);

}  // namespace nomamec
