#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ftaq/engines.hpp"
#include "ftaq/formula.hpp"

#include <json.hpp>

namespace ftaq {

struct Budget {
  MetricDomain domain{};
  std::string element;
  Cmp cmp = Cmp::le;  // le or lt
  double bound = 0;
};

/// One assumption set: evidence, probability and attribute overrides, and
/// metric budgets. Decorators carry one env each; the global env applies
/// everywhere.
struct AssumptionEnv {
  EvidenceMap boolean_evidence;
  ProbRemap prob_remap;                           // fault-side leaves
  AttrRemap attack_prob_remap;                    // attack steps (gates collapse)
  std::map<AttrField, AttrRemap> attr_remaps;     // per-attribute metric overrides
  std::vector<Budget> budgets;

  bool empty() const;
};

/// Per-key override, inner wins; budgets concatenate.
AssumptionEnv merge_envs(const AssumptionEnv& outer, const AssumptionEnv& inner);

enum class JointMode { check, compute };

/// A probabilistic query over the fault side in which attached basic events
/// take probabilities computed from the attack side. Decorator scopes are
/// carried on the body's nodes (PflNode::scope).
struct JointQuery {
  PflPtr body;
  AssumptionEnv env_global;
  std::vector<std::pair<std::string, AssumptionEnv>> env_named;  // declaration order
  JointMode mode = JointMode::check;
  /// True when the query quantifies over attacker strategies; forced by any
  /// budget assumption.
  bool existential = false;
};

struct JointResult {
  bool is_value = false;
  bool holds = false;
  double value = 0;
  std::vector<ProbeTrace> trace;
  std::optional<std::vector<std::string>> witness_strategy;
  nlohmann::json sweep;  // existential mode: per-strategy records
  std::vector<std::string> flags;
};

/// Success probability of the attack tree attached to `be`, under the env's
/// attack-side probability overrides and an optional strategy. The result is
/// the remapped probability of `be` in the enclosing evaluation.
double resolve_attachment(const TreeModel& model, std::string_view be, const AssumptionEnv& env,
                          const std::optional<StepSet>& strategy = std::nullopt, const EvalOptions& opts = {});

JointResult eval_joint(const TreeModel& model, const JointQuery& query, const EvalOptions& opts = {});

}  // namespace ftaq
