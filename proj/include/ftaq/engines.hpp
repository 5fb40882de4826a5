#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftaq/formula.hpp"
#include "ftaq/model.hpp"

namespace ftaq {

struct EvalOptions {
  int max_leaves = 24;      // exhaustive guard on any enumeration domain
  double tolerance = 1e-9;  // tolerant-equality width
  bool parallel = true;     // OpenMP kernels; false = serial reference path
};

// --------------------------------------------------------------------------
// Boolean engine.

struct Verdict {
  bool holds = false;
  /// Satisfying vector for a holding Exists, counterexample for a failing
  /// Forall; absent otherwise. Always the canonically first qualifying
  /// vector (fewest marked leaves, then earliest ids).
  std::optional<StatusVector> witness;
};

/// Evaluates a quantifier-bearing or -free formula at one total fault-side
/// status vector. Quantified subformulas ignore the vector and sweep.
bool eval_bfl(const TreeModel& model, const BflPtr& formula, const StatusVector& status,
              const EvalOptions& opts = {});

/// Checks a closed formula (outermost Exists/Forall) by exhaustive sweep.
Verdict check_closed(const TreeModel& model, const BflPtr& formula, const EvalOptions& opts = {});

/// Marked-leaf sets of every total vector satisfying a quantifier-free
/// formula, sorted by size then lexicographically.
std::vector<std::vector<std::string>> all_sat(const TreeModel& model, const BflPtr& formula,
                                              const EvalOptions& opts = {});

std::vector<std::vector<std::string>> minimal_cut_sets(const TreeModel& model, std::string_view element,
                                                       const EvalOptions& opts = {});
std::vector<std::vector<std::string>> minimal_path_sets(const TreeModel& model, std::string_view element,
                                                        const EvalOptions& opts = {});

// --------------------------------------------------------------------------
// Probabilistic engine (fault side, independent-leaf product measure).

/// Σ over satisfying total vectors of the product of (remapped) leaf
/// probabilities. Every leaf in the event's cone needs a probability.
double event_probability(const TreeModel& model, const BflPtr& event, const ProbRemap& remap = {},
                         const EvalOptions& opts = {});

/// Fault-side leaves an event formula actually depends on (evidence cuts
/// respected), sorted by id.
std::vector<NodeIndex> event_support(const TreeModel& model, const BflPtr& event, const EvidenceMap& ambient = {});

/// Pr(event ∧ given) / Pr(given); conditioning on a null event is an error.
double conditional_probability(const TreeModel& model, const BflPtr& event, const BflPtr& given,
                               const ProbRemap& remap = {}, const EvalOptions& opts = {});

struct ProbeTrace {
  std::string text;  // rendered comparison or term
  double value = 0;
  bool has_bound = false;
  Cmp cmp{};
  double threshold = 0;
  bool holds = false;
  std::map<std::string, double> resolved;  // attachment probabilities used
};

struct PflResult {
  bool holds = false;
  std::vector<ProbeTrace> trace;  // one entry per probability comparison, evaluation order
};

PflResult eval_pfl(const TreeModel& model, const PflPtr& formula, const EvalOptions& opts = {});

struct IndependenceResult {
  bool independent = false;
  double p_joint = 0, p_first = 0, p_second = 0;
};

IndependenceResult stochastic_independence(const TreeModel& model, const BflPtr& e1, const BflPtr& e2,
                                           double tol = 1e-9, const EvalOptions& opts = {});

// --------------------------------------------------------------------------
// Attack-side engine.

using StepSet = std::set<std::string>;

/// Inclusion-minimal attack-step sets achieving `element` after evidence
/// substitution, sorted by size then lexicographically.
std::vector<std::vector<std::string>> minimal_attacks(const TreeModel& model, std::string_view element,
                                                      const EvidenceMap& evidence = {},
                                                      const EvalOptions& opts = {});

/// Best (minimal) domain value over all attacks achieving `element`; +inf
/// when no attack achieves it. Gate entries in `remap` collapse to priced
/// units first.
double metric_value(const TreeModel& model, MetricDomain domain, std::string_view element,
                    const AttrRemap& remap = {}, const EvalOptions& opts = {});

/// Same, under evidence substitution (a pinned step drops out of every
/// attack).
double metric_value(const TreeModel& model, MetricDomain domain, std::string_view element, const AttrRemap& remap,
                    const EvidenceMap& evidence, const EvalOptions& opts);

/// Product-measure probability that `element` is achieved when each step
/// succeeds independently with its (remapped) probability. Steps outside a
/// given strategy are not attempted (probability 0).
double attack_success_probability(const TreeModel& model, std::string_view element, const AttrRemap& prob_remap = {},
                                  const std::optional<StepSet>& strategy = std::nullopt,
                                  const EvalOptions& opts = {});

/// Domain value of one concrete attack (sum or max over members); an empty
/// attack costs the neutral 0.
double metric_of_attack(const TreeModel& model, MetricDomain domain, const StepSet& steps,
                        const AttrRemap& remap = {});

struct AtmVerdict {
  bool holds = false;
  std::optional<StatusVector> witness;  // attack vector, as in the boolean engine
  std::vector<ProbeTrace> trace;        // metric / probability comparisons
  bool unattackable = false;            // some compared metric had no attack (+inf)
};

/// Closed (outer-quantified) or quantifier-free attack formula. Quantifier-
/// free metric terms compare global optima; under a quantifier they price
/// the bound vector's attempted set and require the element achieved.
AtmVerdict eval_atm(const TreeModel& model, const AtmPtr& formula, const EvalOptions& opts = {});

}  // namespace ftaq
