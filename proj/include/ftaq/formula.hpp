#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftaq/model.hpp"

namespace ftaq {

enum class Cmp { lt, le, gt, ge, eq };
std::string_view cmp_text(Cmp cmp);
/// `eq` is tolerant equality (|value−bound| ≤ tol); the other comparisons are
/// strict. A +inf value satisfies only > and >=.
bool cmp_holds(Cmp cmp, double value, double bound, double tol);

// --------------------------------------------------------------------------
// Boolean fault-tree formulas. The same node type doubles as the event
// language of the probabilistic layer (events are the quantifier-free
// fragment without Mcs/Mps/Indep).

struct BflNode;
using BflPtr = std::shared_ptr<const BflNode>;

struct BflNode {
  enum class Kind {
    atom,
    not_op,
    and_op,
    or_op,
    implies,
    evidence,
    mcs,
    mps,
    indep,
    at_least,
    at_most,
    exists,
    forall,
  };

  Kind kind{};
  std::string element;               // atom/mcs/mps, indep lhs
  std::string element2;              // indep rhs
  BflPtr lhs, rhs;                   // connectives; lhs doubles as the quantifier/evidence body
  EvidenceMap evidence;              // evidence
  int k = 0;                         // at_least/at_most
  std::vector<std::string> elements; // at_least/at_most
};

namespace bfl {
BflPtr atom(std::string element);
BflPtr negate(BflPtr a);
BflPtr conj(BflPtr a, BflPtr b);
BflPtr disj(BflPtr a, BflPtr b);
BflPtr implies(BflPtr a, BflPtr b);
BflPtr with_evidence(BflPtr body, EvidenceMap evidence);
BflPtr mcs(std::string element);
BflPtr mps(std::string element);
BflPtr indep(std::string e1, std::string e2);
BflPtr at_least(int k, std::vector<std::string> elements);
BflPtr at_most(int k, std::vector<std::string> elements);
BflPtr exists(BflPtr body);
BflPtr forall(BflPtr body);
}  // namespace bfl

bool is_quantifier_free(const BflPtr& f);
/// Event formulas: quantifier-free and free of Mcs/Mps/Indep.
bool is_event_formula(const BflPtr& f);
std::string to_string(const BflPtr& f);

// --------------------------------------------------------------------------
// Probabilistic layer.

/// Probability overrides for fault-side basic events.
using ProbRemap = std::map<std::string, double>;

struct PflNode;
using PflPtr = std::shared_ptr<const PflNode>;

struct PflNode {
  enum class Kind { prob_compare, not_op, and_op, or_op, implies, remapped };

  Kind kind{};
  // prob_compare
  BflPtr event;
  BflPtr cond;  // optional conditioning event
  Cmp cmp{};
  double threshold = 0;
  std::vector<std::string> resolve;  // attached BEs resolved from the attack side
  // connectives / remapped
  PflPtr lhs, rhs;
  ProbRemap remap;
  // joint-engine decorator scope; empty = unscoped
  std::string scope;
};

namespace pfl {
PflPtr prob_compare(BflPtr event, Cmp cmp, double threshold, BflPtr cond = nullptr,
                    std::vector<std::string> resolve = {});
PflPtr negate(PflPtr a);
PflPtr conj(PflPtr a, PflPtr b);
PflPtr disj(PflPtr a, PflPtr b);
PflPtr implies(PflPtr a, PflPtr b);
PflPtr remapped(PflPtr body, ProbRemap remap);
PflPtr scoped(PflPtr node, std::string decorator);
}  // namespace pfl

std::string to_string(const PflPtr& f);

// --------------------------------------------------------------------------
// Attack-side metric layer.

enum class MetricDomain { cost, partime, seqtime, skill };
std::string_view domain_name(MetricDomain d);
std::optional<MetricDomain> domain_from_name(std::string_view name);
/// The leaf attribute a domain prices: both time domains read `time`.
AttrField domain_attr(MetricDomain d);
/// Within-attack combinator: sum for cost/seqtime, max for partime/skill.
/// Among attacks every domain minimizes; an empty attack set yields +inf.
bool domain_combines_by_max(MetricDomain d);

/// Attribute overrides for attack-side elements. A leaf target overwrites
/// one attribute; a gate target collapses the gate into a leaf carrying the
/// value (the priced-unit reading). Also used for attack-side probability
/// overrides, where values must lie in [0,1].
using AttrRemap = std::map<std::string, double>;

struct AtmNode;
using AtmPtr = std::shared_ptr<const AtmNode>;

struct AtmNode {
  enum class Kind {
    atom,
    not_op,
    and_op,
    or_op,
    implies,
    evidence,
    metric_compare,
    prob_compare,
    exists,
    forall,
  };

  Kind kind{};
  std::string element;
  MetricDomain domain{};
  AttrRemap remap;  // metric_compare: attribute overrides; prob_compare: probability overrides
  Cmp cmp{};
  double bound = 0;
  AtmPtr lhs, rhs;
  EvidenceMap evidence;
};

namespace atm {
AtmPtr atom(std::string element);
AtmPtr negate(AtmPtr a);
AtmPtr conj(AtmPtr a, AtmPtr b);
AtmPtr disj(AtmPtr a, AtmPtr b);
AtmPtr implies(AtmPtr a, AtmPtr b);
AtmPtr with_evidence(AtmPtr body, EvidenceMap evidence);
AtmPtr metric_compare(MetricDomain domain, std::string element, Cmp cmp, double bound, AttrRemap remap = {});
AtmPtr prob_compare(std::string element, Cmp cmp, double bound, AttrRemap remap = {});
AtmPtr exists(AtmPtr body);
AtmPtr forall(AtmPtr body);
}  // namespace atm

std::string to_string(const AtmPtr& f);

}  // namespace ftaq
