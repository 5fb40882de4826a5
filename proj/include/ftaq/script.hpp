#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "ftaq/joint.hpp"

namespace ftaq {

// --------------------------------------------------------------------------
// Surface syntax of LangPFL query scripts (`.lpfl`).

/// Metric-ish keyword in query atoms: Cost[..], Time[..] (= ParTime),
/// SeqTime[..], Skill[..], Prob[..].
enum class MetricKeyword { cost, partime, seqtime, skill, prob };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum class Kind {
    ident,        // bare element
    prob_term,    // P[x] or P[x|y], optionally compared
    metric_term,  // Cost[x] etc., optionally compared
    mcs,          // MCS[x]
    mps,          // MPS[x]
    indep,        // indep(x, y)
    not_op,
    and_op,
    or_op,
    implies,
    exists,
    forall,
    decorated,  // @Name( expr )
  };

  Kind kind{};
  std::string name;   // element / decorator name
  std::string name2;  // conditioning element / indep rhs
  MetricKeyword metric{};
  bool has_cmp = false;
  Cmp cmp{};
  double bound = 0;
  ExprPtr a, b;
  SourcePos pos;
};

struct Stmt {
  enum class Kind { set_bool, set_prob, set_metric, bare };

  Kind kind{};
  std::string id;
  double value = 0;
  bool is_budget = false;       // set_metric with `<=` / `<`
  Cmp budget_cmp = Cmp::le;
  AttrField field{};            // set_metric: attribute written by `=`
  MetricDomain budget_domain{}; // set_metric: domain priced by a budget
  ExprPtr expr;                 // bare assumption
  SourcePos pos;
};

struct DecoratorBlock {
  std::string name;
  std::vector<Stmt> stmts;
  SourcePos pos;
};

enum class PayloadKind { check, compute, computeall };

struct Script {
  std::vector<Stmt> assume;
  std::vector<DecoratorBlock> decorators;
  PayloadKind payload{};
  ExprPtr expr;
  SourcePos payload_pos;
  SourcePos end_pos;
  std::string origin;
};

Script parse_script(std::string_view text, std::string_view origin = "<inline>");
Script parse_script_file(const std::string& path);

/// Canonical script text (two-space indentation); parse ∘ pretty_print is
/// the structural identity.
std::string pretty_print(const Script& script);

// --------------------------------------------------------------------------
// Desugared, engine-ready queries.

struct BflCheckQuery {
  BflPtr formula;  // closed: outermost exists/forall
};
struct AllSatQuery {
  BflPtr formula;  // quantifier-free
};
struct PflCheckQuery {
  PflPtr formula;
};
struct PflComputeQuery {
  BflPtr event;
  BflPtr cond;  // optional
  ProbRemap remap;
};
struct AtmCheckQuery {
  AtmPtr formula;
};
struct AtmComputeQuery {
  bool is_prob = false;
  MetricDomain domain{};
  std::string element;
  AttrRemap remap;       // attribute overrides for the domain
  AttrRemap prob_remap;  // probability overrides (is_prob)
  EvidenceMap evidence;  // structural pins from boolean assumptions
};

using DesugaredQuery = std::variant<BflCheckQuery, AllSatQuery, PflCheckQuery, PflComputeQuery, AtmCheckQuery,
                                    AtmComputeQuery, JointQuery>;

std::string_view engine_name(const DesugaredQuery& q);

/// Resolves identifiers against the model and lowers assumptions into the
/// payload query. Fails with a positioned error on unknown ids, side
/// mismatches, and undeclared decorators.
DesugaredQuery desugar(const Script& script, const TreeModel& model);

}  // namespace ftaq
