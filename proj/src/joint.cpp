#include "ftaq/joint.hpp"

#include <algorithm>
#include <cmath>

#include "ftaq/eval.hpp"
#include "ftaq/sweep.hpp"

namespace ftaq {

namespace {

uint64_t guarded_count(size_t leaves, const EvalOptions& opts) {
  if (leaves > 62) fail(ErrorClass::guard_exceeded, "more than 62 leaves cannot be enumerated");
  if (leaves > static_cast<size_t>(opts.max_leaves))
    fail(ErrorClass::guard_exceeded, "enumeration over " + std::to_string(leaves) + " leaves exceeds the guard (" +
                                         std::to_string(opts.max_leaves) + "); raise --max-leaves to force");
  return uint64_t(1) << leaves;
}

constexpr size_t sweep_trace_cap = 4096;

}  // namespace

bool AssumptionEnv::empty() const {
  return boolean_evidence.empty() && prob_remap.empty() && attack_prob_remap.empty() && attr_remaps.empty() &&
         budgets.empty();
}

AssumptionEnv merge_envs(const AssumptionEnv& outer, const AssumptionEnv& inner) {
  AssumptionEnv out = outer;
  for (const auto& [k, v] : inner.boolean_evidence) out.boolean_evidence[k] = v;
  for (const auto& [k, v] : inner.prob_remap) out.prob_remap[k] = v;
  for (const auto& [k, v] : inner.attack_prob_remap) out.attack_prob_remap[k] = v;
  for (const auto& [field, remap] : inner.attr_remaps)
    for (const auto& [k, v] : remap) out.attr_remaps[field][k] = v;
  out.budgets.insert(out.budgets.end(), inner.budgets.begin(), inner.budgets.end());
  return out;
}

double resolve_attachment(const TreeModel& m, std::string_view be, const AssumptionEnv& env,
                          const std::optional<StepSet>& strategy, const EvalOptions& opts) {
  NodeIndex source = m.require(be);
  auto target = m.attachment_target(source);
  if (!target) fail(ErrorClass::invalid_query, "'" + std::string(be) + "' has no attached attack tree");
  return attack_success_probability(m, m.node(*target).id, env.attack_prob_remap, strategy, opts);
}

namespace {

struct BodyEval {
  const TreeModel& m;
  const EvalOptions& opts;
  const std::vector<std::pair<std::string, AssumptionEnv>>* named = nullptr;
  std::optional<StepSet> strategy;
  std::vector<ProbeTrace>* trace = nullptr;
  std::vector<std::string>* flags = nullptr;

  const AssumptionEnv& lookup(const std::string& scope) const {
    if (named)
      for (const auto& [name, env] : *named)
        if (name == scope) return env;
    fail(ErrorClass::invalid_query, "decorator '@" + scope + "' is not declared");
  }

  AssumptionEnv scoped_env(const PflPtr& f, const AssumptionEnv& env) const {
    if (f->scope.empty()) return env;
    return merge_envs(env, lookup(f->scope));
  }

  void add_flag(const std::string& flag) const {
    if (flags && std::find(flags->begin(), flags->end(), flag) == flags->end()) flags->push_back(flag);
  }

  double probe(const PflPtr& f, const AssumptionEnv& env_in, bool* holds_out) const {
    AssumptionEnv env = env_in;
    ProbeTrace entry;
    ProbRemap remap = env.prob_remap;
    for (const auto& be : f->resolve) {
      double p = resolve_attachment(m, be, env, strategy, opts);
      remap[be] = p;  // the resolution is the remapped probability of the BE
      entry.resolved[be] = p;
    }
    BflPtr event = f->event;
    BflPtr cond = f->cond;
    if (!env.boolean_evidence.empty()) {
      for (const auto& [id, v] : env.boolean_evidence)
        if (m.side_of(m.require(id)) != Side::fault)
          fail(ErrorClass::invalid_query, "boolean evidence in an assumption set must target the fault side");
      event = bfl::with_evidence(event, env.boolean_evidence);
      if (cond) cond = bfl::with_evidence(cond, env.boolean_evidence);
    }
    // Attached BEs whose probability is taken from the model rather than
    // resolved from their attack tree get a warning flag.
    for (NodeIndex leaf : event_support(m, event)) {
      const std::string& id = m.node(leaf).id;
      if (m.is_attached(leaf) && !remap.count(id)) add_flag("unresolved-attachment");
    }
    double value = cond ? conditional_probability(m, event, cond, remap, opts)
                        : event_probability(m, event, remap, opts);
    entry.text = "P[" + to_string(f->event) + (f->cond ? " | " + to_string(f->cond) : "") + "]";
    entry.value = value;
    if (holds_out) {
      entry.has_bound = true;
      entry.cmp = f->cmp;
      entry.threshold = f->threshold;
      entry.holds = cmp_holds(f->cmp, value, f->threshold, opts.tolerance);
      *holds_out = entry.holds;
    }
    if (trace) trace->push_back(std::move(entry));
    return value;
  }

  bool eval(const PflPtr& f, const AssumptionEnv& env_in) const {
    if (!f) fail(ErrorClass::invalid_query, "empty formula");
    AssumptionEnv env = scoped_env(f, env_in);
    using K = PflNode::Kind;
    switch (f->kind) {
      case K::prob_compare: {
        bool holds = false;
        probe(f, env, &holds);
        return holds;
      }
      case K::not_op:
        return !eval(f->lhs, env);
      case K::and_op: {
        bool a = eval(f->lhs, env);
        bool b = eval(f->rhs, env);
        return a && b;
      }
      case K::or_op: {
        bool a = eval(f->lhs, env);
        bool b = eval(f->rhs, env);
        return a || b;
      }
      case K::implies: {
        bool a = eval(f->lhs, env);
        bool b = eval(f->rhs, env);
        return !a || b;
      }
      case K::remapped: {
        AssumptionEnv inner = env;
        for (const auto& [k, v] : f->remap) inner.prob_remap[k] = v;  // inner wins
        return eval(f->lhs, inner);
      }
    }
    return false;
  }
};

void collect_scopes(const PflPtr& f, std::vector<std::string>& out) {
  if (!f) return;
  if (!f->scope.empty() && std::find(out.begin(), out.end(), f->scope) == out.end()) out.push_back(f->scope);
  collect_scopes(f->lhs, out);
  collect_scopes(f->rhs, out);
}

void reject_gate_targets(const TreeModel& m, const AttrRemap& remap, const char* what) {
  for (const auto& [id, v] : remap)
    if (!m.node(m.require(id)).is_leaf())
      fail(ErrorClass::invalid_query, std::string("gate remap on '") + id + "' is not supported " + what);
}

}  // namespace

PflResult eval_pfl(const TreeModel& m, const PflPtr& formula, const EvalOptions& opts) {
  PflResult result;
  BodyEval body{m, opts};
  body.trace = &result.trace;
  std::vector<std::string> flags;
  body.flags = &flags;
  result.holds = body.eval(formula, AssumptionEnv{});
  return result;
}

JointResult eval_joint(const TreeModel& m, const JointQuery& q, const EvalOptions& opts) {
  JointResult result;
  if (!q.body) fail(ErrorClass::invalid_query, "joint query without a body");
  if (!q.existential) {
    if (!q.env_global.budgets.empty()) fail(ErrorClass::invalid_query, "budgets require an existential query");
    for (const auto& [name, env] : q.env_named)
      if (!env.budgets.empty()) fail(ErrorClass::invalid_query, "budgets require an existential query");
  }

  std::vector<std::string> scopes;
  collect_scopes(q.body, scopes);
  for (const auto& scope : scopes) {
    bool declared = false;
    for (const auto& [name, env] : q.env_named) declared |= name == scope;
    if (!declared) fail(ErrorClass::invalid_query, "decorator '@" + scope + "' is not declared");
  }

  BodyEval body{m, opts};
  body.named = &q.env_named;
  body.trace = &result.trace;
  body.flags = &result.flags;

  if (!q.existential) {
    if (q.mode == JointMode::compute) {
      if (q.body->kind != PflNode::Kind::prob_compare)
        fail(ErrorClass::invalid_query, "compute requires a single probability term");
      result.is_value = true;
      result.value = body.probe(q.body, body.scoped_env(q.body, q.env_global), nullptr);
    } else {
      result.holds = body.eval(q.body, q.env_global);
    }
    return result;
  }

  // Existential mode: one strategy (attempted-step set) is shared by every
  // budget and every attachment resolution.
  if (q.mode == JointMode::compute) fail(ErrorClass::invalid_query, "compute cannot be existential");

  struct BudgetCtx {
    Budget budget;
    AttrRemap leaf_remap;
    ConeProgram achieved;
    std::vector<NodeIndex> cone;
  };

  auto attack_domain = m.side_leaves(Side::attack);
  std::vector<NodeIndex> domain(attack_domain.begin(), attack_domain.end());
  const uint64_t total = guarded_count(domain.size(), opts);

  reject_gate_targets(m, q.env_global.attack_prob_remap, "in an existential query");
  for (const auto& [field, remap] : q.env_global.attr_remaps) reject_gate_targets(m, remap, "in an existential query");

  std::vector<BudgetCtx> budgets;
  auto add_budgets = [&](const AssumptionEnv& env) {
    for (const Budget& b : env.budgets) {
      BudgetCtx ctx;
      ctx.budget = b;
      NodeIndex target = m.require(b.element);
      if (m.side_of(target) != Side::attack)
        fail(ErrorClass::cross_side, "budget element '" + b.element + "' is not on the attack side");
      auto it = env.attr_remaps.find(domain_attr(b.domain));
      if (it != env.attr_remaps.end()) ctx.leaf_remap = it->second;
      ctx.achieved = ConeProgram::compile(m, target, domain);
      ctx.cone = cone_leaves(m, target);
      budgets.push_back(std::move(ctx));
    }
  };
  add_budgets(q.env_global);
  for (const auto& scope : scopes) {
    const AssumptionEnv& env = body.lookup(scope);
    reject_gate_targets(m, env.attack_prob_remap, "in an existential query");
    for (const auto& [field, remap] : env.attr_remaps) reject_gate_targets(m, remap, "in an existential query");
    add_budgets(merge_envs(q.env_global, env));
  }

  nlohmann::json sweep_records = nlohmann::json::array();
  std::optional<sweep::MaskKey> best;
  uint64_t recorded = 0, qualifying = 0;

  for (uint64_t mask = 0; mask < total; ++mask) {
    StepSet strategy;
    nlohmann::json strategy_ids = nlohmann::json::array();
    for (size_t p = 0; p < domain.size(); ++p)
      if ((mask >> p) & 1u) {
        strategy.insert(m.node(domain[p]).id);
        strategy_ids.push_back(m.node(domain[p]).id);
      }

    nlohmann::json record;
    record["strategy"] = strategy_ids;
    nlohmann::json budget_records = nlohmann::json::array();
    bool budgets_ok = true;
    for (const BudgetCtx& ctx : budgets) {
      const bool achieved = ctx.achieved.eval(mask);
      StepSet priced;
      for (NodeIndex leaf : ctx.cone)
        if (strategy.count(m.node(leaf).id)) priced.insert(m.node(leaf).id);
      const double value = metric_of_attack(m, ctx.budget.domain, priced, ctx.leaf_remap);
      const bool holds = achieved && cmp_holds(ctx.budget.cmp, value, ctx.budget.bound, opts.tolerance);
      budgets_ok &= holds;
      budget_records.push_back({{"element", ctx.budget.element},
                                {"domain", std::string(domain_name(ctx.budget.domain))},
                                {"achieved", achieved},
                                {"value", value},
                                {"bound", ctx.budget.bound},
                                {"holds", holds}});
    }
    record["budgets"] = budget_records;

    bool qualifies = false;
    if (budgets_ok) {
      BodyEval candidate{m, opts};
      candidate.named = &q.env_named;
      candidate.strategy = strategy;
      std::vector<ProbeTrace> candidate_trace;
      candidate.trace = &candidate_trace;
      qualifies = candidate.eval(q.body, q.env_global);
      record["body"] = qualifies;
    } else {
      record["body"] = nullptr;
    }
    record["qualifies"] = qualifies;
    if (recorded < sweep_trace_cap) {
      sweep_records.push_back(std::move(record));
      ++recorded;
    }
    if (qualifies) {
      ++qualifying;
      sweep::MaskKey key = sweep::key_of(mask);
      if (!best || key < *best) best = key;
    }
  }

  result.holds = best.has_value();
  if (best) {
    StepSet strategy;
    std::vector<std::string> ids;
    for (size_t p = 0; p < domain.size(); ++p)
      if ((best->mask >> p) & 1u) {
        strategy.insert(m.node(domain[p]).id);
        ids.push_back(m.node(domain[p]).id);
      }
    result.witness_strategy = ids;
    // Re-evaluate the winner so the reported trace belongs to the witness.
    BodyEval winner{m, opts};
    winner.named = &q.env_named;
    winner.strategy = strategy;
    winner.trace = &result.trace;
    winner.flags = &result.flags;
    winner.eval(q.body, q.env_global);
  }
  result.sweep = {{"strategies", total},
                  {"qualifying", qualifying},
                  {"records", std::move(sweep_records)},
                  {"truncated", total > recorded}};
  return result;
}

}  // namespace ftaq
