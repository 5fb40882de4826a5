#include <algorithm>
#include <set>
#include <sstream>

#include "ftaq/script.hpp"

namespace ftaq {

namespace {

MetricDomain metric_domain_of(MetricKeyword mk) {
  switch (mk) {
    case MetricKeyword::cost: return MetricDomain::cost;
    case MetricKeyword::partime: return MetricDomain::partime;
    case MetricKeyword::seqtime: return MetricDomain::seqtime;
    case MetricKeyword::skill: return MetricDomain::skill;
    case MetricKeyword::prob: return MetricDomain::cost;  // unused; prob terms take another path
  }
  return MetricDomain::cost;
}

/// Assumption statements split by what they target.
struct RawEnv {
  EvidenceMap fault_evidence;
  EvidenceMap attack_evidence;
  ProbRemap fault_prob;
  AttrRemap attack_prob;  // probability overrides on attack elements (gates collapse)
  std::map<AttrField, AttrRemap> attr;
  std::vector<Budget> budgets;
  std::vector<const Stmt*> antecedents;

  bool has_attack_content() const { return !attack_evidence.empty() || !attack_prob.empty() || !attr.empty(); }
};

struct Census {
  bool prob_term = false;
  bool metric_term = false;
  bool decorated = false;
  bool mcs_mps = false;
  bool fault_ident = false;
  bool attack_ident = false;
};

class Desugarer {
 public:
  Desugarer(const Script& script, const TreeModel& model) : s_(script), m_(model) {}

  DesugaredQuery run() {
    global_ = fold_env(s_.assume);
    for (const auto& block : s_.decorators) decorator_envs_.emplace_back(block.name, fold_env(block.stmts));

    Census census;
    scan(s_.expr, census);

    switch (s_.payload) {
      case PayloadKind::computeall: return desugar_computeall(census);
      case PayloadKind::compute: return desugar_compute(census);
      case PayloadKind::check: return desugar_check(census);
    }
    fail(ErrorClass::invalid_query, "missing payload");
  }

 private:
  NodeIndex resolve(const std::string& id, SourcePos pos) const {
    NodeIndex i = m_.find(id);
    if (i == no_node) fail(ErrorClass::unknown_element, "unknown element '" + id + "'", pos);
    return i;
  }

  Side side_of(const std::string& id, SourcePos pos) const { return m_.side_of(resolve(id, pos)); }

  RawEnv fold_env(const std::vector<Stmt>& stmts) const {
    RawEnv env;
    for (const Stmt& stmt : stmts) {
      switch (stmt.kind) {
        case Stmt::Kind::set_bool: {
          NodeIndex i = resolve(stmt.id, stmt.pos);
          (m_.side_of(i) == Side::fault ? env.fault_evidence : env.attack_evidence)[stmt.id] = stmt.value != 0.0;
          break;
        }
        case Stmt::Kind::set_prob: {
          NodeIndex i = resolve(stmt.id, stmt.pos);
          const Node& node = m_.node(i);
          if (node.is_leaf()) {
            if (node.side == Side::fault) env.fault_prob[stmt.id] = stmt.value;
            else env.attack_prob[stmt.id] = stmt.value;
          } else if (stmt.value == 0.0 || stmt.value == 1.0) {
            (node.side == Side::fault ? env.fault_evidence : env.attack_evidence)[stmt.id] = stmt.value == 1.0;
          } else if (node.side == Side::attack) {
            // Pricing a whole attack subtree with one success probability:
            // the gate collapses into a single step.
            env.attack_prob[stmt.id] = stmt.value;
          } else {
            fail(ErrorClass::invalid_query,
                 "set_prob on fault gate '" + stmt.id + "' requires 0 or 1", stmt.pos);
          }
          break;
        }
        case Stmt::Kind::set_metric: {
          NodeIndex i = resolve(stmt.id, stmt.pos);
          if (m_.side_of(i) != Side::attack)
            fail(ErrorClass::invalid_query, "metric assumption targets fault-side '" + stmt.id + "'", stmt.pos);
          if (stmt.is_budget) {
            env.budgets.push_back({stmt.budget_domain, stmt.id, stmt.budget_cmp, stmt.value});
          } else {
            env.attr[stmt.field][stmt.id] = stmt.value;
          }
          break;
        }
        case Stmt::Kind::bare:
          env.antecedents.push_back(&stmt);
          break;
      }
    }
    return env;
  }

  void scan(const ExprPtr& e, Census& census) const {
    if (!e) return;
    switch (e->kind) {
      case Expr::Kind::prob_term: census.prob_term = true; break;
      case Expr::Kind::metric_term: census.metric_term = true; break;
      case Expr::Kind::decorated: census.decorated = true; break;
      case Expr::Kind::mcs:
      case Expr::Kind::mps: census.mcs_mps = true; break;
      case Expr::Kind::ident:
        (side_of(e->name, e->pos) == Side::fault ? census.fault_ident : census.attack_ident) = true;
        break;
      case Expr::Kind::indep: census.fault_ident = true; break;
      default: break;
    }
    scan(e->a, census);
    scan(e->b, census);
  }

  bool has_budgets() const {
    if (!global_.budgets.empty()) return true;
    for (const auto& [name, env] : decorator_envs_)
      if (!env.budgets.empty()) return true;
    return false;
  }

  // ---- boolean (fault-side) route ------------------------------------

  BflPtr to_bfl(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::ident:
        if (side_of(e->name, e->pos) != Side::fault)
          fail(ErrorClass::cross_side, "'" + e->name + "' is not a fault-side element", e->pos);
        return bfl::atom(e->name);
      case Expr::Kind::mcs:
        if (side_of(e->name, e->pos) != Side::fault)
          fail(ErrorClass::cross_side, "MCS expects a fault-side element", e->pos);
        return bfl::mcs(e->name);
      case Expr::Kind::mps:
        if (side_of(e->name, e->pos) != Side::fault)
          fail(ErrorClass::cross_side, "MPS expects a fault-side element", e->pos);
        return bfl::mps(e->name);
      case Expr::Kind::indep:
        resolve(e->name, e->pos);
        resolve(e->name2, e->pos);
        return bfl::indep(e->name, e->name2);
      case Expr::Kind::not_op: return bfl::negate(to_bfl(e->a));
      case Expr::Kind::and_op: return bfl::conj(to_bfl(e->a), to_bfl(e->b));
      case Expr::Kind::or_op: return bfl::disj(to_bfl(e->a), to_bfl(e->b));
      case Expr::Kind::implies: return bfl::implies(to_bfl(e->a), to_bfl(e->b));
      case Expr::Kind::exists: return bfl::exists(to_bfl(e->a));
      case Expr::Kind::forall: return bfl::forall(to_bfl(e->a));
      default:
        fail(ErrorClass::invalid_query, "probability/metric terms cannot appear in a boolean query", e->pos);
    }
  }

  void require_no_probabilistic_assumptions(const char* what) const {
    if (!global_.fault_prob.empty() || !global_.attack_prob.empty() || !global_.attr.empty() ||
        !global_.budgets.empty() || !decorator_envs_.empty())
      fail(ErrorClass::invalid_query, std::string("probability/metric assumptions are not supported with ") + what,
           s_.payload_pos);
  }

  /// Wraps assumptions around a boolean payload inside its quantifier
  /// prefix: quantifiers re-applied over Evidence(Implies(antecedents, body)).
  BflPtr wrap_bfl(const ExprPtr& expr, bool close_with_forall) const {
    std::vector<Expr::Kind> quants;
    ExprPtr body = expr;
    while (body->kind == Expr::Kind::exists || body->kind == Expr::Kind::forall) {
      quants.push_back(body->kind);
      body = body->a;
    }
    BflPtr out = to_bfl(body);
    for (auto it = global_.antecedents.rbegin(); it != global_.antecedents.rend(); ++it)
      out = bfl::implies(to_bfl((*it)->expr), out);
    if (!global_.fault_evidence.empty()) out = bfl::with_evidence(out, global_.fault_evidence);
    if (!global_.attack_evidence.empty())
      fail(ErrorClass::cross_side, "attack-side evidence with a fault-side boolean query", s_.payload_pos);
    for (auto it = quants.rbegin(); it != quants.rend(); ++it)
      out = *it == Expr::Kind::exists ? bfl::exists(out) : bfl::forall(out);
    if (quants.empty() && close_with_forall) out = bfl::forall(out);
    return out;
  }

  DesugaredQuery desugar_computeall(const Census& census) const {
    if (census.prob_term || census.metric_term || census.decorated || census.attack_ident)
      fail(ErrorClass::invalid_query, "computeall expects a boolean fault-side expression", s_.payload_pos);
    if (!is_quantifier_free_expr(s_.expr))
      fail(ErrorClass::invalid_query, "computeall expects a quantifier-free expression", s_.payload_pos);
    if (!global_.antecedents.empty())
      fail(ErrorClass::invalid_query, "bare assumptions are not supported with computeall",
           global_.antecedents.front()->pos);
    require_no_probabilistic_assumptions("computeall");
    BflPtr formula = to_bfl(s_.expr);
    if (!global_.fault_evidence.empty()) formula = bfl::with_evidence(formula, global_.fault_evidence);
    if (!global_.attack_evidence.empty())
      fail(ErrorClass::cross_side, "attack-side evidence with a fault-side boolean query", s_.payload_pos);
    return AllSatQuery{formula};
  }

  static bool is_quantifier_free_expr(const ExprPtr& e) {
    if (!e) return true;
    if (e->kind == Expr::Kind::exists || e->kind == Expr::Kind::forall) return false;
    return is_quantifier_free_expr(e->a) && is_quantifier_free_expr(e->b);
  }

  // ---- probabilistic / joint route -----------------------------------

  /// Attached BEs in the cone of `event` that the user did not explicitly
  /// remap: these get resolved from their attack trees.
  std::vector<std::string> resolve_list(const BflPtr& event) const {
    std::vector<std::string> out;
    for (NodeIndex leaf : event_support(m_, event)) {
      const std::string& id = m_.node(leaf).id;
      if (m_.is_attached(leaf) && !global_.fault_prob.count(id)) out.push_back(id);
    }
    return out;
  }

  PflPtr prob_node(const ExprPtr& e, bool require_cmp) const {
    if (side_of(e->name, e->pos) != Side::fault)
      fail(ErrorClass::cross_side, "P[...] expects a fault-side element", e->pos);
    if (require_cmp && !e->has_cmp)
      fail(ErrorClass::invalid_query, "a probability term in check position needs a comparison", e->pos);
    if (e->has_cmp && (e->bound < 0.0 || e->bound > 1.0))
      fail(ErrorClass::invalid_query, "probability threshold outside [0,1]", e->pos);
    BflPtr event = bfl::atom(e->name);
    BflPtr cond;
    if (!e->name2.empty()) {
      if (side_of(e->name2, e->pos) != Side::fault)
        fail(ErrorClass::cross_side, "P[...|...] expects fault-side elements", e->pos);
      cond = bfl::atom(e->name2);
    }
    std::vector<std::string> resolve = resolve_list(cond ? bfl::disj(event, cond) : event);
    return pfl::prob_compare(event, e->has_cmp ? e->cmp : Cmp::ge, e->has_cmp ? e->bound : 0.0, cond,
                             std::move(resolve));
  }

  PflPtr to_pfl(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::prob_term: return prob_node(e, true);
      case Expr::Kind::not_op: return pfl::negate(to_pfl(e->a));
      case Expr::Kind::and_op: return pfl::conj(to_pfl(e->a), to_pfl(e->b));
      case Expr::Kind::or_op: return pfl::disj(to_pfl(e->a), to_pfl(e->b));
      case Expr::Kind::implies: return pfl::implies(to_pfl(e->a), to_pfl(e->b));
      case Expr::Kind::decorated: {
        bool declared = false;
        for (const auto& block : s_.decorators) declared |= block.name == e->name;
        if (!declared) fail(ErrorClass::invalid_query, "decorator '@" + e->name + "' is not declared", e->pos);
        return pfl::scoped(to_pfl(e->a), e->name);
      }
      case Expr::Kind::exists:
      case Expr::Kind::forall:
        fail(ErrorClass::invalid_query, "a quantifier must be outermost in a probabilistic query", e->pos);
      default:
        fail(ErrorClass::invalid_query, "boolean atoms cannot appear in a probabilistic query", e->pos);
    }
  }

  AssumptionEnv to_env(const RawEnv& raw, SourcePos pos) const {
    if (!raw.antecedents.empty())
      fail(ErrorClass::invalid_query, "bare assumptions are not supported in probabilistic queries",
           raw.antecedents.front()->pos);
    AssumptionEnv env;
    env.boolean_evidence = raw.fault_evidence;
    env.prob_remap = raw.fault_prob;
    env.attack_prob_remap = raw.attack_prob;
    // Attack-side boolean evidence pins a step or subtree: as a probability
    // override 0/1 it is equivalent and keeps one mechanism.
    for (const auto& [id, v] : raw.attack_evidence) env.attack_prob_remap[id] = v ? 1.0 : 0.0;
    env.attr_remaps = raw.attr;
    env.budgets = raw.budgets;
    (void)pos;
    return env;
  }

  DesugaredQuery desugar_prob_check(const Census& census) const {
    ExprPtr body_expr = s_.expr;
    bool existential = false;
    if (body_expr->kind == Expr::Kind::exists) {
      existential = true;
      body_expr = body_expr->a;
    } else if (body_expr->kind == Expr::Kind::forall) {
      fail(ErrorClass::invalid_query, "forall over probabilistic queries is not supported", body_expr->pos);
    }
    if (has_budgets()) existential = true;

    PflPtr body = to_pfl(body_expr);

    // Metric attribute assumptions are only read by budgets.
    auto attrs_need_budgets = [&](const RawEnv& env) {
      if (!env.attr.empty() && !has_budgets())
        fail(ErrorClass::invalid_query, "metric attribute assumptions need a budget", s_.payload_pos);
    };
    attrs_need_budgets(global_);
    for (const auto& [name, env] : decorator_envs_) attrs_need_budgets(env);

    const bool needs_joint = existential || census.decorated || has_joint_content(body) || global_attack_content();
    if (!needs_joint) {
      PflPtr formula = body;
      if (!global_.fault_evidence.empty()) formula = wrap_events_with_evidence(formula, global_.fault_evidence);
      if (!global_.fault_prob.empty()) formula = pfl::remapped(formula, global_.fault_prob);
      return PflCheckQuery{formula};
    }

    JointQuery q;
    q.body = body;
    q.env_global = to_env(global_, s_.payload_pos);
    for (const auto& [name, env] : decorator_envs_) q.env_named.emplace_back(name, to_env(env, s_.payload_pos));
    q.mode = JointMode::check;
    q.existential = existential;
    return q;
  }

  bool has_joint_content(const PflPtr& f) const {
    if (!f) return false;
    if (!f->resolve.empty()) return true;
    if (has_joint_content(f->lhs) || has_joint_content(f->rhs)) return true;
    if (f->kind == PflNode::Kind::prob_compare) return false;
    return false;
  }

  bool global_attack_content() const { return global_.has_attack_content(); }

  static PflPtr wrap_events_with_evidence(const PflPtr& f, const EvidenceMap& evidence) {
    if (!f) return f;
    PflNode n = *f;
    if (n.kind == PflNode::Kind::prob_compare) {
      n.event = bfl::with_evidence(n.event, evidence);
      if (n.cond) n.cond = bfl::with_evidence(n.cond, evidence);
    } else {
      n.lhs = wrap_events_with_evidence(n.lhs, evidence);
      n.rhs = wrap_events_with_evidence(n.rhs, evidence);
    }
    return std::make_shared<const PflNode>(std::move(n));
  }

  // ---- attack-side route ----------------------------------------------

  AtmPtr to_atm(const ExprPtr& e) const {
    switch (e->kind) {
      case Expr::Kind::ident:
        if (side_of(e->name, e->pos) != Side::attack)
          fail(ErrorClass::cross_side, "'" + e->name + "' is not an attack-side element", e->pos);
        return atm::atom(e->name);
      case Expr::Kind::metric_term: {
        if (side_of(e->name, e->pos) != Side::attack)
          fail(ErrorClass::cross_side, "metric terms expect an attack-side element", e->pos);
        if (!e->has_cmp)
          fail(ErrorClass::invalid_query, "a metric term in check position needs a comparison", e->pos);
        if (e->metric == MetricKeyword::prob) {
          return atm::prob_compare(e->name, e->cmp, e->bound, global_.attack_prob);
        }
        MetricDomain domain = metric_domain_of(e->metric);
        AttrRemap remap;
        auto it = global_.attr.find(domain_attr(domain));
        if (it != global_.attr.end()) remap = it->second;
        return atm::metric_compare(domain, e->name, e->cmp, e->bound, remap);
      }
      case Expr::Kind::not_op: return atm::negate(to_atm(e->a));
      case Expr::Kind::and_op: return atm::conj(to_atm(e->a), to_atm(e->b));
      case Expr::Kind::or_op: return atm::disj(to_atm(e->a), to_atm(e->b));
      case Expr::Kind::implies: return atm::implies(to_atm(e->a), to_atm(e->b));
      case Expr::Kind::exists: return atm::exists(to_atm(e->a));
      case Expr::Kind::forall: return atm::forall(to_atm(e->a));
      default:
        fail(ErrorClass::invalid_query, "this term cannot appear in an attack-side query", e->pos);
    }
  }

  void scan_metric_usage(const ExprPtr& e, std::set<AttrField>& fields, bool& prob_used) const {
    if (!e) return;
    if (e->kind == Expr::Kind::metric_term) {
      if (e->metric == MetricKeyword::prob) prob_used = true;
      else fields.insert(domain_attr(metric_domain_of(e->metric)));
    }
    scan_metric_usage(e->a, fields, prob_used);
    scan_metric_usage(e->b, fields, prob_used);
  }

  DesugaredQuery desugar_atm_check() const {
    if (!global_.fault_evidence.empty() || !global_.fault_prob.empty())
      fail(ErrorClass::invalid_query, "fault-side assumptions with an attack-side query", s_.payload_pos);
    if (has_budgets())
      fail(ErrorClass::invalid_query, "budgets require a probabilistic check", s_.payload_pos);
    if (!decorator_envs_.empty())
      fail(ErrorClass::invalid_query, "decorators require a probabilistic check", s_.payload_pos);
    // Every assumption must land in the query: an override no term reads is
    // a mistake, not a no-op.
    std::set<AttrField> fields;
    bool prob_used = false;
    scan_metric_usage(s_.expr, fields, prob_used);
    if (!global_.attack_prob.empty() && !prob_used)
      fail(ErrorClass::invalid_query, "probability assumptions need a probabilistic term", s_.payload_pos);
    for (const auto& [field, remap] : global_.attr)
      if (!fields.count(field))
        fail(ErrorClass::invalid_query,
             std::string("no metric term reads the ") + std::string(attr_name(field)) + " assumptions",
             s_.payload_pos);

    std::vector<Expr::Kind> quants;
    ExprPtr body = s_.expr;
    while (body->kind == Expr::Kind::exists || body->kind == Expr::Kind::forall) {
      quants.push_back(body->kind);
      body = body->a;
    }
    AtmPtr out = to_atm(body);
    for (auto it = global_.antecedents.rbegin(); it != global_.antecedents.rend(); ++it)
      out = atm::implies(to_atm((*it)->expr), out);
    if (!global_.attack_evidence.empty()) out = atm::with_evidence(out, global_.attack_evidence);
    for (auto it = quants.rbegin(); it != quants.rend(); ++it)
      out = *it == Expr::Kind::exists ? atm::exists(out) : atm::forall(out);

    // Bare boolean attack payloads without a quantifier close universally,
    // like the fault-side rule; metric comparisons stay global.
    Census census;
    scan(body, census);
    if (quants.empty() && !census.metric_term) out = atm::forall(out);
    return AtmCheckQuery{out};
  }

  // ---- compute --------------------------------------------------------

  DesugaredQuery desugar_compute(const Census& census) const {
    const ExprPtr& e = s_.expr;
    if (has_budgets()) fail(ErrorClass::invalid_query, "budgets are not supported with compute", s_.payload_pos);
    if (e->kind == Expr::Kind::prob_term) {
      if (e->has_cmp) fail(ErrorClass::invalid_query, "compute expects a bare term without a comparison", e->pos);
      if (!global_.antecedents.empty())
        fail(ErrorClass::invalid_query, "bare assumptions are not supported with compute",
             global_.antecedents.front()->pos);
      if (!global_.attr.empty())
        fail(ErrorClass::invalid_query, "metric attribute assumptions need a metric term", s_.payload_pos);
      PflPtr node = prob_node(e, false);
      const bool needs_joint = !node->resolve.empty() || !global_.attack_prob.empty() ||
                               !global_.attack_evidence.empty();
      if (!needs_joint) {
        BflPtr event = node->event;
        BflPtr cond = node->cond;
        if (!global_.fault_evidence.empty()) {
          event = bfl::with_evidence(event, global_.fault_evidence);
          if (cond) cond = bfl::with_evidence(cond, global_.fault_evidence);
        }
        return PflComputeQuery{event, cond, global_.fault_prob};
      }
      JointQuery q;
      q.body = node;
      q.env_global = to_env(global_, s_.payload_pos);
      for (const auto& [name, env] : decorator_envs_) q.env_named.emplace_back(name, to_env(env, s_.payload_pos));
      q.mode = JointMode::compute;
      return q;
    }
    if (e->kind == Expr::Kind::metric_term) {
      if (e->has_cmp) fail(ErrorClass::invalid_query, "compute expects a bare term without a comparison", e->pos);
      if (side_of(e->name, e->pos) != Side::attack)
        fail(ErrorClass::cross_side, "metric terms expect an attack-side element", e->pos);
      if (!global_.fault_evidence.empty() || !global_.fault_prob.empty())
        fail(ErrorClass::invalid_query, "fault-side assumptions with an attack-side query", s_.payload_pos);
      if (!global_.antecedents.empty())
        fail(ErrorClass::invalid_query, "bare assumptions are not supported with compute",
             global_.antecedents.front()->pos);
      if (!decorator_envs_.empty())
        fail(ErrorClass::invalid_query, "decorators require a probabilistic check", s_.payload_pos);
      AtmComputeQuery q;
      q.element = e->name;
      if (e->metric == MetricKeyword::prob) {
        if (!global_.attr.empty())
          fail(ErrorClass::invalid_query, "metric attribute assumptions need a metric term", s_.payload_pos);
        q.is_prob = true;
        q.prob_remap = global_.attack_prob;
        for (const auto& [id, v] : global_.attack_evidence) q.prob_remap[id] = v ? 1.0 : 0.0;
      } else {
        if (!global_.attack_prob.empty())
          fail(ErrorClass::invalid_query, "probability assumptions need a probabilistic term", s_.payload_pos);
        q.domain = metric_domain_of(e->metric);
        for (const auto& [field, remap] : global_.attr)
          if (field != domain_attr(q.domain))
            fail(ErrorClass::invalid_query,
                 std::string("no metric term reads the ") + std::string(attr_name(field)) + " assumptions",
                 s_.payload_pos);
        auto it = global_.attr.find(domain_attr(q.domain));
        if (it != global_.attr.end()) q.remap = it->second;
        q.evidence = global_.attack_evidence;
      }
      return q;
    }
    (void)census;
    fail(ErrorClass::invalid_query, "compute expects P[...] or a metric term", e->pos);
  }

  DesugaredQuery desugar_check(const Census& census) {
    const bool prob_route = census.prob_term || census.decorated || has_budgets();
    if (prob_route) {
      if (census.metric_term)
        fail(ErrorClass::invalid_query, "metric terms and P[...] cannot mix in one check", s_.payload_pos);
      if (census.fault_ident || census.attack_ident || census.mcs_mps)
        fail(ErrorClass::invalid_query, "boolean atoms cannot appear in a probabilistic query", s_.payload_pos);
      return desugar_prob_check(census);
    }
    if (census.metric_term || census.attack_ident) {
      if (census.fault_ident || census.mcs_mps)
        fail(ErrorClass::invalid_query, "fault-side atoms cannot appear in an attack-side query", s_.payload_pos);
      return desugar_atm_check();
    }
    // Boolean fault-side check.
    require_no_probabilistic_assumptions("a boolean check");
    return BflCheckQuery{wrap_bfl(s_.expr, /*close_with_forall=*/true)};
  }

  const Script& s_;
  const TreeModel& m_;
  RawEnv global_;
  std::vector<std::pair<std::string, RawEnv>> decorator_envs_;
};

}  // namespace

std::string_view engine_name(const DesugaredQuery& q) {
  switch (q.index()) {
    case 0:
    case 1: return "bfl";
    case 2:
    case 3: return "pfl";
    case 4:
    case 5: return "atm";
    default: return "joint";
  }
}

DesugaredQuery desugar(const Script& script, const TreeModel& model) {
  return Desugarer(script, model).run();
}

}  // namespace ftaq
