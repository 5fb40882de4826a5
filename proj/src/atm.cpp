#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "ftaq/engines.hpp"
#include "ftaq/eval.hpp"
#include "ftaq/sweep.hpp"

namespace ftaq {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

uint64_t guarded_count(size_t leaves, const EvalOptions& opts) {
  if (leaves > 62) fail(ErrorClass::guard_exceeded, "more than 62 leaves cannot be enumerated");
  if (leaves > static_cast<size_t>(opts.max_leaves))
    fail(ErrorClass::guard_exceeded, "enumeration over " + std::to_string(leaves) + " leaves exceeds the guard (" +
                                         std::to_string(opts.max_leaves) + "); raise --max-leaves to force");
  return uint64_t(1) << leaves;
}

using EvidenceCtx = std::map<NodeIndex, bool>;

EvidenceCtx merge_evidence(const TreeModel& m, EvidenceCtx outer, const EvidenceMap& inner) {
  for (const auto& [id, v] : inner) outer[m.require(id)] = v;
  return outer;
}

std::vector<std::pair<NodeIndex, bool>> to_pairs(const EvidenceCtx& ctx) { return {ctx.begin(), ctx.end()}; }

NodeIndex attack_element(const TreeModel& m, std::string_view id) {
  NodeIndex i = m.require(id);
  if (m.side_of(i) != Side::attack)
    fail(ErrorClass::cross_side, "'" + std::string(id) + "' is not on the attack side");
  return i;
}

/// Splits a remap into gate collapses (applied to a model copy, each gate
/// becoming a priced leaf) and plain leaf overrides. Entries whose target
/// vanished under an earlier collapse are inert.
struct RemappedModel {
  TreeModel collapsed;  // meaningful only when owns
  bool owns = false;
  AttrRemap leaf_remap;

  const TreeModel& model(const TreeModel& original) const { return owns ? collapsed : original; }
};

RemappedModel apply_remap(const TreeModel& m, AttrField field, const AttrRemap& remap) {
  RemappedModel out;
  bool any_gate = false;
  for (const auto& [id, value] : remap) {
    NodeIndex i = m.require(id);  // all targets must exist up front
    if (!m.node(i).is_leaf()) any_gate = true;
    if (field == AttrField::prob && (value < 0.0 || value > 1.0))
      fail(ErrorClass::invalid_query, "probability for '" + id + "' outside [0,1]");
    if (field != AttrField::prob && value < 0.0)
      fail(ErrorClass::invalid_query, "attribute for '" + id + "' must be nonnegative");
  }
  if (any_gate) {
    TreeModel current = m;
    for (const auto& [id, value] : remap) {
      NodeIndex i = current.find(id);
      if (i == no_node) continue;  // removed by an earlier collapse
      if (!current.node(i).is_leaf()) {
        LeafAttrs attrs;
        attrs.set(field, value);
        current = collapse_node(current, id, attrs);
      }
    }
    out.collapsed = std::move(current);
    out.owns = true;
  }
  const TreeModel& final_model = out.model(m);
  for (const auto& [id, value] : remap) {
    NodeIndex i = final_model.find(id);
    if (i != no_node && final_model.node(i).is_leaf()) out.leaf_remap[id] = value;
  }
  return out;
}

double leaf_value(const TreeModel& m, NodeIndex leaf, AttrField field, const AttrRemap& leaf_remap) {
  const Node& n = m.node(leaf);
  auto it = leaf_remap.find(n.id);
  if (it != leaf_remap.end()) return it->second;
  if (auto v = n.attrs.get(field)) return *v;
  fail(ErrorClass::missing_attribute, "attribute missing " + n.id + "." + std::string(attr_name(field)));
}

double fold_steps(MetricDomain domain, double acc, double v) {
  return domain_combines_by_max(domain) ? std::max(acc, v) : acc + v;
}

double metric_value_ev(const TreeModel& m, MetricDomain domain, std::string_view element, const AttrRemap& remap,
                       const EvidenceCtx& evidence, const EvalOptions& opts) {
  RemappedModel rm = apply_remap(m, domain_attr(domain), remap);
  const TreeModel& model = rm.model(m);
  NodeIndex target = attack_element(model, element);
  // Re-resolve evidence ids against the (possibly collapsed) model.
  EvidenceCtx ev;
  for (const auto& [i, v] : evidence) {
    NodeIndex j = model.find(m.node(i).id);
    if (j != no_node) ev[j] = v;
  }
  std::vector<NodeIndex> cone = cone_leaves(model, target, to_pairs(ev));
  const uint64_t total = guarded_count(cone.size(), opts);
  std::vector<double> values;
  values.reserve(cone.size());
  for (NodeIndex leaf : cone) values.push_back(leaf_value(model, leaf, domain_attr(domain), rm.leaf_remap));
  ConeProgram prog = ConeProgram::compile(model, target, cone, to_pairs(ev));

  // Minimizing over every achieving vector equals minimizing over minimal
  // attacks: attributes are nonnegative, so growing an attack never helps.
  auto best = sweep::min_value(
      total, [&](uint64_t mask) { return prog.eval(mask); },
      [&](uint64_t mask) {
        double acc = 0.0;
        for (size_t p = 0; p < values.size(); ++p)
          if ((mask >> p) & 1u) acc = fold_steps(domain, acc, values[p]);
        return acc;
      },
      opts.parallel);
  return best ? *best : inf;
}

double asp_ev(const TreeModel& m, std::string_view element, const AttrRemap& prob_remap,
              const std::optional<StepSet>& strategy, const EvidenceCtx& evidence, const EvalOptions& opts) {
  RemappedModel rm = apply_remap(m, AttrField::prob, prob_remap);
  const TreeModel& model = rm.model(m);
  NodeIndex target = attack_element(model, element);
  if (strategy)
    for (const auto& id : *strategy) {
      NodeIndex i = model.require(id);
      if (!model.node(i).is_leaf() || model.side_of(i) != Side::attack)
        fail(ErrorClass::invalid_query, "strategy member '" + id + "' is not an attack step");
    }
  EvidenceCtx ev;
  for (const auto& [i, v] : evidence) {
    NodeIndex j = model.find(m.node(i).id);
    if (j != no_node) ev[j] = v;
  }
  std::vector<NodeIndex> cone = cone_leaves(model, target, to_pairs(ev));
  const uint64_t total = guarded_count(cone.size(), opts);
  std::vector<double> probs;
  probs.reserve(cone.size());
  for (NodeIndex leaf : cone) {
    if (strategy && !strategy->count(model.node(leaf).id)) {
      probs.push_back(0.0);  // not attempted
    } else {
      probs.push_back(leaf_value(model, leaf, AttrField::prob, rm.leaf_remap));
    }
  }
  ConeProgram prog = ConeProgram::compile(model, target, cone, to_pairs(ev));
  return sweep::sum(
      total,
      [&](uint64_t mask) {
        if (!prog.eval(mask)) return 0.0;
        double w = 1.0;
        for (size_t p = 0; p < probs.size(); ++p) w *= ((mask >> p) & 1u) ? probs[p] : 1.0 - probs[p];
        return w;
      },
      opts.parallel);
}

}  // namespace

std::vector<std::vector<std::string>> minimal_attacks(const TreeModel& m, std::string_view element,
                                                      const EvidenceMap& evidence, const EvalOptions& opts) {
  NodeIndex target = attack_element(m, element);
  auto domain = m.side_leaves(Side::attack);
  const uint64_t total = guarded_count(domain.size(), opts);
  ConeProgram prog = ConeProgram::compile(m, target, domain, resolve_evidence(m, evidence));
  auto masks = sweep::collect(
      total,
      [&](uint64_t mask) {
        if (!prog.eval(mask)) return false;
        for (size_t p = 0; p < domain.size(); ++p)
          if ((mask >> p) & 1u)
            if (prog.eval(mask & ~(uint64_t(1) << p))) return false;
        return true;
      },
      opts.parallel);
  std::vector<std::vector<std::string>> out;
  out.reserve(masks.size());
  for (uint64_t mask : masks) {
    std::vector<std::string> set;
    for (size_t p = 0; p < domain.size(); ++p)
      if ((mask >> p) & 1u) set.push_back(m.node(domain[p]).id);
    out.push_back(std::move(set));
  }
  return out;
}

double metric_value(const TreeModel& m, MetricDomain domain, std::string_view element, const AttrRemap& remap,
                    const EvalOptions& opts) {
  return metric_value_ev(m, domain, element, remap, {}, opts);
}

double metric_value(const TreeModel& m, MetricDomain domain, std::string_view element, const AttrRemap& remap,
                    const EvidenceMap& evidence, const EvalOptions& opts) {
  EvidenceCtx ctx;
  for (const auto& [id, v] : evidence) ctx[m.require(id)] = v;
  return metric_value_ev(m, domain, element, remap, ctx, opts);
}

double attack_success_probability(const TreeModel& m, std::string_view element, const AttrRemap& prob_remap,
                                  const std::optional<StepSet>& strategy, const EvalOptions& opts) {
  return asp_ev(m, element, prob_remap, strategy, {}, opts);
}

double metric_of_attack(const TreeModel& m, MetricDomain domain, const StepSet& steps, const AttrRemap& remap) {
  double acc = 0.0;  // neutral for both sum and max over nonnegative values
  for (const auto& id : steps) {
    NodeIndex i = m.require(id);
    if (!m.node(i).is_leaf() || m.side_of(i) != Side::attack)
      fail(ErrorClass::invalid_query, "'" + id + "' is not an attack step");
    acc = fold_steps(domain, acc, leaf_value(m, i, domain_attr(domain), remap));
  }
  return acc;
}

// --------------------------------------------------------------------------
// Formula evaluation

namespace {

void reject_gate_remap(const TreeModel& m, const AttrRemap& remap, const char* what) {
  for (const auto& [id, v] : remap)
    if (!m.node(m.require(id)).is_leaf())
      fail(ErrorClass::invalid_query,
           std::string("gate remap on '") + id + "' is not supported " + what);
}

/// Attack formula compiled over the full attack-step domain. Metric and
/// probability terms price the bound vector's attempted set.
class CompiledAtm {
 public:
  CompiledAtm(const TreeModel& m, const AtmPtr& f, const EvalOptions& opts) : model_(m), opts_(opts) {
    auto leaves = m.side_leaves(Side::attack);
    domain_.assign(leaves.begin(), leaves.end());
    root_ = build(f, {});
  }

  bool eval(uint64_t mask) const { return eval_node(*root_, mask); }
  std::span<const NodeIndex> domain() const { return domain_; }

 private:
  struct CNode {
    AtmNode::Kind kind;
    ConeProgram prog;
    std::vector<std::unique_ptr<CNode>> kids;
    MetricDomain domain{};
    Cmp cmp{};
    double bound = 0;
    std::vector<double> values;        // metric: per-position attribute value
    std::vector<double> probs;         // prob: per-cone-position probability
    std::vector<NodeIndex> prob_cone;  // prob: cone leaves (positions into it)
    ConeProgram prob_prog;             // prob: program over prob_cone
  };

  std::unique_ptr<CNode> build(const AtmPtr& f, const EvidenceCtx& evidence) {
    if (!f) fail(ErrorClass::invalid_query, "empty formula");
    auto out = std::make_unique<CNode>();
    out->kind = f->kind;
    using K = AtmNode::Kind;
    switch (f->kind) {
      case K::atom:
        out->prog = ConeProgram::compile(model_, attack_element(model_, f->element), domain_, to_pairs(evidence));
        break;
      case K::metric_compare: {
        reject_gate_remap(model_, f->remap, "under a quantifier");
        out->domain = f->domain;
        out->cmp = f->cmp;
        out->bound = f->bound;
        out->prog = ConeProgram::compile(model_, attack_element(model_, f->element), domain_, to_pairs(evidence));
        // Every step could be attempted by some vector, so all of them need
        // the attribute.
        for (NodeIndex leaf : domain_)
          out->values.push_back(leaf_value(model_, leaf, domain_attr(f->domain), f->remap));
        break;
      }
      case K::prob_compare: {
        reject_gate_remap(model_, f->remap, "under a quantifier");
        out->cmp = f->cmp;
        out->bound = f->bound;
        NodeIndex target = attack_element(model_, f->element);
        out->prob_cone = cone_leaves(model_, target, to_pairs(evidence));
        guarded_count(out->prob_cone.size(), opts_);
        for (NodeIndex leaf : out->prob_cone)
          out->probs.push_back(leaf_value(model_, leaf, AttrField::prob, f->remap));
        out->prob_prog = ConeProgram::compile(model_, target, out->prob_cone, to_pairs(evidence));
        break;
      }
      case K::evidence:
        out->kids.push_back(build(f->lhs, merge_evidence(model_, evidence, f->evidence)));
        break;
      case K::exists:
      case K::forall:
        guarded_count(domain_.size(), opts_);
        out->kids.push_back(build(f->lhs, evidence));
        break;
      case K::not_op:
        out->kids.push_back(build(f->lhs, evidence));
        break;
      case K::and_op:
      case K::or_op:
      case K::implies:
        out->kids.push_back(build(f->lhs, evidence));
        out->kids.push_back(build(f->rhs, evidence));
        break;
    }
    return out;
  }

  bool eval_node(const CNode& n, uint64_t mask) const {
    using K = AtmNode::Kind;
    switch (n.kind) {
      case K::atom:
        return n.prog.eval(mask);
      case K::not_op:
        return !eval_node(*n.kids[0], mask);
      case K::and_op:
        return eval_node(*n.kids[0], mask) && eval_node(*n.kids[1], mask);
      case K::or_op:
        return eval_node(*n.kids[0], mask) || eval_node(*n.kids[1], mask);
      case K::implies:
        return !eval_node(*n.kids[0], mask) || eval_node(*n.kids[1], mask);
      case K::evidence:
        return eval_node(*n.kids[0], mask);
      case K::metric_compare: {
        // Priced on the attempted set; the element must be achieved by it.
        if (!n.prog.eval(mask)) return false;
        double acc = 0.0;
        for (size_t p = 0; p < domain_.size(); ++p)
          if ((mask >> p) & 1u) acc = fold_steps(n.domain, acc, n.values[p]);
        return cmp_holds(n.cmp, acc, n.bound, opts_.tolerance);
      }
      case K::prob_compare: {
        // Success probability of the attempted-set strategy.
        double value = 0.0;
        const uint64_t sub_total = uint64_t(1) << n.prob_cone.size();
        for (uint64_t sub = 0; sub < sub_total; ++sub) {
          if (!n.prob_prog.eval(sub)) continue;
          double w = 1.0;
          for (size_t p = 0; p < n.prob_cone.size(); ++p) {
            const bool attempted = attempted_bit(mask, n.prob_cone[p]);
            const double prob = attempted ? n.probs[p] : 0.0;
            w *= ((sub >> p) & 1u) ? prob : 1.0 - prob;
          }
          value += w;
        }
        return cmp_holds(n.cmp, value, n.bound, opts_.tolerance);
      }
      case K::exists:
      case K::forall: {
        const uint64_t total = uint64_t(1) << domain_.size();
        const CNode& body = *n.kids[0];
        auto hit = sweep::find_first(
            total, [&](uint64_t v) { return n.kind == K::exists ? eval_node(body, v) : !eval_node(body, v); },
            opts_.parallel);
        return n.kind == K::exists ? hit.has_value() : !hit.has_value();
      }
    }
    return false;
  }

  bool attempted_bit(uint64_t mask, NodeIndex leaf) const {
    auto it = std::find(domain_.begin(), domain_.end(), leaf);
    return it != domain_.end() && ((mask >> (it - domain_.begin())) & 1u);
  }

  const TreeModel& model_;
  EvalOptions opts_;
  std::vector<NodeIndex> domain_;
  std::unique_ptr<CNode> root_;
};

/// Quantifier-free evaluation: metric/probability terms compare global
/// optima; bare atoms are rejected (they need a quantifier).
bool eval_qf(const TreeModel& m, const AtmPtr& f, const EvidenceCtx& evidence, const EvalOptions& opts,
             AtmVerdict& result) {
  using K = AtmNode::Kind;
  switch (f->kind) {
    case K::metric_compare: {
      double v = metric_value_ev(m, f->domain, f->element, f->remap, evidence, opts);
      bool holds = cmp_holds(f->cmp, v, f->bound, opts.tolerance);
      if (std::isinf(v)) result.unattackable = true;
      ProbeTrace t;
      t.text = std::string(domain_name(f->domain)) + "(" + f->element + ")";
      t.value = v;
      t.has_bound = true;
      t.cmp = f->cmp;
      t.threshold = f->bound;
      t.holds = holds;
      result.trace.push_back(std::move(t));
      return holds;
    }
    case K::prob_compare: {
      double v = asp_ev(m, f->element, f->remap, std::nullopt, evidence, opts);
      bool holds = cmp_holds(f->cmp, v, f->bound, opts.tolerance);
      ProbeTrace t;
      t.text = "prob(" + f->element + ")";
      t.value = v;
      t.has_bound = true;
      t.cmp = f->cmp;
      t.threshold = f->bound;
      t.holds = holds;
      result.trace.push_back(std::move(t));
      return holds;
    }
    case K::not_op: return !eval_qf(m, f->lhs, evidence, opts, result);
    case K::and_op: {
      bool a = eval_qf(m, f->lhs, evidence, opts, result);
      bool b = eval_qf(m, f->rhs, evidence, opts, result);
      return a && b;
    }
    case K::or_op: {
      bool a = eval_qf(m, f->lhs, evidence, opts, result);
      bool b = eval_qf(m, f->rhs, evidence, opts, result);
      return a || b;
    }
    case K::implies: {
      bool a = eval_qf(m, f->lhs, evidence, opts, result);
      bool b = eval_qf(m, f->rhs, evidence, opts, result);
      return !a || b;
    }
    case K::evidence: return eval_qf(m, f->lhs, merge_evidence(m, evidence, f->evidence), opts, result);
    case K::atom: fail(ErrorClass::invalid_query, "a bare attack atom needs a quantifier");
    default: fail(ErrorClass::invalid_query, "quantifier must be outermost in an attack formula");
  }
}

}  // namespace

AtmVerdict eval_atm(const TreeModel& m, const AtmPtr& formula, const EvalOptions& opts) {
  AtmVerdict result;
  if (!formula) fail(ErrorClass::invalid_query, "empty formula");
  if (formula->kind == AtmNode::Kind::exists || formula->kind == AtmNode::Kind::forall) {
    const bool is_exists = formula->kind == AtmNode::Kind::exists;
    CompiledAtm body(m, formula->lhs, opts);
    const uint64_t total = guarded_count(body.domain().size(), opts);
    auto hit = sweep::find_first(
        total, [&](uint64_t v) { return is_exists ? body.eval(v) : !body.eval(v); }, opts.parallel);
    result.holds = is_exists ? hit.has_value() : !hit.has_value();
    if (hit) {
      StatusVector witness;
      witness.domain.assign(body.domain().begin(), body.domain().end());
      witness.bits = *hit;
      result.witness = std::move(witness);
    }
    return result;
  }
  result.holds = eval_qf(m, formula, {}, opts, result);
  return result;
}

}  // namespace ftaq
