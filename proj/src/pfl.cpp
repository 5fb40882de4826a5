#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "ftaq/engines.hpp"
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

using EvidenceCtx = std::map<NodeIndex, bool>;

EvidenceCtx merge_evidence(const TreeModel& m, EvidenceCtx outer, const EvidenceMap& inner) {
  for (const auto& [id, v] : inner) outer[m.require(id)] = v;
  return outer;
}

void collect_support(const TreeModel& m, const BflPtr& f, const EvidenceCtx& evidence,
                     std::vector<NodeIndex>& out) {
  if (!f) return;
  using K = BflNode::Kind;
  auto add_cone = [&](const std::string& id) {
    NodeIndex target = m.require(id);
    if (m.side_of(target) != Side::fault) fail(ErrorClass::cross_side, "'" + id + "' is not a fault-side element");
    std::vector<std::pair<NodeIndex, bool>> ev(evidence.begin(), evidence.end());
    for (NodeIndex leaf : cone_leaves(m, target, ev)) out.push_back(leaf);
  };
  switch (f->kind) {
    case K::atom: add_cone(f->element); break;
    case K::at_least:
    case K::at_most:
      for (const auto& id : f->elements) add_cone(id);
      break;
    case K::evidence: collect_support(m, f->lhs, merge_evidence(m, evidence, f->evidence), out); break;
    default:
      collect_support(m, f->lhs, evidence, out);
      collect_support(m, f->rhs, evidence, out);
  }
}

/// Event formula compiled over exactly the leaves it depends on. Events are
/// quantifier-free and Mcs/Mps/Indep-free, so marginalizing the rest of the
/// side away is sound for both satisfaction and probability.
class EventEval {
 public:
  EventEval(const TreeModel& m, const BflPtr& event) : model_(m) {
    if (!is_event_formula(event))
      fail(ErrorClass::invalid_query, "probability events must be quantifier-free and MCS/MPS/indep-free");
    std::vector<NodeIndex> support;
    collect_support(m, event, {}, support);
    std::sort(support.begin(), support.end(),
              [&m](NodeIndex a, NodeIndex b) { return m.node(a).id < m.node(b).id; });
    support.erase(std::unique(support.begin(), support.end()), support.end());
    domain_ = std::move(support);
    root_ = build(event, {});
  }

  std::span<const NodeIndex> domain() const { return domain_; }
  bool eval(uint64_t mask) const { return eval_node(*root_, mask); }

 private:
  struct CNode {
    BflNode::Kind kind;
    ConeProgram prog;
    std::vector<std::unique_ptr<CNode>> kids;
    std::vector<ConeProgram> listed;
    int k = 0;
  };

  std::unique_ptr<CNode> build(const BflPtr& f, const EvidenceCtx& evidence) {
    if (!f) fail(ErrorClass::invalid_query, "empty formula");
    auto out = std::make_unique<CNode>();
    out->kind = f->kind;
    using K = BflNode::Kind;
    std::vector<std::pair<NodeIndex, bool>> ev(evidence.begin(), evidence.end());
    switch (f->kind) {
      case K::atom:
        out->prog = ConeProgram::compile(model_, model_.require(f->element), domain_, ev);
        break;
      case K::at_least:
      case K::at_most:
        if (f->k < 0 || f->k > static_cast<int>(f->elements.size()))
          fail(ErrorClass::invalid_query, "count bound outside the element list");
        out->k = f->k;
        for (const auto& id : f->elements)
          out->listed.push_back(ConeProgram::compile(model_, model_.require(id), domain_, ev));
        break;
      case K::evidence:
        out->kids.push_back(build(f->lhs, merge_evidence(model_, evidence, f->evidence)));
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
      default:
        fail(ErrorClass::invalid_query, "constructor not allowed in an event formula");
    }
    return out;
  }

  bool eval_node(const CNode& n, uint64_t mask) const {
    using K = BflNode::Kind;
    switch (n.kind) {
      case K::atom: return n.prog.eval(mask);
      case K::not_op: return !eval_node(*n.kids[0], mask);
      case K::and_op: return eval_node(*n.kids[0], mask) && eval_node(*n.kids[1], mask);
      case K::or_op: return eval_node(*n.kids[0], mask) || eval_node(*n.kids[1], mask);
      case K::implies: return !eval_node(*n.kids[0], mask) || eval_node(*n.kids[1], mask);
      case K::evidence: return eval_node(*n.kids[0], mask);
      case K::at_least:
      case K::at_most: {
        int count = 0;
        for (const auto& prog : n.listed) count += prog.eval(mask) ? 1 : 0;
        return n.kind == K::at_least ? count >= n.k : count <= n.k;
      }
      default: return false;
    }
  }

  const TreeModel& model_;
  std::vector<NodeIndex> domain_;
  std::unique_ptr<CNode> root_;
};

void check_remap(const TreeModel& m, const ProbRemap& remap) {
  for (const auto& [id, p] : remap) {
    NodeIndex i = m.require(id);
    if (!m.node(i).is_leaf() || m.node(i).side != Side::fault)
      fail(ErrorClass::invalid_query,
           "probability remap target '" + id + "' must be a fault-side basic event");
    if (p < 0.0 || p > 1.0) fail(ErrorClass::invalid_query, "probability for '" + id + "' outside [0,1]");
  }
}

std::vector<double> domain_probs(const TreeModel& m, std::span<const NodeIndex> domain, const ProbRemap& remap) {
  std::vector<double> probs;
  probs.reserve(domain.size());
  for (NodeIndex leaf : domain) {
    const Node& n = m.node(leaf);
    auto it = remap.find(n.id);
    if (it != remap.end()) {
      probs.push_back(it->second);
    } else if (n.attrs.prob) {
      probs.push_back(*n.attrs.prob);
    } else {
      fail(ErrorClass::missing_attribute, "attribute missing " + n.id + ".prob");
    }
  }
  return probs;
}

double probability_of(const TreeModel& m, const BflPtr& event, const ProbRemap& remap, const EvalOptions& opts) {
  EventEval ev(m, event);
  const uint64_t total = guarded_count(ev.domain().size(), opts);
  std::vector<double> probs = domain_probs(m, ev.domain(), remap);
  const size_t n = probs.size();
  return sweep::sum(
      total,
      [&](uint64_t mask) {
        if (!ev.eval(mask)) return 0.0;
        double w = 1.0;
        for (size_t p = 0; p < n; ++p) w *= ((mask >> p) & 1u) ? probs[p] : 1.0 - probs[p];
        return w;
      },
      opts.parallel);
}

}  // namespace

std::vector<NodeIndex> event_support(const TreeModel& m, const BflPtr& event, const EvidenceMap& ambient) {
  std::vector<NodeIndex> support;
  collect_support(m, event, merge_evidence(m, {}, ambient), support);
  std::sort(support.begin(), support.end(), [&m](NodeIndex a, NodeIndex b) { return m.node(a).id < m.node(b).id; });
  support.erase(std::unique(support.begin(), support.end()), support.end());
  return support;
}

double event_probability(const TreeModel& m, const BflPtr& event, const ProbRemap& remap, const EvalOptions& opts) {
  check_remap(m, remap);
  return probability_of(m, event, remap, opts);
}

double conditional_probability(const TreeModel& m, const BflPtr& event, const BflPtr& given, const ProbRemap& remap,
                               const EvalOptions& opts) {
  check_remap(m, remap);
  const double p_given = probability_of(m, given, remap, opts);
  if (p_given == 0.0) fail(ErrorClass::conditioning_on_null, "conditioning event has probability 0");
  const double p_joint = probability_of(m, bfl::conj(event, given), remap, opts);
  return p_joint / p_given;
}

IndependenceResult stochastic_independence(const TreeModel& m, const BflPtr& e1, const BflPtr& e2, double tol,
                                           const EvalOptions& opts) {
  IndependenceResult r;
  r.p_joint = probability_of(m, bfl::conj(e1, e2), {}, opts);
  r.p_first = probability_of(m, e1, {}, opts);
  r.p_second = probability_of(m, e2, {}, opts);
  r.independent = std::abs(r.p_joint - r.p_first * r.p_second) <= tol;
  return r;
}

}  // namespace ftaq
