#include <algorithm>
#include <map>

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
  for (const auto& [id, v] : inner) outer[m.require(id)] = v;  // inner wins
  return outer;
}

std::vector<std::pair<NodeIndex, bool>> to_pairs(const EvidenceCtx& ctx) {
  return {ctx.begin(), ctx.end()};
}

/// Formula compiled against one side's full leaf domain. Evidence scopes are
/// resolved at compile time; quantified subformulas sweep on demand.
class CompiledBfl {
 public:
  CompiledBfl(const TreeModel& m, Side side, const BflPtr& f, const EvalOptions& opts)
      : model_(m), side_(side), opts_(opts) {
    auto leaves = m.side_leaves(side);
    domain_.assign(leaves.begin(), leaves.end());
    root_ = build(f, {});
  }

  bool eval(uint64_t mask) const { return eval_node(*root_, mask); }
  size_t domain_size() const { return domain_.size(); }
  std::span<const NodeIndex> domain() const { return domain_; }

 private:
  struct CNode {
    BflNode::Kind kind;
    ConeProgram prog;  // atom / mcs / mps element program
    std::vector<std::unique_ptr<CNode>> kids;
    std::vector<ConeProgram> listed;  // at_least / at_most
    int k = 0;
    bool indep_value = false;
  };

  std::unique_ptr<CNode> build(const BflPtr& f, const EvidenceCtx& evidence) {
    if (!f) fail(ErrorClass::invalid_query, "empty formula");
    auto out = std::make_unique<CNode>();
    out->kind = f->kind;
    using K = BflNode::Kind;
    switch (f->kind) {
      case K::atom:
      case K::mcs:
      case K::mps: {
        NodeIndex target = model_.require(f->element);
        if (model_.side_of(target) != side_)
          fail(ErrorClass::cross_side, "'" + f->element + "' is not on the formula's side");
        out->prog = ConeProgram::compile(model_, target, domain_, to_pairs(evidence));
        break;
      }
      case K::indep:
        out->indep_value = structurally_independent(model_, f->element, f->element2);
        break;
      case K::at_least:
      case K::at_most: {
        if (f->k < 0 || f->k > static_cast<int>(f->elements.size()))
          fail(ErrorClass::invalid_query, "count bound outside the element list");
        out->k = f->k;
        for (const auto& id : f->elements) {
          NodeIndex target = model_.require(id);
          if (model_.side_of(target) != side_)
            fail(ErrorClass::cross_side, "'" + id + "' is not on the formula's side");
          out->listed.push_back(ConeProgram::compile(model_, target, domain_, to_pairs(evidence)));
        }
        break;
      }
      case K::evidence:
        out->kids.push_back(build(f->lhs, merge_evidence(model_, evidence, f->evidence)));
        break;
      case K::exists:
      case K::forall:
        guarded_count(domain_.size(), opts_);  // nested sweeps must not throw mid-sweep
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
    using K = BflNode::Kind;
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
      case K::mcs: {
        // Failed set must achieve the element and every failed leaf must be
        // necessary (single flips suffice on a monotone structure function).
        if (!n.prog.eval(mask)) return false;
        for (size_t p = 0; p < domain_.size(); ++p)
          if ((mask >> p) & 1u)
            if (n.prog.eval(mask & ~(uint64_t(1) << p))) return false;
        return true;
      }
      case K::mps: {
        // The marked set is operational, everything else failed; the element
        // must survive and every member must be needed for survival.
        const uint64_t all = domain_.size() == 64 ? ~uint64_t(0) : (uint64_t(1) << domain_.size()) - 1;
        const uint64_t g = all & ~mask;
        if (n.prog.eval(g)) return false;
        for (size_t p = 0; p < domain_.size(); ++p)
          if ((mask >> p) & 1u)
            if (!n.prog.eval(g | (uint64_t(1) << p))) return false;
        return true;
      }
      case K::indep:
        return n.indep_value;
      case K::at_least:
      case K::at_most: {
        int count = 0;
        for (const auto& prog : n.listed) count += prog.eval(mask) ? 1 : 0;
        return n.kind == K::at_least ? count >= n.k : count <= n.k;
      }
      case K::exists:
      case K::forall: {
        // Nested quantifiers rebind the whole vector.
        const uint64_t total = uint64_t(1) << domain_.size();
        const CNode& body = *n.kids[0];
        auto counterexample = sweep::find_first(
            total, [&](uint64_t v) { return n.kind == K::exists ? eval_node(body, v) : !eval_node(body, v); },
            opts_.parallel);
        return n.kind == K::exists ? counterexample.has_value() : !counterexample.has_value();
      }
    }
    return false;
  }

  const TreeModel& model_;
  Side side_;
  EvalOptions opts_;
  std::vector<NodeIndex> domain_;
  std::unique_ptr<CNode> root_;
};

StatusVector status_from_mask(std::span<const NodeIndex> domain, uint64_t mask) {
  StatusVector v;
  v.domain.assign(domain.begin(), domain.end());
  v.bits = mask;
  return v;
}

std::vector<std::vector<std::string>> masks_to_sets(const TreeModel& m, std::span<const NodeIndex> domain,
                                                    const std::vector<uint64_t>& masks) {
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

}  // namespace

bool eval_bfl(const TreeModel& m, const BflPtr& formula, const StatusVector& status, const EvalOptions& opts) {
  CompiledBfl compiled(m, Side::fault, formula, opts);
  if (status.domain.size() != compiled.domain_size() ||
      !std::equal(status.domain.begin(), status.domain.end(), compiled.domain().begin()))
    fail(ErrorClass::invalid_query, "status vector is not total over the fault-side leaf domain");
  return compiled.eval(status.bits);
}

Verdict check_closed(const TreeModel& m, const BflPtr& formula, const EvalOptions& opts) {
  if (!formula ||
      (formula->kind != BflNode::Kind::exists && formula->kind != BflNode::Kind::forall))
    fail(ErrorClass::invalid_query, "closed check requires an outermost exists/forall");
  const bool is_exists = formula->kind == BflNode::Kind::exists;

  CompiledBfl body(m, Side::fault, formula->lhs, opts);
  const uint64_t total = guarded_count(body.domain_size(), opts);
  auto hit = sweep::find_first(
      total, [&](uint64_t v) { return is_exists ? body.eval(v) : !body.eval(v); }, opts.parallel);

  Verdict verdict;
  verdict.holds = is_exists ? hit.has_value() : !hit.has_value();
  if (hit) verdict.witness = status_from_mask(body.domain(), *hit);
  return verdict;
}

std::vector<std::vector<std::string>> all_sat(const TreeModel& m, const BflPtr& formula, const EvalOptions& opts) {
  if (!is_quantifier_free(formula)) fail(ErrorClass::invalid_query, "all_sat requires a quantifier-free formula");
  CompiledBfl compiled(m, Side::fault, formula, opts);
  const uint64_t total = guarded_count(compiled.domain_size(), opts);
  auto masks = sweep::collect(total, [&](uint64_t v) { return compiled.eval(v); }, opts.parallel);
  return masks_to_sets(m, compiled.domain(), masks);
}

std::vector<std::vector<std::string>> minimal_cut_sets(const TreeModel& m, std::string_view element,
                                                       const EvalOptions& opts) {
  return all_sat(m, bfl::mcs(std::string(element)), opts);
}

std::vector<std::vector<std::string>> minimal_path_sets(const TreeModel& m, std::string_view element,
                                                        const EvalOptions& opts) {
  return all_sat(m, bfl::mps(std::string(element)), opts);
}

}  // namespace ftaq
