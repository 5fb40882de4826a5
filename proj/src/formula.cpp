#include "ftaq/formula.hpp"

#include <cmath>
#include <sstream>

namespace ftaq {

std::string_view cmp_text(Cmp cmp) {
  switch (cmp) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::gt: return ">";
    case Cmp::ge: return ">=";
    case Cmp::eq: return "=";
  }
  return "?";
}

bool cmp_holds(Cmp cmp, double value, double bound, double tol) {
  switch (cmp) {
    case Cmp::lt: return value < bound;
    case Cmp::le: return value <= bound;
    case Cmp::gt: return value > bound;
    case Cmp::ge: return value >= bound;
    case Cmp::eq: return std::abs(value - bound) <= tol;
  }
  return false;
}

namespace bfl {

namespace {
BflPtr make(BflNode node) { return std::make_shared<const BflNode>(std::move(node)); }
}  // namespace

BflPtr atom(std::string element) {
  BflNode n;
  n.kind = BflNode::Kind::atom;
  n.element = std::move(element);
  return make(std::move(n));
}
BflPtr negate(BflPtr a) {
  BflNode n;
  n.kind = BflNode::Kind::not_op;
  n.lhs = std::move(a);
  return make(std::move(n));
}
BflPtr conj(BflPtr a, BflPtr b) {
  BflNode n;
  n.kind = BflNode::Kind::and_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
BflPtr disj(BflPtr a, BflPtr b) {
  BflNode n;
  n.kind = BflNode::Kind::or_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
BflPtr implies(BflPtr a, BflPtr b) {
  BflNode n;
  n.kind = BflNode::Kind::implies;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
BflPtr with_evidence(BflPtr body, EvidenceMap evidence) {
  BflNode n;
  n.kind = BflNode::Kind::evidence;
  n.lhs = std::move(body);
  n.evidence = std::move(evidence);
  return make(std::move(n));
}
BflPtr mcs(std::string element) {
  BflNode n;
  n.kind = BflNode::Kind::mcs;
  n.element = std::move(element);
  return make(std::move(n));
}
BflPtr mps(std::string element) {
  BflNode n;
  n.kind = BflNode::Kind::mps;
  n.element = std::move(element);
  return make(std::move(n));
}
BflPtr indep(std::string e1, std::string e2) {
  BflNode n;
  n.kind = BflNode::Kind::indep;
  n.element = std::move(e1);
  n.element2 = std::move(e2);
  return make(std::move(n));
}
BflPtr at_least(int k, std::vector<std::string> elements) {
  BflNode n;
  n.kind = BflNode::Kind::at_least;
  n.k = k;
  n.elements = std::move(elements);
  return make(std::move(n));
}
BflPtr at_most(int k, std::vector<std::string> elements) {
  BflNode n;
  n.kind = BflNode::Kind::at_most;
  n.k = k;
  n.elements = std::move(elements);
  return make(std::move(n));
}
BflPtr exists(BflPtr body) {
  BflNode n;
  n.kind = BflNode::Kind::exists;
  n.lhs = std::move(body);
  return make(std::move(n));
}
BflPtr forall(BflPtr body) {
  BflNode n;
  n.kind = BflNode::Kind::forall;
  n.lhs = std::move(body);
  return make(std::move(n));
}

}  // namespace bfl

bool is_quantifier_free(const BflPtr& f) {
  if (!f) return true;
  switch (f->kind) {
    case BflNode::Kind::exists:
    case BflNode::Kind::forall: return false;
    default: return is_quantifier_free(f->lhs) && is_quantifier_free(f->rhs);
  }
}

bool is_event_formula(const BflPtr& f) {
  if (!f) return true;
  switch (f->kind) {
    case BflNode::Kind::exists:
    case BflNode::Kind::forall:
    case BflNode::Kind::mcs:
    case BflNode::Kind::mps:
    case BflNode::Kind::indep: return false;
    default: return is_event_formula(f->lhs) && is_event_formula(f->rhs);
  }
}

namespace {

std::string evidence_text(const EvidenceMap& e) {
  std::string out = "[";
  bool first = true;
  for (const auto& [id, v] : e) {
    if (!first) out += ", ";
    first = false;
    out += id + " -> " + (v ? "1" : "0");
  }
  return out + "]";
}

}  // namespace

std::string to_string(const BflPtr& f) {
  if (!f) return "";
  using K = BflNode::Kind;
  switch (f->kind) {
    case K::atom: return f->element;
    case K::not_op: return "not(" + to_string(f->lhs) + ")";
    case K::and_op: return "(" + to_string(f->lhs) + " and " + to_string(f->rhs) + ")";
    case K::or_op: return "(" + to_string(f->lhs) + " or " + to_string(f->rhs) + ")";
    case K::implies: return "(" + to_string(f->lhs) + " => " + to_string(f->rhs) + ")";
    case K::evidence: return to_string(f->lhs) + evidence_text(f->evidence);
    case K::mcs: return "MCS[" + f->element + "]";
    case K::mps: return "MPS[" + f->element + "]";
    case K::indep: return "indep(" + f->element + ", " + f->element2 + ")";
    case K::at_least:
    case K::at_most: {
      std::ostringstream out;
      out << (f->kind == K::at_least ? "atleast(" : "atmost(") << f->k;
      for (const auto& e : f->elements) out << ", " << e;
      out << ")";
      return out.str();
    }
    case K::exists: return "exists " + to_string(f->lhs);
    case K::forall: return "forall " + to_string(f->lhs);
  }
  return "";
}

namespace pfl {

namespace {
PflPtr make(PflNode node) { return std::make_shared<const PflNode>(std::move(node)); }
}  // namespace

PflPtr prob_compare(BflPtr event, Cmp cmp, double threshold, BflPtr cond, std::vector<std::string> resolve) {
  PflNode n;
  n.kind = PflNode::Kind::prob_compare;
  n.event = std::move(event);
  n.cond = std::move(cond);
  n.cmp = cmp;
  n.threshold = threshold;
  n.resolve = std::move(resolve);
  return make(std::move(n));
}
PflPtr negate(PflPtr a) {
  PflNode n;
  n.kind = PflNode::Kind::not_op;
  n.lhs = std::move(a);
  return make(std::move(n));
}
PflPtr conj(PflPtr a, PflPtr b) {
  PflNode n;
  n.kind = PflNode::Kind::and_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
PflPtr disj(PflPtr a, PflPtr b) {
  PflNode n;
  n.kind = PflNode::Kind::or_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
PflPtr implies(PflPtr a, PflPtr b) {
  PflNode n;
  n.kind = PflNode::Kind::implies;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
PflPtr remapped(PflPtr body, ProbRemap remap) {
  PflNode n;
  n.kind = PflNode::Kind::remapped;
  n.lhs = std::move(body);
  n.remap = std::move(remap);
  return make(std::move(n));
}
PflPtr scoped(PflPtr node, std::string decorator) {
  PflNode n = *node;
  n.scope = std::move(decorator);
  return make(std::move(n));
}

}  // namespace pfl

std::string to_string(const PflPtr& f) {
  if (!f) return "";
  using K = PflNode::Kind;
  std::string prefix = f->scope.empty() ? "" : "@" + f->scope + " ";
  switch (f->kind) {
    case K::prob_compare: {
      std::ostringstream out;
      out << prefix << "P[" << to_string(f->event);
      if (f->cond) out << " | " << to_string(f->cond);
      out << "] " << cmp_text(f->cmp) << " " << f->threshold;
      return out.str();
    }
    case K::not_op: return prefix + "not(" + to_string(f->lhs) + ")";
    case K::and_op: return prefix + "(" + to_string(f->lhs) + " and " + to_string(f->rhs) + ")";
    case K::or_op: return prefix + "(" + to_string(f->lhs) + " or " + to_string(f->rhs) + ")";
    case K::implies: return prefix + "(" + to_string(f->lhs) + " => " + to_string(f->rhs) + ")";
    case K::remapped: return prefix + to_string(f->lhs) + " (remapped)";
  }
  return "";
}

std::string_view domain_name(MetricDomain d) {
  switch (d) {
    case MetricDomain::cost: return "cost";
    case MetricDomain::partime: return "partime";
    case MetricDomain::seqtime: return "seqtime";
    case MetricDomain::skill: return "skill";
  }
  return "?";
}

std::optional<MetricDomain> domain_from_name(std::string_view name) {
  if (name == "cost") return MetricDomain::cost;
  if (name == "partime") return MetricDomain::partime;
  if (name == "seqtime") return MetricDomain::seqtime;
  if (name == "skill") return MetricDomain::skill;
  return std::nullopt;
}

AttrField domain_attr(MetricDomain d) {
  switch (d) {
    case MetricDomain::cost: return AttrField::cost;
    case MetricDomain::partime:
    case MetricDomain::seqtime: return AttrField::time;
    case MetricDomain::skill: return AttrField::skill;
  }
  return AttrField::cost;
}

bool domain_combines_by_max(MetricDomain d) {
  return d == MetricDomain::partime || d == MetricDomain::skill;
}

namespace atm {

namespace {
AtmPtr make(AtmNode node) { return std::make_shared<const AtmNode>(std::move(node)); }
}  // namespace

AtmPtr atom(std::string element) {
  AtmNode n;
  n.kind = AtmNode::Kind::atom;
  n.element = std::move(element);
  return make(std::move(n));
}
AtmPtr negate(AtmPtr a) {
  AtmNode n;
  n.kind = AtmNode::Kind::not_op;
  n.lhs = std::move(a);
  return make(std::move(n));
}
AtmPtr conj(AtmPtr a, AtmPtr b) {
  AtmNode n;
  n.kind = AtmNode::Kind::and_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
AtmPtr disj(AtmPtr a, AtmPtr b) {
  AtmNode n;
  n.kind = AtmNode::Kind::or_op;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
AtmPtr implies(AtmPtr a, AtmPtr b) {
  AtmNode n;
  n.kind = AtmNode::Kind::implies;
  n.lhs = std::move(a);
  n.rhs = std::move(b);
  return make(std::move(n));
}
AtmPtr with_evidence(AtmPtr body, EvidenceMap evidence) {
  AtmNode n;
  n.kind = AtmNode::Kind::evidence;
  n.lhs = std::move(body);
  n.evidence = std::move(evidence);
  return make(std::move(n));
}
AtmPtr metric_compare(MetricDomain domain, std::string element, Cmp cmp, double bound, AttrRemap remap) {
  AtmNode n;
  n.kind = AtmNode::Kind::metric_compare;
  n.domain = domain;
  n.element = std::move(element);
  n.cmp = cmp;
  n.bound = bound;
  n.remap = std::move(remap);
  return make(std::move(n));
}
AtmPtr prob_compare(std::string element, Cmp cmp, double bound, AttrRemap remap) {
  AtmNode n;
  n.kind = AtmNode::Kind::prob_compare;
  n.element = std::move(element);
  n.cmp = cmp;
  n.bound = bound;
  n.remap = std::move(remap);
  return make(std::move(n));
}
AtmPtr exists(AtmPtr body) {
  AtmNode n;
  n.kind = AtmNode::Kind::exists;
  n.lhs = std::move(body);
  return make(std::move(n));
}
AtmPtr forall(AtmPtr body) {
  AtmNode n;
  n.kind = AtmNode::Kind::forall;
  n.lhs = std::move(body);
  return make(std::move(n));
}

}  // namespace atm

std::string to_string(const AtmPtr& f) {
  if (!f) return "";
  using K = AtmNode::Kind;
  switch (f->kind) {
    case K::atom: return f->element;
    case K::not_op: return "not(" + to_string(f->lhs) + ")";
    case K::and_op: return "(" + to_string(f->lhs) + " and " + to_string(f->rhs) + ")";
    case K::or_op: return "(" + to_string(f->lhs) + " or " + to_string(f->rhs) + ")";
    case K::implies: return "(" + to_string(f->lhs) + " => " + to_string(f->rhs) + ")";
    case K::evidence: return to_string(f->lhs) + evidence_text(f->evidence);
    case K::metric_compare: {
      std::ostringstream out;
      out << domain_name(f->domain) << "(" << f->element << ") " << cmp_text(f->cmp) << " " << f->bound;
      return out.str();
    }
    case K::prob_compare: {
      std::ostringstream out;
      out << "prob(" << f->element << ") " << cmp_text(f->cmp) << " " << f->bound;
      return out.str();
    }
    case K::exists: return "exists " + to_string(f->lhs);
    case K::forall: return "forall " + to_string(f->lhs);
  }
  return "";
}

}  // namespace ftaq
