#include "ftaq/model.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "ftaq/eval.hpp"

namespace ftaq {

std::string_view error_class_name(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::io: return "io";
    case ErrorClass::parse: return "parse";
    case ErrorClass::validation: return "validation";
    case ErrorClass::unknown_element: return "unknown-element";
    case ErrorClass::cross_side: return "cross-side";
    case ErrorClass::missing_attribute: return "missing-attribute";
    case ErrorClass::conditioning_on_null: return "conditioning-on-null";
    case ErrorClass::guard_exceeded: return "guard-exceeded";
    case ErrorClass::invalid_query: return "invalid-query";
  }
  return "unknown";
}

std::string Error::format(ErrorClass cls, const std::string& msg, const std::optional<SourcePos>& pos) {
  std::ostringstream out;
  if (pos && pos->valid()) out << pos->line << ":" << pos->col << ": ";
  out << error_class_name(cls) << ": " << msg;
  return out.str();
}

std::string_view attr_name(AttrField field) {
  switch (field) {
    case AttrField::prob: return "prob";
    case AttrField::cost: return "cost";
    case AttrField::time: return "time";
    case AttrField::skill: return "skill";
  }
  return "?";
}

std::optional<double> LeafAttrs::get(AttrField field) const {
  switch (field) {
    case AttrField::prob: return prob;
    case AttrField::cost: return cost;
    case AttrField::time: return time;
    case AttrField::skill: return skill;
  }
  return std::nullopt;
}

void LeafAttrs::set(AttrField field, double value) {
  switch (field) {
    case AttrField::prob: prob = value; break;
    case AttrField::cost: cost = value; break;
    case AttrField::time: time = value; break;
    case AttrField::skill: skill = value; break;
  }
}

// --------------------------------------------------------------------------
// TreeModel construction

NodeIndex TreeModel::add_leaf(std::string id, NodeKind kind, LeafAttrs attrs) {
  assert(kind != NodeKind::gate);
  Node n;
  n.id = std::move(id);
  n.kind = kind;
  n.attrs = attrs;
  NodeIndex i = static_cast<NodeIndex>(nodes_.size());
  index_.emplace(n.id, i);
  nodes_.push_back(std::move(n));
  return i;
}

NodeIndex TreeModel::add_gate(std::string id, GateOp op, const std::vector<std::string>& children) {
  Node n;
  n.id = std::move(id);
  n.kind = NodeKind::gate;
  n.op = op;
  NodeIndex i = static_cast<NodeIndex>(nodes_.size());
  for (const auto& c : children) pending_children_.emplace_back(n.id, c);
  index_.emplace(n.id, i);
  nodes_.push_back(std::move(n));
  return i;
}

void TreeModel::set_toplevel(const std::string& id) {
  ft_top_ = require(id);
}

void TreeModel::add_attachment(const std::string& source_be, const std::string& target) {
  attachments_.emplace_back(require(source_be), require(target));
}

NodeIndex TreeModel::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? no_node : it->second;
}

NodeIndex TreeModel::require(std::string_view id) const {
  NodeIndex i = find(id);
  if (i == no_node) fail(ErrorClass::unknown_element, "unknown element '" + std::string(id) + "'");
  return i;
}

std::optional<NodeIndex> TreeModel::attachment_target(NodeIndex source) const {
  for (const auto& [src, tgt] : attachments_)
    if (src == source) return tgt;
  return std::nullopt;
}

std::span<const NodeIndex> TreeModel::side_leaves(Side side) const {
  return side == Side::fault ? fault_leaves_ : attack_leaves_;
}

void TreeModel::finalize() {
  // Child references were collected as names so definitions may appear in
  // any order.
  for (const auto& [gate, child] : pending_children_) {
    NodeIndex g = require(gate);
    nodes_[g].children.push_back(require(child));
  }
  pending_children_.clear();

  // Attack side: reachable from any attachment target. Fault side: the rest.
  std::vector<char> attack(nodes_.size(), 0);
  std::vector<NodeIndex> stack;
  for (const auto& [src, tgt] : attachments_) stack.push_back(tgt);
  while (!stack.empty()) {
    NodeIndex i = stack.back();
    stack.pop_back();
    if (attack[i]) continue;
    attack[i] = 1;
    for (NodeIndex c : nodes_[i].children)
      if (!attack[c]) stack.push_back(c);
  }
  for (size_t i = 0; i < nodes_.size(); ++i) nodes_[i].side = attack[i] ? Side::attack : Side::fault;

  std::sort(attachments_.begin(), attachments_.end(), [this](const auto& a, const auto& b) {
    return nodes_[a.first].id < nodes_[b.first].id;
  });

  fault_leaves_.clear();
  attack_leaves_.clear();
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!nodes_[i].is_leaf()) continue;
    (nodes_[i].side == Side::fault ? fault_leaves_ : attack_leaves_).push_back(static_cast<NodeIndex>(i));
  }
  auto by_id = [this](NodeIndex a, NodeIndex b) { return nodes_[a].id < nodes_[b].id; };
  std::sort(fault_leaves_.begin(), fault_leaves_.end(), by_id);
  std::sort(attack_leaves_.begin(), attack_leaves_.end(), by_id);
  finalized_ = true;
}

// --------------------------------------------------------------------------
// Validation

namespace {

// DFS cycle check over child edges; returns ids on some cycle.
std::vector<NodeIndex> nodes_on_cycles(const TreeModel& m) {
  enum { unseen, active, done };
  std::vector<char> state(m.node_count(), unseen);
  std::vector<char> cyclic(m.node_count(), 0);
  // Iterative DFS with an explicit stack of (node, next-child).
  for (NodeIndex root = 0; root < m.node_count(); ++root) {
    if (state[root] != unseen) continue;
    std::vector<std::pair<NodeIndex, size_t>> stack{{root, 0}};
    state[root] = active;
    while (!stack.empty()) {
      auto& [n, next] = stack.back();
      const auto& children = m.node(n).children;
      if (next < children.size()) {
        NodeIndex c = children[next++];
        if (state[c] == unseen) {
          state[c] = active;
          stack.emplace_back(c, 0);
        } else if (state[c] == active) {
          cyclic[c] = 1;  // back edge
        }
      } else {
        state[n] = done;
        stack.pop_back();
      }
    }
  }
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < m.node_count(); ++i)
    if (cyclic[i]) out.push_back(i);
  return out;
}

}  // namespace

ValidationReport validate_model(const TreeModel& m) {
  ValidationReport report;
  auto add = [&](NodeIndex n, std::string rule, std::string detail) {
    report.issues.push_back({m.node(n).id, std::move(rule), std::move(detail)});
  };

  for (NodeIndex i = 0; i < m.node_count(); ++i) {
    const Node& n = m.node(i);
    if (n.is_leaf()) {
      if (!n.children.empty()) add(i, "leaf-has-children", "leaves must not have children");
      if (n.attrs.prob && (*n.attrs.prob < 0.0 || *n.attrs.prob > 1.0))
        add(i, "prob-range", "prob must lie in [0,1]");
      for (AttrField f : {AttrField::cost, AttrField::time, AttrField::skill})
        if (auto v = n.attrs.get(f); v && *v < 0.0)
          add(i, "attr-negative", std::string(attr_name(f)) + " must be nonnegative");
      if (n.kind == NodeKind::basic_event && n.side == Side::attack)
        add(i, "side-mismatch", "basic event reachable from an attack root");
      if (n.kind == NodeKind::attack_step && n.side == Side::fault)
        add(i, "side-mismatch", "attack step not reachable from any attack root");
    } else {
      if (!n.attrs.empty()) add(i, "gate-has-attrs", "gates carry no attributes");
      if (n.children.empty()) add(i, "gate-empty", "gates need at least one child");
      for (NodeIndex c : n.children)
        if (m.node(c).side != n.side) add(i, "side-conflict", "child '" + m.node(c).id + "' is on the other side");
    }
  }

  for (NodeIndex i : nodes_on_cycles(m)) add(i, "cycle", "node lies on a child-edge cycle");

  if (m.ft_top() == no_node) {
    report.issues.push_back({"", "missing-toplevel", "no toplevel declared"});
  } else if (m.node(m.ft_top()).side != Side::fault) {
    add(m.ft_top(), "toplevel-side", "toplevel must be on the fault side");
  }

  std::map<NodeIndex, int> attach_sources;
  for (const auto& [src, tgt] : m.attachments()) {
    if (++attach_sources[src] == 2) add(src, "attachment-duplicate-source", "attached more than once");
    if (m.node(src).kind != NodeKind::basic_event || m.node(src).side != Side::fault)
      add(src, "attachment-source", "attachment source must be a fault-side basic event");
    if (m.node(tgt).side != Side::attack)
      add(tgt, "attachment-target", "attachment target must be on the attack side");
  }
  // Attack roots must not be children of another attack gate.
  for (const auto& [src, tgt] : m.attachments()) {
    for (NodeIndex i = 0; i < m.node_count(); ++i) {
      const Node& n = m.node(i);
      if (!n.is_leaf() && n.side == Side::attack)
        for (NodeIndex c : n.children)
          if (c == tgt) add(tgt, "attachment-target-has-parent", "target is a child of '" + n.id + "'");
    }
  }

  // Reachability: every node must live under the toplevel or an attack root.
  if (m.ft_top() != no_node) {
    std::vector<char> reach(m.node_count(), 0);
    std::vector<NodeIndex> stack{m.ft_top()};
    for (const auto& [src, tgt] : m.attachments()) stack.push_back(tgt);
    while (!stack.empty()) {
      NodeIndex i = stack.back();
      stack.pop_back();
      if (reach[i]) continue;
      reach[i] = 1;
      for (NodeIndex c : m.node(i).children) stack.push_back(c);
    }
    for (NodeIndex i = 0; i < m.node_count(); ++i)
      if (!reach[i]) add(i, "unreachable", "not reachable from the toplevel or any attack root");
  }

  std::sort(report.issues.begin(), report.issues.end(), [](const ValidationIssue& a, const ValidationIssue& b) {
    return a.node != b.node ? a.node < b.node : a.rule < b.rule;
  });
  return report;
}

// --------------------------------------------------------------------------
// Structural queries

namespace {

void check_status_domain(const TreeModel& m, Side side, const StatusVector& status) {
  auto domain = m.side_leaves(side);
  if (status.domain.size() != domain.size() ||
      !std::equal(status.domain.begin(), status.domain.end(), domain.begin()))
    fail(ErrorClass::invalid_query, "status vector is not total over the side's leaf domain");
}

}  // namespace

bool structure_eval(const TreeModel& m, std::string_view element, const StatusVector& status,
                    const EvidenceMap& evidence) {
  NodeIndex target = m.require(element);
  Side side = m.side_of(target);
  check_status_domain(m, side, status);
  ConeProgram prog = ConeProgram::compile(m, target, status.domain, resolve_evidence(m, evidence));
  return prog.eval(status.bits);
}

std::vector<std::string> leaf_descendants(const TreeModel& m, std::string_view element) {
  NodeIndex target = m.require(element);
  std::vector<std::string> out;
  for (NodeIndex leaf : cone_leaves(m, target)) out.push_back(m.node(leaf).id);
  return out;
}

bool structurally_independent(const TreeModel& m, std::string_view e1, std::string_view e2) {
  NodeIndex a = m.require(e1), b = m.require(e2);
  if (m.side_of(a) != m.side_of(b))
    fail(ErrorClass::cross_side, "independence is defined within one side only");
  auto la = cone_leaves(m, a), lb = cone_leaves(m, b);
  std::vector<NodeIndex> shared;
  std::set_intersection(la.begin(), la.end(), lb.begin(), lb.end(), std::back_inserter(shared));
  return shared.empty();
}

TreeModel collapse_node(const TreeModel& m, std::string_view element, const LeafAttrs& attrs) {
  NodeIndex target = m.require(element);
  if (target == m.ft_top()) fail(ErrorClass::invalid_query, "cannot collapse the fault toplevel");

  // Survivors: reachable from the toplevel / attachment targets with the
  // collapsed node treated as a leaf. Attachments whose source dies are
  // dropped, which in turn drops their attack subtree.
  std::vector<char> live(m.node_count(), 0);
  std::vector<NodeIndex> stack{m.ft_top()};
  while (!stack.empty()) {
    NodeIndex i = stack.back();
    stack.pop_back();
    if (live[i]) continue;
    live[i] = 1;
    if (i != target)
      for (NodeIndex c : m.node(i).children) stack.push_back(c);
    if (auto tgt = m.attachment_target(i)) stack.push_back(*tgt);
  }

  TreeModel out;
  out.name = m.name;
  out.annotations = m.annotations;
  for (NodeIndex i = 0; i < m.node_count(); ++i) {
    if (!live[i]) continue;
    const Node& n = m.node(i);
    if (i == target) {
      LeafAttrs merged = n.is_leaf() ? n.attrs : LeafAttrs{};
      for (AttrField f : {AttrField::prob, AttrField::cost, AttrField::time, AttrField::skill})
        if (auto v = attrs.get(f)) merged.set(f, *v);
      out.add_leaf(n.id, n.side == Side::attack ? NodeKind::attack_step : NodeKind::basic_event, merged);
    } else if (n.is_leaf()) {
      out.add_leaf(n.id, n.kind, n.attrs);
    } else {
      std::vector<std::string> children;
      for (NodeIndex c : n.children) children.push_back(m.node(c).id);
      out.add_gate(n.id, n.op, children);
    }
  }
  out.set_toplevel(m.node(m.ft_top()).id);
  for (const auto& [src, tgt] : m.attachments())
    if (live[src] && live[tgt]) out.add_attachment(m.node(src).id, m.node(tgt).id);
  out.finalize();
  return out;
}

std::vector<StatusVector> enumerate_leaf_vectors(const TreeModel& m, const std::vector<std::string>& leaves,
                                                 const EnumLimits& limits) {
  if (leaves.empty()) fail(ErrorClass::invalid_query, "empty leaf list");
  std::vector<NodeIndex> domain;
  for (const auto& id : leaves) {
    NodeIndex i = m.require(id);
    if (!m.node(i).is_leaf()) fail(ErrorClass::invalid_query, "'" + id + "' is not a leaf");
    domain.push_back(i);
  }
  const size_t n = domain.size();
  if (n > 62) fail(ErrorClass::guard_exceeded, "more than 62 leaves cannot be enumerated");
  if (n > static_cast<size_t>(limits.max_leaves))
    fail(ErrorClass::guard_exceeded, "enumeration over " + std::to_string(n) + " leaves exceeds the guard (" +
                                         std::to_string(limits.max_leaves) + ")");

  std::vector<StatusVector> out;
  out.reserve(size_t(1) << n);
  for (uint64_t j = 0; j < (uint64_t(1) << n); ++j) {
    StatusVector v;
    v.domain = domain;
    // Lexicographic: leaves[0] is the most significant bit of j; our masks
    // store domain[i] at bit i.
    for (size_t i = 0; i < n; ++i)
      if ((j >> (n - 1 - i)) & 1u) v.bits |= uint64_t(1) << i;
    out.push_back(std::move(v));
  }
  return out;
}

StatusVector make_status(const TreeModel& m, Side side, const std::map<std::string, int>& bits) {
  StatusVector v;
  auto domain = m.side_leaves(side);
  v.domain.assign(domain.begin(), domain.end());
  for (const auto& [id, bit] : bits) {
    NodeIndex i = m.require(id);
    auto it = std::find(v.domain.begin(), v.domain.end(), i);
    if (it == v.domain.end()) fail(ErrorClass::invalid_query, "'" + id + "' is not a leaf of the requested side");
    if (bit) v.bits |= uint64_t(1) << (it - v.domain.begin());
  }
  return v;
}

std::string to_string(const TreeModel& m, const StatusVector& status) {
  std::string out = "{";
  for (size_t i = 0; i < status.domain.size(); ++i) {
    if (i) out += ", ";
    out += m.node(status.domain[i]).id;
    out += status.at(i) ? "=1" : "=0";
  }
  return out + "}";
}

}  // namespace ftaq
