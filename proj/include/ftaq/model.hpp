#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ftaq/errors.hpp"

namespace ftaq {

using NodeIndex = uint32_t;
inline constexpr NodeIndex no_node = static_cast<NodeIndex>(-1);

enum class NodeKind { basic_event, attack_step, gate };
enum class GateOp { and_gate, or_gate };
enum class Side { fault, attack };

enum class AttrField { prob, cost, time, skill };
std::string_view attr_name(AttrField field);

struct LeafAttrs {
  std::optional<double> prob;
  std::optional<double> cost;
  std::optional<double> time;
  std::optional<double> skill;

  std::optional<double> get(AttrField field) const;
  void set(AttrField field, double value);
  bool empty() const { return !prob && !cost && !time && !skill; }
};

struct Node {
  std::string id;
  NodeKind kind = NodeKind::gate;
  GateOp op = GateOp::or_gate;        // gates only
  std::vector<NodeIndex> children;    // gates only, declaration order
  LeafAttrs attrs;                    // leaves only
  Side side = Side::fault;

  bool is_leaf() const { return kind != NodeKind::gate; }
};

/// Evidence pins model elements (leaves or gates) to a constant 0/1 before
/// structure-function propagation. Keyed by id; std::map keeps reports stable.
using EvidenceMap = std::map<std::string, bool>;

/// A total 0/1 assignment over an ordered leaf domain. Bit i of `bits`
/// corresponds to domain[i]; domains hold at most 62 leaves.
struct StatusVector {
  std::vector<NodeIndex> domain;
  uint64_t bits = 0;

  bool at(size_t pos) const { return (bits >> pos) & 1u; }
  size_t size() const { return domain.size(); }
};

struct ValidationIssue {
  std::string node;
  std::string rule;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

/// The shared world model: one DAG holding the fault tree and any attached
/// attack trees. Immutable once finalized; every engine operates on const
/// references and all operations are pure.
class TreeModel {
 public:
  std::string name;
  std::vector<std::string> annotations;  // `//!` pragmas, e.g. "reconstruction"

  // --- construction (parser / fixtures) ---
  NodeIndex add_leaf(std::string id, NodeKind kind, LeafAttrs attrs = {});
  NodeIndex add_gate(std::string id, GateOp op, const std::vector<std::string>& children);
  void set_toplevel(const std::string& id);
  void add_attachment(const std::string& source_be, const std::string& target);
  /// Resolves child references, assigns sides from reachability and sorts the
  /// per-side leaf domains. Must be called before any query; throws on
  /// dangling references only (validate_model reports everything else).
  void finalize();

  // --- structural accessors ---
  size_t node_count() const { return nodes_.size(); }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  Node& node_mut(NodeIndex i) { return nodes_[i]; }  // construction-time adjustments only
  std::span<const Node> nodes() const { return nodes_; }
  NodeIndex find(std::string_view id) const;
  NodeIndex require(std::string_view id) const;  // throws unknown_element
  NodeIndex ft_top() const { return ft_top_; }
  std::span<const std::pair<NodeIndex, NodeIndex>> attachments() const { return attachments_; }
  std::optional<NodeIndex> attachment_target(NodeIndex source) const;
  bool is_attached(NodeIndex source) const { return attachment_target(source).has_value(); }

  /// Leaf indices of one side, sorted by id. This is the quantification
  /// domain for that side.
  std::span<const NodeIndex> side_leaves(Side side) const;
  Side side_of(NodeIndex i) const { return nodes_[i].side; }

 private:
  friend TreeModel collapse_node(const TreeModel&, std::string_view, const LeafAttrs&);

  std::vector<Node> nodes_;
  std::unordered_map<std::string, NodeIndex> index_;
  NodeIndex ft_top_ = no_node;
  std::vector<std::pair<NodeIndex, NodeIndex>> attachments_;  // sorted by source id
  std::vector<std::pair<std::string, std::string>> pending_children_;  // (gate, child)
  std::vector<NodeIndex> fault_leaves_, attack_leaves_;
  bool finalized_ = false;
};

/// Checks every model invariant and reports all violations sorted by node id.
ValidationReport validate_model(const TreeModel& model);

/// Evaluates the structure function of `element` at `status`, substituting
/// evidence constants before propagation. `status` must be total over the
/// leaf domain of the element's side.
bool structure_eval(const TreeModel& model, std::string_view element, const StatusVector& status,
                    const EvidenceMap& evidence = {});

/// All leaves reachable from `element` (itself if a leaf), sorted by id.
std::vector<std::string> leaf_descendants(const TreeModel& model, std::string_view element);

/// True iff the two elements share no leaf descendant. Both must live on the
/// same side.
bool structurally_independent(const TreeModel& model, std::string_view e1, std::string_view e2);

/// Copy of the model in which `element` is replaced by a leaf carrying
/// `attrs` (merged over existing attrs when `element` already is a leaf);
/// nodes that become unreachable are dropped. Collapsing the fault toplevel
/// is rejected.
TreeModel collapse_node(const TreeModel& model, std::string_view element, const LeafAttrs& attrs);

struct EnumLimits {
  int max_leaves = 24;  // exhaustive guard; hard cap 62 regardless
};

/// All 2^n status vectors over `leaves` in lexicographic order: the first id
/// is the most significant bit, 0 before 1.
std::vector<StatusVector> enumerate_leaf_vectors(const TreeModel& model, const std::vector<std::string>& leaves,
                                                 const EnumLimits& limits = {});

/// Test/CLI helper: builds a total status vector over one side from id→bit.
StatusVector make_status(const TreeModel& model, Side side, const std::map<std::string, int>& bits);

/// Renders a status vector as `{A=1, B=0}` in domain order.
std::string to_string(const TreeModel& model, const StatusVector& status);

}  // namespace ftaq
