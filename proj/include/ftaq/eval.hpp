#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ftaq/model.hpp"

namespace ftaq {

/// A structure function compiled to a flat slot program over a leaf domain.
/// Evidence targets become constants at compile time, which cuts their
/// subtrees out of the program. Shared subtrees compile to one slot, so a
/// shared leaf is read consistently by every branch. eval() is thread-safe
/// and allocation-free after warm-up.
class ConeProgram {
 public:
  /// `domain` maps mask bit positions to leaf indices. Every leaf reachable
  /// from `target` (after evidence substitution) must appear in `domain`.
  static ConeProgram compile(const TreeModel& model, NodeIndex target, std::span<const NodeIndex> domain,
                             const std::vector<std::pair<NodeIndex, bool>>& evidence = {});

  bool eval(uint64_t mask) const;

  /// Bitmask of domain positions the program actually reads.
  uint64_t support() const { return support_; }

 private:
  struct Instr {
    enum class Op : uint8_t { constant, leaf, gate_and, gate_or };
    Op op;
    uint32_t arg_begin = 0;  // gates: offset into args_
    uint32_t arg_count = 0;
    uint32_t bit = 0;    // leaf: domain position
    bool value = false;  // constant
  };

  std::vector<Instr> code_;
  std::vector<uint32_t> args_;
  uint64_t support_ = 0;
};

/// Resolves an id-keyed evidence map against a model.
std::vector<std::pair<NodeIndex, bool>> resolve_evidence(const TreeModel& model, const EvidenceMap& evidence);

/// Leaf indices reachable from `target` with evidence nodes treated as
/// constants (their subtrees do not count). Sorted by id.
std::vector<NodeIndex> cone_leaves(const TreeModel& model, NodeIndex target,
                                   const std::vector<std::pair<NodeIndex, bool>>& evidence = {});

/// Position of each `leaves` entry within `domain`; throws on a leaf outside
/// the domain (internal misuse).
uint64_t positions_mask(std::span<const NodeIndex> domain, std::span<const NodeIndex> leaves);

}  // namespace ftaq
