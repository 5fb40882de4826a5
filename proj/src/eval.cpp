#include "ftaq/eval.hpp"

#include <algorithm>
#include <unordered_map>

namespace ftaq {

std::vector<std::pair<NodeIndex, bool>> resolve_evidence(const TreeModel& m, const EvidenceMap& evidence) {
  std::vector<std::pair<NodeIndex, bool>> out;
  out.reserve(evidence.size());
  for (const auto& [id, value] : evidence) out.emplace_back(m.require(id), value);
  return out;
}

std::vector<NodeIndex> cone_leaves(const TreeModel& m, NodeIndex target,
                                   const std::vector<std::pair<NodeIndex, bool>>& evidence) {
  std::vector<char> pinned(m.node_count(), 0);
  for (const auto& [n, v] : evidence) pinned[n] = 1;

  std::vector<char> seen(m.node_count(), 0);
  std::vector<NodeIndex> stack{target}, out;
  while (!stack.empty()) {
    NodeIndex i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = 1;
    if (pinned[i]) continue;  // constant: subtree does not influence the value
    if (m.node(i).is_leaf()) {
      out.push_back(i);
      continue;
    }
    for (NodeIndex c : m.node(i).children) stack.push_back(c);
  }
  std::sort(out.begin(), out.end(), [&m](NodeIndex a, NodeIndex b) { return m.node(a).id < m.node(b).id; });
  return out;
}

uint64_t positions_mask(std::span<const NodeIndex> domain, std::span<const NodeIndex> leaves) {
  uint64_t mask = 0;
  for (NodeIndex leaf : leaves) {
    auto it = std::find(domain.begin(), domain.end(), leaf);
    if (it == domain.end()) throw std::logic_error("leaf outside enumeration domain");
    mask |= uint64_t(1) << (it - domain.begin());
  }
  return mask;
}

ConeProgram ConeProgram::compile(const TreeModel& m, NodeIndex target, std::span<const NodeIndex> domain,
                                 const std::vector<std::pair<NodeIndex, bool>>& evidence) {
  std::unordered_map<NodeIndex, uint32_t> slot_of;
  std::vector<int> pinned(m.node_count(), -1);
  for (const auto& [n, v] : evidence) pinned[n] = v ? 1 : 0;

  ConeProgram prog;

  // Post-order emission so operands precede their gate. enum state: 0 enter,
  // 1 emit.
  std::vector<std::pair<NodeIndex, int>> stack{{target, 0}};
  std::vector<char> active(m.node_count(), 0);
  while (!stack.empty()) {
    auto [n, phase] = stack.back();
    stack.pop_back();
    if (phase == 0) {
      if (slot_of.count(n)) continue;
      if (active[n]) throw std::logic_error("cycle reached during compilation; validate the model first");
      Instr instr;
      if (pinned[n] >= 0) {
        instr.op = Instr::Op::constant;
        instr.value = pinned[n] == 1;
        slot_of[n] = static_cast<uint32_t>(prog.code_.size());
        prog.code_.push_back(instr);
        continue;
      }
      const Node& node = m.node(n);
      if (node.is_leaf()) {
        auto it = std::find(domain.begin(), domain.end(), n);
        if (it == domain.end()) throw std::logic_error("leaf '" + node.id + "' outside enumeration domain");
        instr.op = Instr::Op::leaf;
        instr.bit = static_cast<uint32_t>(it - domain.begin());
        prog.support_ |= uint64_t(1) << instr.bit;
        slot_of[n] = static_cast<uint32_t>(prog.code_.size());
        prog.code_.push_back(instr);
        continue;
      }
      active[n] = 1;
      stack.emplace_back(n, 1);
      for (NodeIndex c : node.children)
        if (!slot_of.count(c)) stack.emplace_back(c, 0);
    } else {
      active[n] = 0;
      if (slot_of.count(n)) continue;
      const Node& node = m.node(n);
      Instr instr;
      instr.op = node.op == GateOp::and_gate ? Instr::Op::gate_and : Instr::Op::gate_or;
      instr.arg_begin = static_cast<uint32_t>(prog.args_.size());
      instr.arg_count = static_cast<uint32_t>(node.children.size());
      for (NodeIndex c : node.children) prog.args_.push_back(slot_of.at(c));
      slot_of[n] = static_cast<uint32_t>(prog.code_.size());
      prog.code_.push_back(instr);
    }
  }
  return prog;
}

bool ConeProgram::eval(uint64_t mask) const {
  static thread_local std::vector<char> slots;
  if (slots.size() < code_.size()) slots.resize(code_.size());
  for (size_t i = 0; i < code_.size(); ++i) {
    const Instr& instr = code_[i];
    switch (instr.op) {
      case Instr::Op::constant:
        slots[i] = instr.value;
        break;
      case Instr::Op::leaf:
        slots[i] = (mask >> instr.bit) & 1u;
        break;
      case Instr::Op::gate_and: {
        char v = 1;
        for (uint32_t a = 0; a < instr.arg_count; ++a) v &= slots[args_[instr.arg_begin + a]];
        slots[i] = v;
        break;
      }
      case Instr::Op::gate_or: {
        char v = 0;
        for (uint32_t a = 0; a < instr.arg_count; ++a) v |= slots[args_[instr.arg_begin + a]];
        slots[i] = v;
        break;
      }
    }
  }
  return code_.empty() ? false : slots[code_.size() - 1] != 0;
}

}  // namespace ftaq
