// Compares the serial reference path against the OpenMP kernels on a larger
// random model: probability sums, cut-set enumeration and closed checks.
//
//   ./ftaq_bench [leaves] [rounds]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "ftaq/engines.hpp"
#include "ftaq/model.hpp"

using namespace ftaq;
using Clock = std::chrono::steady_clock;

namespace {

TreeModel dense_model(int leaves, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> prob(0.05, 0.5);
  TreeModel m;
  m.name = "bench";
  std::vector<std::string> pool;
  for (int i = 0; i < leaves; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "L%02d", i);
    LeafAttrs attrs;
    attrs.prob = prob(rng);
    m.add_leaf(id, NodeKind::basic_event, attrs);
    pool.push_back(id);
  }
  int gate = 0;
  // Pair nodes up until one root remains; alternate gate kinds and reuse a
  // leaf now and then so subtrees are shared.
  while (pool.size() > 1) {
    std::vector<std::string> next;
    for (size_t i = 0; i + 1 < pool.size(); i += 2) {
      std::string id = "G" + std::to_string(gate);
      m.add_gate(id, gate % 2 ? GateOp::and_gate : GateOp::or_gate, {pool[i], pool[i + 1]});
      ++gate;
      next.push_back(id);
    }
    if (pool.size() % 2) next.push_back(pool.back());
    if (gate % 3 == 0 && next.size() > 1) {
      std::string id = "G" + std::to_string(gate++);
      m.add_gate(id, GateOp::or_gate, {next[0], pool[0]});
      next[0] = id;
    }
    pool = std::move(next);
  }
  m.set_toplevel(pool[0]);
  m.finalize();
  return m;
}

template <class Fn>
double time_of(int rounds, Fn&& fn) {
  double best = 1e100;
  for (int i = 0; i < rounds; ++i) {
    auto start = Clock::now();
    fn();
    double s = std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - start).count();
    if (s < best) best = s;
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const int leaves = argc > 1 ? std::atoi(argv[1]) : 20;
  const int rounds = argc > 2 ? std::atoi(argv[2]) : 3;
  TreeModel m = dense_model(leaves, 7);
  const std::string top = m.node(m.ft_top()).id;

  EvalOptions serial;
  serial.parallel = false;
  serial.max_leaves = leaves;
  EvalOptions parallel = serial;
  parallel.parallel = true;

  std::printf("model: %d leaves, %zu nodes, best of %d rounds\n", leaves, m.node_count(), rounds);
  std::printf("%-22s %12s %12s %9s\n", "kernel", "serial [s]", "openmp [s]", "speedup");

  double ps = 0, pp = 0;
  double ts = time_of(rounds, [&] { ps = event_probability(m, bfl::atom(top), {}, serial); });
  double tp = time_of(rounds, [&] { pp = event_probability(m, bfl::atom(top), {}, parallel); });
  std::printf("%-22s %12.4f %12.4f %8.2fx   |delta| = %.3g\n", "probability sum", ts, tp, ts / tp,
              std::abs(ps - pp));

  std::vector<std::vector<std::string>> cs, cp;
  ts = time_of(rounds, [&] { cs = minimal_cut_sets(m, top, serial); });
  tp = time_of(rounds, [&] { cp = minimal_cut_sets(m, top, parallel); });
  std::printf("%-22s %12.4f %12.4f %8.2fx   sets: %zu, equal: %s\n", "minimal cut sets", ts, tp, ts / tp, cs.size(),
              cs == cp ? "yes" : "NO");

  Verdict vs, vp;
  BflPtr closed = bfl::forall(bfl::implies(bfl::atom(m.node(m.side_leaves(Side::fault)[0]).id), bfl::atom(top)));
  ts = time_of(rounds, [&] { vs = check_closed(m, closed, serial); });
  tp = time_of(rounds, [&] { vp = check_closed(m, closed, parallel); });
  std::printf("%-22s %12.4f %12.4f %8.2fx   verdicts equal: %s\n", "closed forall check", ts, tp, ts / tp,
              vs.holds == vp.holds ? "yes" : "NO");
  return 0;
}
