#include <doctest.h>

#include <thread>

#include "ftaq/engines.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace ftaq;

TEST_CASE("event_probability on the fixtures") {
  TreeModel m1 = helpers::load_model("m1");
  CHECK(event_probability(m1, bfl::atom("TOP")) == doctest::Approx(0.28).epsilon(1e-12));

  TreeModel m2 = helpers::load_model("m2");
  // The shared leaf B must be read consistently by both branches; a naive
  // bottom-up independence shortcut would report 0.0361 here.
  CHECK(event_probability(m2, bfl::atom("TOP")) == doctest::Approx(0.109).epsilon(1e-12));

  CHECK(event_probability(m1, bfl::atom("TOP"), {{"A", 0.0}}) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("event_probability handles evidence, negation and counting events") {
  TreeModel m2 = helpers::load_model("m2");
  CHECK(event_probability(m2, bfl::with_evidence(bfl::atom("TOP"), {{"G1", true}})) ==
        doctest::Approx(0.19).epsilon(1e-12));
  CHECK(event_probability(m2, bfl::negate(bfl::atom("TOP"))) == doctest::Approx(0.891).epsilon(1e-12));
  double p = event_probability(m2, bfl::at_least(2, {"A", "B", "C"}));
  double expected = 3 * 0.01 * 0.9 + 0.001;  // exactly two failed plus all three
  CHECK(p == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("event_probability errors") {
  TreeModel m1 = helpers::load_model("m1");
  CHECK_THROWS_AS(event_probability(m1, bfl::atom("TOP"), {{"TOP", 0.5}}), Error);  // gate remap rejected
  CHECK_THROWS_AS(event_probability(m1, bfl::atom("TOP"), {{"A", 1.5}}), Error);
  CHECK_THROWS_AS(event_probability(m1, bfl::mcs("TOP")), Error);  // not an event formula
  TreeModel water = helpers::load_model("water");
  try {
    event_probability(water, bfl::atom("MD"));
    FAIL("expected missing attribute");
  } catch (const Error& e) {
    CHECK(e.cls() == ErrorClass::missing_attribute);
    CHECK(e.message().find(".prob") != std::string::npos);
  }
}

TEST_CASE("conditional_probability") {
  TreeModel m1 = helpers::load_model("m1");
  TreeModel m2 = helpers::load_model("m2");
  CHECK(conditional_probability(m1, bfl::atom("TOP"), bfl::atom("A")) == doctest::Approx(1.0));
  CHECK(conditional_probability(m2, bfl::atom("TOP"), bfl::atom("B")) == doctest::Approx(1.0));
  CHECK(conditional_probability(m1, bfl::atom("A"), bfl::atom("TOP")) ==
        doctest::Approx(0.1 / 0.28).epsilon(1e-12));
  try {
    conditional_probability(m1, bfl::atom("TOP"), bfl::atom("A"), {{"A", 0.0}});
    FAIL("expected conditioning-on-null");
  } catch (const Error& e) {
    CHECK(e.cls() == ErrorClass::conditioning_on_null);
  }
}

TEST_CASE("eval_pfl evaluates comparisons with a trace") {
  TreeModel m1 = helpers::load_model("m1");
  PflResult r = eval_pfl(m1, pfl::prob_compare(bfl::atom("TOP"), Cmp::lt, 0.5));
  CHECK(r.holds);
  REQUIRE(r.trace.size() == 1);
  CHECK(r.trace[0].value == doctest::Approx(0.28).epsilon(1e-12));

  PflResult forced = eval_pfl(m1, pfl::prob_compare(bfl::with_evidence(bfl::atom("TOP"), {{"A", true}}),
                                                    Cmp::lt, 0.01));
  CHECK_FALSE(forced.holds);
  CHECK(forced.trace[0].value == doctest::Approx(1.0));

  // Remap form of a certain-failure premise: {A -> 1} forces Pr(TOP) = 1.
  PflResult remapped = eval_pfl(
      m1, pfl::remapped(pfl::implies(pfl::prob_compare(bfl::atom("A"), Cmp::eq, 1.0),
                                     pfl::prob_compare(bfl::atom("TOP"), Cmp::gt, 0.15)),
                        {{"A", 1.0}}));
  CHECK(remapped.holds);
  CHECK(remapped.trace.size() == 2);
}

TEST_CASE("inner remaps win over outer remaps") {
  TreeModel m1 = helpers::load_model("m1");
  PflResult r = eval_pfl(
      m1, pfl::remapped(pfl::remapped(pfl::prob_compare(bfl::atom("A"), Cmp::eq, 0.7), {{"A", 0.7}}), {{"A", 0.3}}));
  CHECK(r.holds);
  CHECK(r.trace[0].value == doctest::Approx(0.7));
}

TEST_CASE("tolerant equality in comparisons") {
  TreeModel m1 = helpers::load_model("m1");
  CHECK(eval_pfl(m1, pfl::prob_compare(bfl::atom("TOP"), Cmp::eq, 0.28)).holds);
  CHECK_FALSE(eval_pfl(m1, pfl::prob_compare(bfl::atom("TOP"), Cmp::eq, 0.2800001)).holds);
}

TEST_CASE("stochastic independence") {
  TreeModel m1 = helpers::load_model("m1");
  TreeModel m2 = helpers::load_model("m2");
  IndependenceResult dep = stochastic_independence(m2, bfl::atom("G1"), bfl::atom("G2"));
  CHECK_FALSE(dep.independent);
  CHECK(dep.p_joint == doctest::Approx(0.109).epsilon(1e-12));
  CHECK(dep.p_first == doctest::Approx(0.19).epsilon(1e-12));
  CHECK(stochastic_independence(m1, bfl::atom("A"), bfl::atom("B")).independent);
  CHECK(stochastic_independence(m2, bfl::atom("A"), bfl::atom("C")).independent);
}

TEST_CASE("normalization: Pr(e) + Pr(not e) = 1") {
  std::mt19937 rng(41);
  for (int i = 0; i < 15; ++i) {
    TreeModel m = oracle::random_model(rng, {.min_leaves = 2, .max_leaves = 10});
    BflPtr top = bfl::atom(m.node(m.ft_top()).id);
    double p = event_probability(m, top);
    double q = event_probability(m, bfl::negate(top));
    CHECK(p + q == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("engine probability equals full enumeration on random models") {
  std::mt19937 rng(42);
  for (int i = 0; i < 30; ++i) {
    TreeModel m = oracle::random_model(rng, {.min_leaves = 2, .max_leaves = 10});
    const std::string top = m.node(m.ft_top()).id;
    double engine = event_probability(m, bfl::atom(top));
    double naive = oracle::naive_element_probability(m, top);
    CHECK(engine == doctest::Approx(naive).epsilon(1e-9));
  }
}

TEST_CASE("raising one leaf probability never lowers the top probability") {
  std::mt19937 rng(43);
  for (int i = 0; i < 10; ++i) {
    TreeModel m = oracle::random_model(rng, {.min_leaves = 2, .max_leaves = 8});
    const std::string top = m.node(m.ft_top()).id;
    double base = event_probability(m, bfl::atom(top));
    for (NodeIndex leaf : m.side_leaves(Side::fault)) {
      const std::string id = m.node(leaf).id;
      double raised = event_probability(m, bfl::atom(top), {{id, 0.99}});
      if (*m.node(leaf).attrs.prob <= 0.99) CHECK(raised >= base - 1e-12);
    }
  }
}

TEST_CASE("structural independence implies stochastic independence") {
  std::mt19937 rng(44);
  for (int i = 0; i < 10; ++i) {
    TreeModel m = oracle::random_model(rng, {.min_leaves = 3, .max_leaves = 8});
    auto leaves = m.side_leaves(Side::fault);
    for (size_t a = 0; a < leaves.size(); ++a)
      for (size_t b = a + 1; b < leaves.size(); ++b) {
        const std::string ia = m.node(leaves[a]).id, ib = m.node(leaves[b]).id;
        if (structurally_independent(m, ia, ib))
          CHECK(stochastic_independence(m, bfl::atom(ia), bfl::atom(ib)).independent);
      }
  }
}

TEST_CASE("concurrent callers over one shared model get identical results") {
  TreeModel m2 = helpers::load_model("m2");
  std::vector<double> results(8, -1.0);
  std::vector<std::thread> workers;
  for (size_t t = 0; t < results.size(); ++t)
    workers.emplace_back([&m2, &results, t] { results[t] = event_probability(m2, bfl::atom("TOP")); });
  for (auto& w : workers) w.join();
  for (double r : results) CHECK(r == results[0]);
}

TEST_CASE("serial and parallel probability paths agree") {
  std::mt19937 rng(45);
  for (int i = 0; i < 10; ++i) {
    TreeModel m = oracle::random_model(rng, {.min_leaves = 4, .max_leaves = 12});
    const std::string top = m.node(m.ft_top()).id;
    EvalOptions serial;
    serial.parallel = false;
    EvalOptions parallel;
    double a = event_probability(m, bfl::atom(top), {}, serial);
    double b = event_probability(m, bfl::atom(top), {}, parallel);
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}
