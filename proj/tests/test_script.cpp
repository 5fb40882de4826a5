#include <doctest.h>

#include "ftaq/report.hpp"
#include "helpers.hpp"

using namespace ftaq;

namespace {

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name || a->name2 != b->name2) return false;
  if (a->has_cmp != b->has_cmp) return false;
  if (a->has_cmp && (a->cmp != b->cmp || a->bound != b->bound)) return false;
  if (a->kind == Expr::Kind::metric_term && a->metric != b->metric) return false;
  return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
}

bool stmt_equal(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind || a.id != b.id || a.value != b.value) return false;
  if (a.kind == Stmt::Kind::set_metric &&
      (a.is_budget != b.is_budget || a.field != b.field || a.budget_domain != b.budget_domain))
    return false;
  if (a.kind == Stmt::Kind::bare) return expr_equal(a.expr, b.expr);
  return true;
}

bool script_equal(const Script& a, const Script& b) {
  if (a.payload != b.payload || a.assume.size() != b.assume.size() || a.decorators.size() != b.decorators.size())
    return false;
  for (size_t i = 0; i < a.assume.size(); ++i)
    if (!stmt_equal(a.assume[i], b.assume[i])) return false;
  for (size_t i = 0; i < a.decorators.size(); ++i) {
    if (a.decorators[i].name != b.decorators[i].name) return false;
    if (a.decorators[i].stmts.size() != b.decorators[i].stmts.size()) return false;
    for (size_t s = 0; s < a.decorators[i].stmts.size(); ++s)
      if (!stmt_equal(a.decorators[i].stmts[s], b.decorators[i].stmts[s])) return false;
  }
  return expr_equal(a.expr, b.expr);
}

std::vector<std::string> all_bundled_scripts() {
  std::vector<std::string> out;
  for (const char* name : {"q07", "q08", "q09", "q10", "q11", "q12", "q13", "q14", "q15", "q16", "q17", "q18",
                           "q20", "q22", "q24", "q26"})
    out.push_back(std::string("paper/") + name + ".lpfl");
  for (const char* name : {"a07", "a08", "a09", "a10", "a11", "a12", "a13", "a14", "a15", "a16", "a17", "a18",
                           "a20", "a22", "a24", "a26"})
    out.push_back(std::string("analog/") + name + ".lpfl");
  return out;
}

QueryRecord run_script(const TreeModel& m, const std::string& rel) {
  Script script = helpers::load_script(rel);
  return run_query(m, desugar(script, m), {});
}

}  // namespace

TEST_CASE("parse_script: structure of the evidence/check template") {
  Script s = helpers::load_script("paper/q08.lpfl");
  REQUIRE(s.assume.size() == 2);
  CHECK(s.assume[0].kind == Stmt::Kind::set_bool);
  CHECK(s.assume[0].id == "DBP");
  CHECK(s.assume[0].value == 1.0);
  CHECK(s.assume[1].id == "CRD");
  CHECK(s.payload == PayloadKind::check);
  REQUIRE(s.expr->kind == Expr::Kind::exists);
  CHECK(s.expr->a->kind == Expr::Kind::mps);
  CHECK(s.expr->a->name == "Dr");
}

TEST_CASE("parse_script: compute template with a probability assumption") {
  Script s = helpers::load_script("paper/q11.lpfl");
  REQUIRE(s.assume.size() == 1);
  CHECK(s.assume[0].kind == Stmt::Kind::set_prob);
  CHECK(s.assume[0].id == "OM");
  CHECK(s.assume[0].value == 0.15);
  CHECK(s.payload == PayloadKind::compute);
  CHECK(s.expr->kind == Expr::Kind::prob_term);
  CHECK(s.expr->name == "Dr");
  CHECK_FALSE(s.expr->has_cmp);
}

TEST_CASE("parse_script: decorators and budgets") {
  Script s = helpers::load_script("paper/q26.lpfl");
  REQUIRE(s.decorators.size() == 2);
  CHECK(s.decorators[0].name == "A1");
  REQUIRE(s.decorators[0].stmts.size() == 1);
  CHECK(s.decorators[0].stmts[0].kind == Stmt::Kind::set_metric);
  CHECK(s.decorators[0].stmts[0].is_budget);
  CHECK(s.decorators[0].stmts[0].budget_domain == MetricDomain::cost);
  REQUIRE(s.expr->kind == Expr::Kind::exists);
  CHECK(s.expr->a->kind == Expr::Kind::and_op);
  CHECK(s.expr->a->a->kind == Expr::Kind::decorated);
  CHECK(s.expr->a->a->name == "A1");
}

TEST_CASE("parse_script: setp is an alias of set_prob") {
  Script a = parse_script("assume:\n  setp X = 0.4\ncheck:\n  P[X] < 1\n");
  Script b = parse_script("assume:\n  set_prob X = 0.4\ncheck:\n  P[X] < 1\n");
  CHECK(script_equal(a, b));
}

TEST_CASE("parse_script: duplicate sections are rejected with positions") {
  struct Case {
    const char* file;
    int line, col;
  };
  const Case cases[] = {
      {"malformed/m01_bad_section.lpfl", 1, 1},   {"malformed/m02_dup_check.lpfl", 4, 1},
      {"malformed/m03_missing_payload.lpfl", 3, 1}, {"malformed/m04_bad_float.lpfl", 2, 16},
      {"malformed/m05_prob_range.lpfl", 2, 16},   {"malformed/m06_unclosed_paren.lpfl", 4, 1},
      {"malformed/m07_missing_bracket.lpfl", 4, 1}, {"malformed/m08_bad_cmp.lpfl", 3, 11},
      {"malformed/m09_set_bad_value.lpfl", 2, 11}, {"malformed/m10_dup_decorator.lpfl", 4, 3},
      {"malformed/m11_stray_token.lpfl", 3, 5},   {"malformed/m12_empty.lpfl", 1, 1},
      {"malformed/m13_missing_eq.lpfl", 2, 9},
  };
  for (const Case& c : cases) {
    try {
      helpers::load_script(c.file);
      FAIL("expected a parse error for ", c.file);
    } catch (const Error& e) {
      CHECK(e.cls() == ErrorClass::parse);
      REQUIRE(e.pos().has_value());
      CHECK(e.pos()->line == c.line);
      CHECK(e.pos()->col == c.col);
    }
  }
}

TEST_CASE("pretty_print: canonical golden for the probability-evidence template") {
  Script s = helpers::load_script("paper/q10.lpfl");
  CHECK(pretty_print(s) ==
        "assume:\n"
        "  set_prob Pat = 1\n"
        "check:\n"
        "  P[WQF] < 0.01\n");
}

TEST_CASE("pretty_print: parse round-trip is a structural fixed point") {
  for (const auto& rel : all_bundled_scripts()) {
    Script s = helpers::load_script(rel);
    std::string printed = pretty_print(s);
    Script back = parse_script(printed, rel);
    CHECK_MESSAGE(script_equal(s, back), "round-trip mismatch for ", rel);
    CHECK(pretty_print(back) == printed);
  }
}

TEST_CASE("desugar: evidence-wrapped universal check matches the displayed formula") {
  TreeModel water = helpers::load_model("water");
  Script s = helpers::load_script("paper/q09.lpfl");
  auto q = desugar(s, water);
  REQUIRE(std::holds_alternative<BflCheckQuery>(q));
  const BflPtr& f = std::get<BflCheckQuery>(q).formula;
  REQUIRE(f->kind == BflNode::Kind::forall);
  REQUIRE(f->lhs->kind == BflNode::Kind::evidence);
  CHECK(f->lhs->evidence == EvidenceMap{{"BPG", true}, {"LP", true}});
  CHECK(f->lhs->lhs->kind == BflNode::Kind::atom);
  CHECK(f->lhs->lhs->element == "WQF");
}

TEST_CASE("desugar: budget scripts force the existential joint engine") {
  TreeModel jm = helpers::load_model("jm");
  Script s = helpers::load_script("analog/a24.lpfl");
  auto q = desugar(s, jm);
  REQUIRE(std::holds_alternative<JointQuery>(q));
  const JointQuery& jq = std::get<JointQuery>(q);
  CHECK(jq.existential);
  REQUIRE(jq.env_global.budgets.size() == 1);
  CHECK(jq.env_global.budgets[0].element == "R");
  CHECK(jq.env_global.budgets[0].cmp == Cmp::le);
  CHECK(jq.env_global.budgets[0].bound == 13.0);
  REQUIRE(jq.body->kind == PflNode::Kind::prob_compare);
  CHECK(jq.body->resolve == std::vector<std::string>{"K"});
}

TEST_CASE("desugar: remap-style certain-failure premises") {
  TreeModel m1 = helpers::load_model("m1");
  Script s = helpers::load_script("analog/a12.lpfl");
  auto q = desugar(s, m1);
  REQUIRE(std::holds_alternative<PflCheckQuery>(q));
  const PflPtr& f = std::get<PflCheckQuery>(q).formula;
  REQUIRE(f->kind == PflNode::Kind::remapped);
  CHECK(f->remap == ProbRemap{{"A", 1.0}, {"B", 1.0}});
}

TEST_CASE("desugar: set_prob on a gate becomes evidence, fractional gate values error") {
  TreeModel m2 = helpers::load_model("m2");
  auto q = desugar(parse_script("assume:\n  set_prob G1 = 1\ncheck:\n  P[TOP] < 0.01\n"), m2);
  REQUIRE(std::holds_alternative<PflCheckQuery>(q));
  const PflPtr& f = std::get<PflCheckQuery>(q).formula;
  REQUIRE(f->kind == PflNode::Kind::prob_compare);
  REQUIRE(f->event->kind == BflNode::Kind::evidence);
  CHECK(f->event->evidence == EvidenceMap{{"G1", true}});

  CHECK_THROWS_AS(desugar(parse_script("assume:\n  set_prob G1 = 0.5\ncheck:\n  P[TOP] < 0.01\n"), m2), Error);
}

TEST_CASE("desugar: attack-side gate probability collapses instead of erroring") {
  TreeModel water = helpers::load_model("water");
  auto q = desugar(parse_script("assume:\n  set_prob BUA = 0.12\ncheck:\n  P[WQF] < 0.5\n"), water);
  REQUIRE(std::holds_alternative<JointQuery>(q));
  CHECK(std::get<JointQuery>(q).env_global.attack_prob_remap == AttrRemap{{"BUA", 0.12}});
}

TEST_CASE("desugar: positioned errors") {
  TreeModel m1 = helpers::load_model("m1");
  TreeModel jm = helpers::load_model("jm");
  struct Case {
    const TreeModel* m;
    const char* text;
  };
  const Case cases[] = {
      {&m1, "assume:\ncheck:\n  forall NOPE\n"},                     // unknown id
      {&m1, "assume:\n  set_cost A = 3\ncheck:\n  forall TOP\n"},    // metric on fault side
      {&m1, "assume:\ncheck:\n  @A9(P[TOP] < 1)\n"},                 // undeclared decorator
      {&jm, "assume:\ncheck:\n  P[TOP] < 0.5 and TOP\n"},            // mixed atoms
      {&jm, "assume:\ncheck:\n  Cost[R] < 5 and P[TOP] < 0.5\n"},    // metric and probability mix
      {&m1, "assume:\ncompute:\n  P[TOP] < 0.5\n"},                  // compute with comparison
      {&m1, "assume:\n  A\ncomputeall:\n  MCS[TOP]\n"},              // bare assumption with computeall
      // Resolution totality: assumptions that nothing reads are errors.
      {&jm, "assume:\n  set_prob a = 0.3\ncheck:\n  Cost[R] < 14\n"},
      {&jm, "assume:\n  set_cost b = 5\ncheck:\n  P[TOP] < 0.5\n"},
      {&jm, "assume:\n  set_skill a = 5\ncheck:\n  Cost[R] < 14\n"},
      {&jm, "assume:\n  set_cost R <= 13\ncompute:\n  P[TOP]\n"},
  };
  for (const Case& c : cases) {
    try {
      desugar(parse_script(c.text), *c.m);
      FAIL("expected a desugar error for: ", c.text);
    } catch (const Error& e) {
      CHECK(e.pos().has_value());
    }
  }
}

// ---------------------------------------------------------------------------
// Golden desugaring: each script template evaluates exactly like the displayed
// formula it renders, on the bundled fixtures.

TEST_CASE("golden pair: filtered cut-set listing (computeall)") {
  TreeModel m2 = helpers::load_model("m2");
  QueryRecord rec = run_script(m2, "analog/a07.lpfl");
  auto reference = all_sat(m2, bfl::conj(bfl::mcs("TOP"), bfl::atom("A")));
  CHECK(rec.result == sets_json(reference));
  CHECK(reference == std::vector<std::vector<std::string>>{{"A", "C"}});
}

TEST_CASE("golden pair: evidence + existential path sets") {
  TreeModel m2 = helpers::load_model("m2");
  QueryRecord rec = run_script(m2, "analog/a08.lpfl");
  Verdict direct = check_closed(m2, bfl::exists(bfl::with_evidence(bfl::mps("TOP"), {{"A", true}})));
  CHECK(rec.result == json(direct.holds));
  REQUIRE(direct.witness.has_value());
  CHECK(rec.witness == witness_json(m2, *direct.witness));
}

TEST_CASE("golden pair: evidence + universal sufficiency") {
  TreeModel m2 = helpers::load_model("m2");
  QueryRecord rec = run_script(m2, "analog/a09.lpfl");
  Verdict substitution = check_closed(m2, bfl::forall(bfl::with_evidence(bfl::atom("TOP"), {{"A", true}, {"C", true}})));
  Verdict antecedent =
      check_closed(m2, bfl::forall(bfl::implies(bfl::conj(bfl::atom("A"), bfl::atom("C")), bfl::atom("TOP"))));
  CHECK(rec.result == json(substitution.holds));
  CHECK(substitution.holds == antecedent.holds);
}

TEST_CASE("golden pair: probability threshold under gate evidence") {
  TreeModel m2 = helpers::load_model("m2");
  QueryRecord rec = run_script(m2, "analog/a10.lpfl");
  PflResult direct =
      eval_pfl(m2, pfl::prob_compare(bfl::with_evidence(bfl::atom("TOP"), {{"G1", true}}), Cmp::lt, 0.01));
  CHECK(rec.result == json(direct.holds));
  CHECK(rec.trace[0]["value"].get<double>() == doctest::Approx(direct.trace[0].value).epsilon(1e-12));
  CHECK(direct.trace[0].value == doctest::Approx(0.19).epsilon(1e-12));
}

TEST_CASE("golden pair: probability computation under a remap") {
  TreeModel m1 = helpers::load_model("m1");
  QueryRecord rec = run_script(m1, "analog/a11.lpfl");
  double direct = event_probability(m1, bfl::atom("TOP"), {{"A", 0.5}});
  CHECK(rec.result.get<double>() == doctest::Approx(direct).epsilon(1e-12));
  CHECK(direct == doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("golden pair: certain-failure premises via remap") {
  TreeModel m1 = helpers::load_model("m1");
  QueryRecord rec = run_script(m1, "analog/a12.lpfl");
  PflResult direct =
      eval_pfl(m1, pfl::remapped(pfl::prob_compare(bfl::atom("TOP"), Cmp::gt, 0.015), {{"A", 1.0}, {"B", 1.0}}));
  CHECK(rec.result == json(direct.holds));
  CHECK(direct.holds);
}

TEST_CASE("golden pair: metric bounds") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a13.lpfl");
  AtmVerdict direct = eval_atm(m3, atm::conj(atm::metric_compare(MetricDomain::cost, "R", Cmp::lt, 14),
                                             atm::metric_compare(MetricDomain::cost, "G", Cmp::le, 3)));
  CHECK(rec.result == json(direct.holds));
  CHECK(direct.holds);
}

TEST_CASE("golden pair: existential attack under evidence") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a14.lpfl");
  AtmVerdict direct = eval_atm(m3, atm::exists(atm::with_evidence(atm::atom("R"), {{"c", false}})));
  CHECK(rec.result == json(direct.holds));
  CHECK(rec.witness == witness_json(m3, *direct.witness));
}

TEST_CASE("golden pair: necessity") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a15.lpfl");
  AtmVerdict direct = eval_atm(m3, atm::forall(atm::implies(atm::atom("R"), atm::atom("a"))));
  CHECK(rec.result == json(direct.holds));
  CHECK(direct.holds);
}

TEST_CASE("golden pair: probability and parallel-time bounds") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a16.lpfl");
  AtmVerdict direct = eval_atm(m3, atm::conj(atm::prob_compare("R", Cmp::lt, 0.4),
                                             atm::metric_compare(MetricDomain::partime, "R", Cmp::lt, 5)));
  CHECK(rec.result == json(direct.holds));
  CHECK(direct.holds);
}

TEST_CASE("golden pair: existential cost bound") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a17.lpfl");
  AtmVerdict direct = eval_atm(m3, atm::exists(atm::metric_compare(MetricDomain::cost, "R", Cmp::lt, 12)));
  CHECK(rec.result == json(direct.holds));
  CHECK_FALSE(direct.holds);
}

TEST_CASE("golden pair: metric computation under a priced-gate remap") {
  TreeModel m3 = helpers::load_model("m3");
  QueryRecord rec = run_script(m3, "analog/a18.lpfl");
  double direct = metric_value(m3, MetricDomain::cost, "R", {{"G", 40.0}});
  CHECK(rec.result.get<double>() == doctest::Approx(direct).epsilon(1e-12));
  CHECK(direct == 50.0);
}

TEST_CASE("golden pair: joint thresholds with attack-side probabilities") {
  TreeModel jm = helpers::load_model("jm");
  QueryRecord rec = run_script(jm, "analog/a20.lpfl");

  AssumptionEnv env;
  env.attack_prob_remap = {{"b", 0.2}, {"c", 0.1}};
  JointQuery direct;
  direct.body = pfl::conj(pfl::prob_compare(bfl::atom("TOP"), Cmp::lt, 0.010, nullptr, {"K"}),
                          pfl::prob_compare(bfl::atom("K"), Cmp::lt, 0.005, nullptr, {"K"}));
  direct.env_global = env;
  JointResult r = eval_joint(jm, direct);
  CHECK(rec.result == json(r.holds));
  CHECK_FALSE(r.holds);
  CHECK(r.trace[0].value == doctest::Approx(0.226).epsilon(1e-12));
  CHECK(r.trace[1].value == doctest::Approx(0.14).epsilon(1e-12));
  CHECK(rec.trace[0]["value"].get<double>() == doctest::Approx(r.trace[0].value).epsilon(1e-12));
  CHECK(rec.trace[1]["value"].get<double>() == doctest::Approx(r.trace[1].value).epsilon(1e-12));
}

TEST_CASE("golden pair: decorated scenarios") {
  TreeModel jm = helpers::load_model("jm");
  QueryRecord rec = run_script(jm, "analog/a22.lpfl");

  AssumptionEnv a1, a2;
  a1.attack_prob_remap = {{"b", 0.12}, {"c", 0.04}};
  a2.attack_prob_remap = {{"b", 0.34}, {"c", 0.10}};
  JointQuery direct;
  direct.body = pfl::conj(pfl::scoped(pfl::prob_compare(bfl::atom("TOP"), Cmp::lt, 0.08, nullptr, {"K"}), "A1"),
                          pfl::scoped(pfl::prob_compare(bfl::atom("TOP"), Cmp::lt, 0.08, nullptr, {"K"}), "A2"));
  direct.env_named = {{"A1", a1}, {"A2", a2}};
  JointResult r = eval_joint(jm, direct);
  CHECK(rec.result == json(r.holds));
  CHECK(r.trace[0].value == doctest::Approx(0.16984).epsilon(1e-12));
  CHECK(r.trace[1].value == doctest::Approx(0.2827).epsilon(1e-12));
  CHECK(rec.trace[0]["value"].get<double>() == doctest::Approx(r.trace[0].value).epsilon(1e-12));
}

TEST_CASE("golden pair: budget-constrained existential") {
  TreeModel jm = helpers::load_model("jm");
  QueryRecord rec = run_script(jm, "analog/a24.lpfl");

  AssumptionEnv env;
  env.budgets = {{MetricDomain::cost, "R", Cmp::le, 13.0}};
  JointQuery direct;
  direct.body = pfl::prob_compare(bfl::atom("TOP"), Cmp::ge, 0.4, nullptr, {"K"});
  direct.env_global = env;
  direct.existential = true;
  JointResult r = eval_joint(jm, direct);
  CHECK(rec.result == json(r.holds));
  CHECK_FALSE(r.holds);
}

TEST_CASE("golden pair: decorated budgets over one shared strategy") {
  TreeModel jm = helpers::load_model("jm");
  QueryRecord rec = run_script(jm, "analog/a26.lpfl");

  AssumptionEnv a1, a2;
  a1.budgets = {{MetricDomain::cost, "G", Cmp::le, 4.0}};
  a2.budgets = {{MetricDomain::cost, "R", Cmp::le, 14.0}};
  JointQuery direct;
  direct.body = pfl::conj(pfl::scoped(pfl::prob_compare(bfl::atom("TOP"), Cmp::ge, 0.3, nullptr, {"K"}), "A1"),
                          pfl::scoped(pfl::prob_compare(bfl::atom("K"), Cmp::ge, 0.2, nullptr, {"K"}), "A2"));
  direct.env_named = {{"A1", a1}, {"A2", a2}};
  direct.existential = true;
  JointResult r = eval_joint(jm, direct);
  CHECK(rec.result == json(r.holds));
  CHECK(r.holds);
  REQUIRE(r.witness_strategy.has_value());
  CHECK(*r.witness_strategy == std::vector<std::string>{"a", "c"});
  CHECK(rec.witness == json(*r.witness_strategy));
}

TEST_CASE("the original paper scripts desugar against WATER") {
  TreeModel water = helpers::load_model("water");
  for (const char* name : {"q07", "q08", "q09", "q10", "q11", "q12", "q13", "q14", "q15", "q16", "q17", "q18",
                           "q20", "q22", "q24", "q26"}) {
    Script s = helpers::load_script(std::string("paper/") + name + ".lpfl");
    CHECK_NOTHROW(desugar(s, water));
  }
}
