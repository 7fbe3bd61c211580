#include "tqa/formula.hpp"

#include "doctest.h"

using namespace tqa;
using namespace tqa::top;

namespace {

SymbolTable demo_syms() {
  return {
      {"contain", {2, VerbClass::State}},
      {"run", {1, VerbClass::Activity}},
      {"advertise", {2, VerbClass::Activity}},
      {"fixing", {2, VerbClass::CulmActivity}},
      {"building", {2, VerbClass::CulmActivity}},
      {"explode", {1, VerbClass::Point}},
      {"engine", {1, VerbClass::Timeless}},
      {"engineer", {1, VerbClass::Timeless}},
  };
}

FormulaPtr contain_t2w() {
  return make_pred("contain", {constant("tank2"), constant("water")});
}

}  // namespace

TEST_SUITE_BEGIN("formula");

TEST_CASE("rendering matches the canonical style") {
  CHECK(render_formula(make_past("e1", contain_t2w())) ==
        "Past[e1, contain(tank2, water)]");
  CHECK(render_formula(make_interrog_mxl("e1", make_past("e1", contain_t2w()))) ==
        "?mxl e1 Past[e1, contain(tank2, water)]");

  auto at = make_at(time::parse_date_expr("1/6/94"),
                    make_past("e1", make_culm(make_pred(
                                        "fixing", {constant("john"), var("x1")}))));
  auto f = make_exists("x1", {make_pred("engine", {var("x1")})}, at);
  CHECK(render_formula(f) ==
        "exists x1 engine(x1) and At[\"1/6/1994\", Past[e1, Culm[fixing(john, x1)]]]");

  CHECK(render_formula(make_for(time::Unit::Year, 2,
                                make_past("e1", make_pred("building",
                                                          {constant("housecorp"),
                                                           constant("bridge2")})))) ==
        "For[year, 2, Past[e1, building(housecorp, bridge2)]]");
}

TEST_CASE("parse builds the expected structure") {
  FormulaPtr f = parse_formula("?mxl e1 Past[e1, contain(tank2, water)]");
  REQUIRE(f->op == Op::InterrogMxl);
  CHECK(f->var == "e1");
  REQUIRE(f->child->op == Op::Past);
  CHECK(f->child->var == "e1");
  REQUIRE(f->child->child->op == Op::Pred);
  CHECK(f->child->child->pred == "contain");
  CHECK(f->child->child->args ==
        std::vector<Term>{constant("tank2"), constant("water")});

  f = parse_formula("? x1 engine(x1) and Past[e1, Culm[fixing(john, x1)]]");
  REQUIRE(f->op == Op::Interrog);
  CHECK(f->var == "x1");
  REQUIRE(f->restriction.size() == 1);
  CHECK(f->restriction[0]->pred == "engine");
  CHECK(f->restriction[0]->args == std::vector<Term>{var("x1")});
  CHECK(f->child->op == Op::Past);

  // Quantified variables resolve as variables, other idents as constants.
  f = parse_formula("exists x1 engine(x1) and contain(x1, water)");
  CHECK(f->op == Op::Exists);
  CHECK(f->child->args == std::vector<Term>{var("x1"), constant("water")});
}

TEST_CASE("parse accepts the colon and bare-space quantifier forms") {
  FormulaPtr a = parse_formula("? x1 engine(x1) and Past[e1, Culm[fixing(john, x1)]]");
  FormulaPtr b = parse_formula("? x1 engine(x1) : Past[e1, Culm[fixing(john, x1)]]");
  FormulaPtr c = parse_formula("? x1 engine(x1) Past[e1, Culm[fixing(john, x1)]]");
  CHECK(equal(a, b));
  CHECK(equal(a, c));

  // Restriction-free interrogative ("what").
  FormulaPtr d = parse_formula("? x1 Past[e1, Culm[fixing(john, x1)]]");
  CHECK(d->restriction.empty());
  CHECK(d->child->op == Op::Past);
}

TEST_CASE("parse errors carry a position") {
  try {
    parse_formula("Past[e1 contain(tank2, water)]");
    FAIL("expected a parse error");
  } catch (const FormulaError& e) {
    std::string msg = e.what();
    CHECK(msg.find("offset 8") != std::string::npos);
    CHECK(msg.find("','") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_formula("At[\"31/2/94\", run(john)]"), FormulaError);
  CHECK_THROWS_AS(parse_formula("Past[e1, run(john)] trailing"), FormulaError);
  CHECK_THROWS_AS(parse_formula("For[fortnight, 1, run(john)]"), FormulaError);
  CHECK_THROWS_AS(parse_formula(""), FormulaError);
}

TEST_CASE("round-trip: parse after render is the identity") {
  const char* samples[] = {
      "contain(tank2, water)",
      "Past[e1, contain(tank2, water)]",
      "Pres[e1, contain(tank2, water)]",
      "At[\"1/6/1994\", Past[e1, run(john)]]",
      "At[\"17:00\", Past[e1, Begin[run(john)]]]",
      "Past[e1, Perf[e2, At[\"1/1/1985\", advertise(ibi, ppc)]]]",
      "At[\"1/1/1985\", Past[e1, Perf[e2, advertise(ibi, ppc)]]]",
      "For[year, 2, Past[e1, Culm[building(housecorp, bridge2)]]]",
      "exists x1 engine(x1) and At[\"1/6/1994\", Past[e1, Culm[fixing(john, x1)]]]",
      "? x1 Past[e1, Culm[fixing(john, x1)]]",
      "? x1 engineer(x1) and exists x2 engine(x2) and Past[e1, Culm[fixing(x1, x2)]]",
      "?mxl e1 Past[e1, contain(tank2, water)]",
      "?mxl e1 At[\"1/6/1994\", Past[e1, run(john)]]",
      "End[Culm[fixing(john, eng2)]]",
      "Past[e1, End[Culm[fixing(john, eng2)]]]",
      "exists x1 engine(x1) and contain(x1, water)",
  };
  for (const char* s : samples) {
    CAPTURE(s);
    FormulaPtr f = parse_formula(s);
    CHECK(render_formula(f) == s);
    CHECK(equal(parse_formula(render_formula(f)), f));
  }
}

TEST_CASE("well-formed accepts the corpus shapes") {
  SymbolTable syms = demo_syms();
  const char* good[] = {
      "Past[e1, contain(tank2, water)]",
      "exists x1 engine(x1) and At[\"1/6/1994\", Past[e1, Culm[fixing(john, x1)]]]",
      "?mxl e1 Past[e1, advertise(ibi, ppc)]",
      "Past[e1, Perf[e2, At[\"1/1/1985\", advertise(ibi, ppc)]]]",
      "? x1 engineer(x1) and exists x2 engine(x2) and Past[e1, Culm[fixing(x1, x2)]]",
  };
  for (const char* s : good) {
    CAPTURE(s);
    CHECK(well_formed(parse_formula(s), syms).empty());
  }
}

TEST_CASE("well-formed reports violations") {
  SymbolTable syms = demo_syms();
  auto violations = [&](const char* s) { return well_formed(parse_formula(s), syms); };

  auto v = violations("Culm[run(john)]");
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "Culm over non-culminating predicate run");

  v = violations("Past[e1, Past[e1, contain(tank2, water)]]");
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "event variable e1 reused");

  // Text parsing resolves unquantified idents as constants, so an unbound
  // variable can only come from a hand-built tree.
  FormulaPtr open = make_past("e1", make_pred("fixing", {constant("john"), var("x1")}));
  v = well_formed(open, syms);
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "unbound variable x1");

  v = violations("?mxl e1 At[\"1/6/1994\", run(john)]");
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("must index exactly one tense operator (found 0)") !=
        std::string::npos);

  v = violations("?mxl e1 Past[e1, Perf[e2, Pres[e1, run(john)]]]");
  CHECK(!v.empty());

  v = violations("?mxl e1 Past[e1, ?mxl e2 Pres[e2, run(john)]]");
  CHECK(v[0] == "multiple interrogative-maximal quantifiers");

  v = violations("contain(tank2)");
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "arity mismatch for contain: expected 2, got 1");

  v = violations("swim(john)");
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "unknown predicate swim");

  v = violations("For[year, 0, Past[e1, run(john)]]");
  REQUIRE(v.size() == 1);
  CHECK(v[0] == "non-positive duration count");

  v = violations("exists x1 engine(x1) and exists x1 engine(x1) and run(john)");
  CHECK(v[0] == "entity variable x1 rebound");

  // Interrogative-maximal variable may not index a perfect operator.
  v = violations("?mxl e2 Past[e1, Perf[e2, advertise(ibi, ppc)]]");
  CHECK(!v.empty());
}

TEST_CASE("culm cancellation fires anywhere below For") {
  FormulaPtr f = parse_formula(
      "For[year, 2, Past[e1, Culm[building(housecorp, bridge2)]]]");
  FormulaPtr g = cancel_culm_under_for(f);
  CHECK(render_formula(g) == "For[year, 2, Past[e1, building(housecorp, bridge2)]]");

  // Through intervening operators.
  f = parse_formula("For[month, 3, At[\"1/6/1994\", Past[e1, Culm[fixing(john, eng2)]]]]");
  g = cancel_culm_under_for(f);
  CHECK(render_formula(g) ==
        "For[month, 3, At[\"1/6/1994\", Past[e1, fixing(john, eng2)]]]");

  // Idempotent and a no-op without For.
  CHECK(equal(cancel_culm_under_for(g), g));
  f = parse_formula("Past[e1, Culm[fixing(john, eng2)]]");
  CHECK(equal(cancel_culm_under_for(f), f));

  // Preserves well-formedness and free variables.
  SymbolTable syms = demo_syms();
  f = parse_formula("exists x1 engine(x1) and For[day, 7, Past[e1, Culm[fixing(john, x1)]]]");
  g = cancel_culm_under_for(f);
  CHECK(well_formed(g, syms).empty());
  CHECK(free_vars(g) == free_vars(f));
}

TEST_CASE("free variables") {
  CHECK(free_vars(parse_formula("Past[e1, contain(tank2, water)]")).empty());
  CHECK(free_vars(parse_formula("exists x1 engine(x1) and contain(x1, water)")).empty());

  FormulaPtr open = make_past("e1", make_pred("fixing", {constant("john"), var("x1")}));
  auto fv = free_vars(open);
  REQUIRE(fv.size() == 1);
  CHECK(fv[0] == Variable{"x1", VarKind::Entity});
}

TEST_CASE("alpha equivalence ignores bound-variable names") {
  auto a = parse_formula("? x1 engineer(x1) and exists x2 engine(x2) and Past[e1, Culm[fixing(x1, x2)]]");
  auto b = parse_formula("? x9 engineer(x9) and exists x4 engine(x4) and Past[e7, Culm[fixing(x9, x4)]]");
  CHECK(alpha_equal(a, b));

  auto c = parse_formula("?mxl e5 Past[e5, contain(tank2, water)]");
  auto d = parse_formula("?mxl e1 Past[e1, contain(tank2, water)]");
  CHECK(alpha_equal(c, d));

  // Quantifier kind matters.
  auto e = parse_formula("exists x1 engineer(x1) and exists x2 engine(x2) and Past[e1, Culm[fixing(x1, x2)]]");
  CHECK_FALSE(alpha_equal(a, e));

  // Constants matter.
  auto f = parse_formula("Past[e1, contain(tank2, water)]");
  auto g = parse_formula("Past[e1, contain(tank2, oil)]");
  CHECK_FALSE(alpha_equal(f, g));

  // Pattern and duration payloads matter.
  CHECK_FALSE(alpha_equal(parse_formula("At[\"1/6/1994\", Past[e1, run(john)]]"),
                          parse_formula("At[\"2/6/1994\", Past[e1, run(john)]]")));
  CHECK_FALSE(alpha_equal(parse_formula("For[year, 2, Past[e1, run(john)]]"),
                          parse_formula("For[year, 3, Past[e1, run(john)]]")));
  CHECK(alpha_equal(parse_formula("At[\"1/6/94\", Past[e1, run(john)]]"),
                    parse_formula("At[\"1/6/1994\", Past[e2, run(john)]]")));
}

TEST_SUITE_END();
