#include "tqa/database.hpp"

#include <random>
#include <set>

#include "doctest.h"

using namespace tqa;
using namespace tqa::db;

namespace {

// Independent day-count oracle: steps one day at a time.
struct Ymd {
  int y, m, d;
  bool operator==(const Ymd&) const = default;
};

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_len(int y, int m) {
  static const int base[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && leap(y) ? 29 : base[m - 1];
}

Ymd next_day(Ymd a) {
  if (++a.d > month_len(a.y, a.m)) {
    a.d = 1;
    if (++a.m > 12) { a.m = 1; ++a.y; }
  }
  return a;
}

std::int64_t day_index(Ymd from, Ymd to) {
  std::int64_t n = 0;
  while (!(from == to)) { from = next_day(from); ++n; }
  return n;
}

// Day offset from 1/1/1994, the origin used in most tests here.
std::int64_t d94(int d, int m, int y) { return day_index({1994, 1, 1}, {y, m, d}); }

std::set<time::TimePoint> points_of(const time::TemporalSet& ts) {
  std::set<time::TimePoint> out;
  for (auto p : ts.periods)
    for (time::TimePoint t = p.start; t <= p.end; ++t) out.insert(t);
  return out;
}

std::string date_str(std::int64_t day_offset) {
  time::CalendarDate d = time::civil_from_days(
      time::days_from_civil({1994, 1, 1}) + day_offset);
  return std::to_string(d.day) + "/" + std::to_string(d.month) + "/" +
         std::to_string(d.year);
}

const char* kHeader = "axis 1/1/1994 31/12/1995 day\n";

}  // namespace

TEST_SUITE_BEGIN("database");

TEST_CASE("minimal load") {
  std::string text = std::string(kHeader) +
      "relation contain/2 state\n"
      "tuple contain tank2 water valid=6/1/1994..21/1/1994\n";
  Database d = load_database(text);
  REQUIRE(d.relations.size() == 1);
  const Relation& rel = d.relations.at("contain");
  CHECK(rel.arity == 2);
  CHECK(rel.verb_class == top::VerbClass::State);
  REQUIRE(rel.tuples.size() == 1);
  CHECK(rel.tuples[0].values == std::vector<std::string>{"tank2", "water"});
  CHECK(d94(6, 1, 1994) == 5);
  CHECK(d94(21, 1, 1994) == 20);
  CHECK(rel.tuples[0].valid == time::TemporalSet{{{5, 20}}});
  CHECK(rel.tuples[0].climaxes.empty());
  CHECK(d.entities == std::set<std::string>{"tank2", "water"});
}

TEST_CASE("value-equivalent tuples coalesce with no seam") {
  std::string text = std::string(kHeader) +
      "relation contain/2 state\n"
      "tuple contain tank2 water valid=6/1/1994..11/1/1994\n"
      "tuple contain tank2 water valid=12/1/1994..21/1/1994\n";
  Database d = load_database(text);
  const Relation& rel = d.relations.at("contain");
  REQUIRE(rel.tuples.size() == 1);
  CHECK(rel.tuples[0].valid == time::TemporalSet{{{5, 20}}});

  // Point-set oracle across the merge boundary.
  std::set<time::TimePoint> expect;
  for (time::TimePoint t = 5; t <= 10; ++t) expect.insert(t);
  for (time::TimePoint t = 11; t <= 20; ++t) expect.insert(t);
  CHECK(points_of(rel.tuples[0].valid) == expect);

  CHECK(snapshot(d, "contain", 10) ==
        std::set<std::vector<std::string>>{{"tank2", "water"}});
  CHECK(snapshot(d, "contain", 11) ==
        std::set<std::vector<std::string>>{{"tank2", "water"}});
  CHECK(snapshot(d, "contain", 4).empty());
  CHECK(snapshot(d, "contain", 21).empty());
}

TEST_CASE("snapshot matches membership") {
  std::string text = std::string(kHeader) +
      "relation contain/2 state\n"
      "tuple contain tank2 water valid=6/1/1994..21/1/1994\n";
  Database d = load_database(text);
  CHECK(snapshot(d, "contain", 7) ==
        std::set<std::vector<std::string>>{{"tank2", "water"}});
  CHECK(snapshot(d, "contain", 3).empty());
  CHECK_THROWS_AS(snapshot(d, "nosuch", 3), DatabaseError);
}

TEST_CASE("climax must end a maximal valid period") {
  std::string bad = std::string(kHeader) +
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng2 valid=11/1/1994..15/1/1994 climax=13/1/1994\n";
  CHECK_THROWS_WITH_AS(load_database(bad),
                       doctest::Contains("not the end of a maximal valid period"),
                       DatabaseError);

  std::string good = std::string(kHeader) +
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng2 valid=11/1/1994..15/1/1994 climax=15/1/1994\n";
  Database d = load_database(good);
  CHECK(d.relations.at("fixing").tuples[0].climaxes ==
        std::vector<time::TimePoint>{d94(15, 1, 1994)});
}

TEST_CASE("coalescing can orphan a climax") {
  // Merging [1,5] and [6,9] moves the former end 5 into the interior.
  std::string bad = std::string(kHeader) +
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng2 valid=2/1/1994..6/1/1994 climax=6/1/1994\n"
      "tuple fixing john eng2 valid=7/1/1994..10/1/1994\n";
  CHECK_THROWS_AS(load_database(bad), DatabaseError);

  // A gap keeps both maximal periods, so the earlier climax survives.
  std::string good = std::string(kHeader) +
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng2 valid=2/1/1994..6/1/1994 climax=6/1/1994\n"
      "tuple fixing john eng2 valid=9/1/1994..12/1/1994\n";
  Database d = load_database(good);
  const Tuple& t = d.relations.at("fixing").tuples[0];
  CHECK(t.valid == time::TemporalSet{{{1, 5}, {8, 11}}});
  CHECK(t.climaxes == std::vector<time::TimePoint>{5});
}

TEST_CASE("timeless relations span the whole axis") {
  std::string text = std::string(kHeader) +
      "relation engine/1 timeless\n"
      "tuple engine eng1\n"
      "tuple engine eng2\n";
  Database d = load_database(text);
  auto rows = denotation(d, "engine", {top::var("x1")});
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows)
    CHECK(r.valid == time::full_axis(d.axis));

  CHECK_THROWS_WITH_AS(
      load_database(std::string(kHeader) +
                    "relation engine/1 timeless\n"
                    "tuple engine eng1 valid=6/1/1994..7/1/1994\n"),
      doctest::Contains("takes no valid="), DatabaseError);
}

TEST_CASE("denotation matches and binds") {
  std::string text = std::string(kHeader) +
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng1 valid=2/1/1994..6/1/1994\n"
      "tuple fixing john eng2 valid=9/1/1994..12/1/1994 climax=12/1/1994\n"
      "tuple fixing mary mary valid=2/1/1994..3/1/1994\n";
  Database d = load_database(text);

  auto rows = denotation(d, "fixing", {top::constant("john"), top::constant("eng2")});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].bindings.empty());
  CHECK(rows[0].climaxes == std::vector<time::TimePoint>{d94(12, 1, 1994)});

  rows = denotation(d, "fixing", {top::constant("john"), top::var("x1")});
  REQUIRE(rows.size() == 2);
  std::set<std::string> bound;
  for (const auto& r : rows) bound.insert(r.bindings.at("x1"));
  CHECK(bound == std::set<std::string>{"eng1", "eng2"});

  CHECK(denotation(d, "fixing", {top::constant("tank9"), top::var("x1")}).empty());

  // A repeated variable must unify.
  rows = denotation(d, "fixing", {top::var("x1"), top::var("x1")});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].bindings.at("x1") == "mary");

  CHECK_THROWS_AS(denotation(d, "fixing", {top::var("x1")}), DatabaseError);
  CHECK_THROWS_AS(denotation(d, "nosuch", {top::var("x1")}), DatabaseError);
}

TEST_CASE("load errors carry line numbers") {
  auto error_of = [](const std::string& text) {
    try {
      load_database(text);
      return std::string("no error");
    } catch (const DatabaseError& e) {
      return std::string(e.what());
    }
  };

  CHECK(error_of("relation contain/2 state\n").find("line 1") == 0);
  CHECK(error_of(std::string(kHeader) + "axis 1/1/1994 2/1/1994 day\n")
            .find("line 2: duplicate axis") == 0);
  CHECK(error_of(std::string(kHeader) + "relation contain/2 nosuch\n")
            .find("unknown verb class") != std::string::npos);
  CHECK(error_of(std::string(kHeader) + "bogus\n").find("unknown directive") !=
        std::string::npos);
  CHECK(error_of(std::string(kHeader) + "tuple contain a b valid=1/1/1994..2/1/1994\n")
            .find("unknown relation") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 valid=1/1/1994..2/1/1994\n")
            .find("expects 2 values, got 1") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 water valid=1/1/1993..2/1/1994\n")
            .find("off the axis") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 water valid=5/1/1994..2/1/1994\n")
            .find("ends before it starts") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 water valid=31/2/1994..2/3/1994\n")
            .find("line 3") == 0);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 water\n")
            .find("requires valid=") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "tuple contain tank2 water valid=1/1/1994..2/1/1994 "
                 "climax=2/1/1994\n")
            .find("only allowed in culm_activity") != std::string::npos);
  CHECK(error_of(std::string(kHeader) +
                 "relation contain/2 state\n"
                 "relation contain/2 state\n")
            .find("already declared") != std::string::npos);
  CHECK(error_of("") == "line 1: missing axis line");
}

TEST_CASE("comments and blank lines are ignored") {
  std::string text =
      "# tank scenario\n"
      "\n"
      "axis 1/1/1994 31/12/1995 day  # two calendar years\n"
      "relation contain/2 state\n"
      "tuple contain tank2 water valid=6/1/1994..21/1/1994 # still coalesced\n";
  Database d = load_database(text);
  CHECK(d.relations.at("contain").tuples.size() == 1);
}

TEST_CASE("clock timestamps on sub-day axes") {
  std::string text =
      "axis 1/1/1994 2/1/1994 minute\n"
      "relation fixing/2 culm_activity\n"
      "tuple fixing john eng2 valid=1/1/1994@09:15..1/1/1994@10:00 "
      "climax=1/1/1994@10:00\n"
      "relation run/1 activity\n"
      "tuple run john valid=2/1/1994..2/1/1994\n";
  Database d = load_database(text);
  const Tuple& t = d.relations.at("fixing").tuples[0];
  CHECK(t.valid == time::TemporalSet{{{9 * 60 + 15, 10 * 60}}});
  CHECK(t.climaxes == std::vector<time::TimePoint>{10 * 60});

  // A plain date covers its whole day at any granularity.
  CHECK(d.relations.at("run").tuples[0].valid ==
        time::TemporalSet{{{1440, 2879}}});

  CHECK_THROWS_WITH_AS(
      load_database(std::string(kHeader) +
                    "relation run/1 activity\n"
                    "tuple run john valid=1/1/1994@09:15..1/1/1994@10:00\n"),
      doctest::Contains("finer than a day"), DatabaseError);
}

TEST_CASE("random loads match the point-set oracle") {
  std::mt19937 rng(4242);
  for (int iter = 0; iter < 200; ++iter) {
    std::uniform_int_distribution<int> day(0, 59);
    int n = std::uniform_int_distribution<int>(1, 6)(rng);
    std::vector<time::Period> raw;
    std::string text = std::string(kHeader) + "relation contain/2 state\n";
    for (int i = 0; i < n; ++i) {
      int a = day(rng), b = day(rng);
      if (a > b) std::swap(a, b);
      raw.push_back({a, b});
      text += "tuple contain tank2 water valid=" + date_str(a) + ".." +
              date_str(b) + "\n";
    }
    Database d = load_database(text);
    const Relation& rel = d.relations.at("contain");
    REQUIRE(rel.tuples.size() == 1);

    std::set<time::TimePoint> expect;
    for (auto p : raw)
      for (time::TimePoint t = p.start; t <= p.end; ++t) expect.insert(t);
    CHECK(points_of(rel.tuples[0].valid) == expect);

    // snapshot(t) is exactly point membership.
    for (time::TimePoint t = 0; t <= 60; ++t) {
      bool in = expect.count(t) > 0;
      CHECK(snapshot(d, "contain", t).size() == (in ? 1u : 0u));
    }
  }
}

TEST_CASE("symbol table reflects declarations") {
  std::string text = std::string(kHeader) +
      "relation contain/2 state\n"
      "relation fixing/2 culm_activity\n"
      "relation engine/1 timeless\n";
  top::SymbolTable syms = symbol_table(load_database(text));
  CHECK(syms.at("contain").arity == 2);
  CHECK(syms.at("contain").cls == top::VerbClass::State);
  CHECK(syms.at("fixing").cls == top::VerbClass::CulmActivity);
  CHECK(syms.at("engine").cls == top::VerbClass::Timeless);
}

TEST_SUITE_END();
