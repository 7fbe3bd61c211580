// Reference evaluator: satisfaction of formulas over the bounded axis with
// speech time st, event time et, and a localisation window lt that operators
// narrow top-down.  eval() computes whole-question Answers; oracle_eval() is
// a deliberately naive second implementation used only by tests.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqa/database.hpp"
#include "tqa/formula.hpp"
#include "tqa/time.hpp"

namespace tqa::eval {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A variable binding: entity constant, or the period pinned to an event
// variable by an interrogative-maximal quantifier.
struct Value {
  bool is_period = false;
  std::string constant;
  time::Period period;
  friend bool operator==(const Value&, const Value&) = default;
  friend auto operator<=>(const Value&, const Value&) = default;
};

inline Value entity_value(std::string c) { return {false, std::move(c), {}}; }
inline Value period_value(time::Period p) { return {true, {}, p}; }

struct Context {
  time::TimePoint st = 0;
  time::TemporalSet lt;  // localisation window; initially the full axis
  std::map<std::string, Value> bindings;
};

inline Context initial_context(const db::Database& d, time::TimePoint st) {
  return {st, time::full_axis(d.axis), {}};
}

// One answer row: constants for the interrogative variables in column order,
// plus the period of the interrogative-maximal variable when present.
struct AnswerRow {
  std::vector<std::string> entities;
  std::optional<time::Period> period;
  friend bool operator==(const AnswerRow&, const AnswerRow&) = default;
  friend auto operator<=>(const AnswerRow&, const AnswerRow&) = default;
};

struct Answer {
  enum class Kind { Boolean, Rows };
  Kind kind = Kind::Boolean;
  bool truth = false;  // Rows: true iff rows nonempty
  std::vector<std::string> entity_columns;
  std::optional<std::string> period_column;
  std::set<AnswerRow> rows;
  friend bool operator==(const Answer&, const Answer&) = default;
};

// Satisfaction of f at event time et under ctx.  Interrogative quantifiers
// inside f are read existentially here.  Unknown predicates propagate
// db::DatabaseError; unbound variables raise EvalError.
bool holds(const db::Database& d, const top::FormulaPtr& f, const Context& ctx,
           time::Period et);

// Whole-question evaluation from the initial context.  Interrogative
// quantifiers must form a prefix of the formula; rows are the binding
// combinations whose body is satisfiable, with the maximal-period column
// filtered to pairwise non-nested periods per row group.
Answer eval(const db::Database& d, const top::FormulaPtr& f,
            time::TimePoint st);

// Independent brute-force implementation of eval: point-set windows, no
// sharing, no memoization.  Guarded to axes of at most 1000 points.
Answer oracle_eval(const db::Database& d, const top::FormulaPtr& f,
                   time::TimePoint st);

// "yes"/"no" for booleans; otherwise one line per row (tab-separated
// constants, then the rendered period), already sorted; "(none)" when empty.
std::string render_answer(const Answer& a, const time::Axis& axis);

}  // namespace tqa::eval
