// The compiled query path: translate() turns a closed well-formed formula
// into a temporal relational algebra tree with the localisation windows and
// speech time baked in; eval_alg() runs the tree against a database.  Both
// paths, this one and the reference evaluator, must produce identical
// Answers on every database.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqa/database.hpp"
#include "tqa/evaluator.hpp"
#include "tqa/formula.hpp"
#include "tqa/time.hpp"

namespace tqa::alg {

struct AlgError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AlgOp {
  Scan,                  // relation rows matching a constant/variable pattern
  CulmSelect,            // maximal periods that end in a climax
  BeginPoints,           // start points of the input periods
  EndPoints,             // end points of the input periods
  WindowRestrict,        // clip to a localisation window
  SubperiodsOfDuration,  // fixed-length subperiods
  PrecedesJoin,          // periods in a window preceded by an input event
  EntityJoin,            // bind an entity variable against its restrictions
  Collect,               // root: fold rows into an Answer
};

enum class CollectKind { Bool, Bindings, Maximal };

struct AlgExpr;
using AlgExprPtr = std::shared_ptr<const AlgExpr>;

struct AlgExpr {
  AlgOp op = AlgOp::Scan;
  std::string pred;                       // Scan
  std::vector<top::Term> pattern;         // Scan
  time::TemporalSet window;               // WindowRestrict; PrecedesJoin outer window
  time::TimePoint points = 0;             // SubperiodsOfDuration
  std::string var;                        // EntityJoin
  std::vector<AlgExprPtr> restrictions;   // EntityJoin; empty means every entity
  CollectKind kind = CollectKind::Bool;   // Collect
  std::vector<std::string> columns;       // Collect: reported entity variables
  std::optional<std::string> period_var;  // Collect: maximal-period variable
  std::vector<std::string> group_vars;    // Collect: quantified entity variables,
                                          // the grouping for the maximality filter
  AlgExprPtr child;                       // main input; absent on Scan
};

// How a row's periods are to be read.
enum class RowMode {
  DownwardClosed,  // true at every subperiod of each listed period
  Exact,           // true exactly at the listed periods
  Points,          // true at [p,p] for every point covered by the periods
};

struct AlgRow {
  std::map<std::string, std::string> bindings;
  time::TemporalSet et;
  std::vector<time::TimePoint> climaxes;  // raw scans only; CulmSelect consumes
  RowMode mode = RowMode::DownwardClosed;
};

// Compiles a formula.  Interrogative quantifiers must form a prefix, and an
// interrogative-maximal variable must reach its tense operator through
// event-time-preserving operators only; otherwise AlgError.  Quantifier
// restrictions must be plain predicates.
AlgExprPtr translate(const top::FormulaPtr& f, time::TimePoint st,
                     const time::Axis& axis);

// Wraps a compiled tree with one more localisation window, placed exactly
// where translate would have pushed it.
AlgExprPtr push_window(const AlgExprPtr& a, const time::TemporalSet& w);

// Structural equality of trees.
bool alg_equal(const AlgExprPtr& a, const AlgExprPtr& b);

// One-line rendering, e.g.
// Collect(bool, WindowRestrict(Scan(contain, [tank2, water]), 1/1/1984..7/6/1994)).
std::string render_alg(const AlgExprPtr& a, const time::Axis& axis);

// Row set of a non-Collect subtree, exposed for property tests.
std::vector<AlgRow> eval_rows(const db::Database& d, const AlgExprPtr& a);

// Runs a compiled tree (root must be Collect) and folds its rows into an
// Answer with the same semantics as the reference evaluator.
eval::Answer eval_alg(const db::Database& d, const AlgExprPtr& a);

}  // namespace tqa::alg
