// In-memory valid-time database: relations of constant tuples timestamped
// with coalesced temporal sets, plus climax points for culminated activities.
// Read-only after load; the text format is documented in the README.
#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tqa/formula.hpp"
#include "tqa/time.hpp"

namespace tqa::db {

struct DatabaseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One value-tuple with its timestamp.  Coalescing guarantees no two tuples of
// a relation share the same values; climaxes are nonempty only in
// culm_activity relations, and each climax is the end of a maximal period of
// `valid`.
struct Tuple {
  std::vector<std::string> values;
  time::TemporalSet valid;
  std::vector<time::TimePoint> climaxes;  // sorted, unique
};

struct Relation {
  std::string name;
  std::size_t arity = 0;
  top::VerbClass verb_class = top::VerbClass::State;
  std::vector<Tuple> tuples;
};

struct Database {
  time::Axis axis;
  std::map<std::string, Relation> relations;
  std::set<std::string> entities;  // every constant appearing in any tuple
};

// Parses the line-oriented database text.  Timeless tuples materialize the
// full axis as their valid set.  Throws DatabaseError with a line number on
// syntax or range errors, and a validation error when a climax is not the
// end of a maximal valid period (checked after coalescing).
Database load_database(std::string_view text);
Database load_database_file(const std::string& path);

// One matching tuple: variable positions of the pattern bound to the tuple's
// constants, plus the tuple's timestamp.
struct DenotationRow {
  std::map<std::string, std::string> bindings;
  time::TemporalSet valid;
  std::vector<time::TimePoint> climaxes;
};

// All tuples of `pred` matching the constants of `pattern`; a variable
// repeated in the pattern must unify.  Throws on unknown predicate or arity
// mismatch.
std::vector<DenotationRow> denotation(const Database& db,
                                      const std::string& pred,
                                      const std::vector<top::Term>& pattern);

// The relation's state at time t: value lists of tuples whose valid set
// contains t.
std::set<std::vector<std::string>> snapshot(const Database& db,
                                            const std::string& pred,
                                            time::TimePoint t);

// Predicate signatures of every declared relation, for well-formedness
// checks.
top::SymbolTable symbol_table(const Database& db);

}  // namespace tqa::db
