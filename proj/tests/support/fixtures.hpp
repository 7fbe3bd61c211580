// Shared demo database for evaluator, algebra, and session tests.
#pragma once

#include <string>

#include "tqa/database.hpp"
#include "tqa/lexicon.hpp"
#include "tqa/time.hpp"

namespace tqa::test {

// In-memory text of the demo database (tanks, engine repairs, adverts,
// bridge construction) on a day axis from 1/1/1984 to 31/12/1995.
const std::string& demo_db_text();

// The loaded demo database (parsed once).
const db::Database& demo_db();

// Lexicon text covering the demo database's verbs, nouns and names.
const std::string& demo_lexicon_text();

// The loaded demo lexicon (parsed once).
const lex::Lexicon& demo_lexicon();

// First point of the named day ("d/m/yyyy") on the axis.
time::TimePoint day_point(const time::Axis& axis, const std::string& date);

// Period spanning the named days, inclusive.
time::Period day_span(const time::Axis& axis, const std::string& from,
                      const std::string& to);

}  // namespace tqa::test
