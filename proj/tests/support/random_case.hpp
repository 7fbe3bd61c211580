// Randomized (database, formula, speech time) cases for differential tests.
// Case sizes are tuned so the naive oracle stays fast: axes shrink as the
// formula gains event-time-enumerating operators (Perf/Begin/End) or an
// interrogative-maximal quantifier.
#pragma once

#include <random>
#include <string>

#include "tqa/database.hpp"
#include "tqa/formula.hpp"

namespace tqa::test {

struct RandomCase {
  std::string db_text;      // loadable reproduction of the database
  std::string formula_text; // render_formula of the formula
  db::Database database;
  top::FormulaPtr formula;
  time::TimePoint st;
};

RandomCase make_random_case(std::mt19937& rng);

}  // namespace tqa::test
