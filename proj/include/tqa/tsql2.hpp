// TSQL2-style rendering of compiled queries: one SELECT block per algebra
// node, annotated with the TOP operator it came from.  The text is
// inspection output for a documented SQL subset (docs/tsql2-dialect.md); it
// is never executed - the algebra evaluator is the normative target.
#pragma once

#include <stdexcept>
#include <string>

#include "tqa/algebra.hpp"
#include "tqa/formula.hpp"
#include "tqa/time.hpp"

namespace tqa::tsql2 {

struct Tsql2Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic rendering of translate(f, st, axis).  Two calls with equal
// arguments produce byte-identical text.
std::string emit_tsql2(const top::FormulaPtr& f, time::TimePoint st,
                       const time::Axis& axis);

// Rendering of an already-compiled tree.
std::string render_tsql2(const alg::AlgExprPtr& a, const time::Axis& axis);

// Syntactic round-trip check: parses text against the emitted subset grammar
// and returns the number of SELECT blocks.  Throws Tsql2Error with a line
// number on the first deviation.
int parse_tsql2(const std::string& text);

}  // namespace tqa::tsql2
