// English question front end: tokenizer with greedy multi-word name
// matching, a fragment parser for the covered question forms, and
// compositional semantics with a quantifier store.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tqa/formula.hpp"
#include "tqa/lexicon.hpp"

namespace tqa::gram {

struct GramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseTree;
using TreePtr = std::shared_ptr<const ParseTree>;

enum class Role { Head, Subject, Complement, Adjunct };

// Every non-leaf has exactly one Head daughter; daughters are kept in
// surface order and leaves carry their word and token position.
struct ParseTree {
  std::string label;  // S, VP, NP, PP, AUX, V, N, NAME, DET, WH, WHEN,
                      // DATE, TIME, NUM, UNIT, P, ADV
  std::string word;   // lexical anchor, leaves only
  std::size_t pos = 0;
  std::vector<std::pair<Role, TreePtr>> daughters;
};

// All parses of the covered forms: auxiliary yes/no questions, progressive
// and perfect variants, subject/object wh questions, "when" variants,
// declaratives, with fronted or trailing temporal adjuncts.  Past-perfect
// sentences attach each temporal adjunct either to the whole sentence or
// to the participle phrase, widest attachment listed first.  Throws
// GramError on unknown words (with position) or when nothing matches
// (reporting the furthest point reached).
std::vector<TreePtr> parse(const std::string& question,
                           const lex::Lexicon& lx);

// Formulae for one tree.  Usually one reading; a punctual "at" adjunct on a
// non-progressive culminating verb yields a completion reading and then an
// inception reading.
std::vector<top::FormulaPtr> compose(const TreePtr& tree,
                                     const lex::Lexicon& lx);

// parse, compose every tree, drop alpha-equivalent duplicates, keep order.
std::vector<top::FormulaPtr> analyze(const std::string& question,
                                     const lex::Lexicon& lx);

}  // namespace tqa::gram
