// Lexicon: verb entries with aspectual class and argument template, nouns,
// and (multi-word) proper names.  Only base verb forms are declared;
// inflected forms are recognised through regular spelling rules plus
// per-entry irregular overrides.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqa/formula.hpp"

namespace tqa::lex {

struct LexError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Aspectual classes are shared with the formula layer; verbs may use any
// class except Timeless, which is reserved for noun-like relations.
using VerbClass = top::VerbClass;

enum class VerbForm {
  Base,
  Past,
  PastParticiple,
  PresentParticiple,
  ThirdSingular,
};

struct VerbEntry {
  std::string base;
  VerbClass verb_class = VerbClass::State;
  std::string pred;        // database predicate the verb maps to
  bool transitive = false; // template subj,obj vs subj only
  std::map<VerbForm, std::string> irregular;
};

struct NounEntry {
  std::string word;
  std::string pred;
};

// A proper name is a sequence of surface tokens naming one entity.
struct NameEntry {
  std::vector<std::string> words;
  std::string constant;
};

struct Lexicon {
  std::map<std::string, VerbEntry> verbs;  // keyed by base form
  std::map<std::string, NounEntry> nouns;  // keyed by surface word
  std::vector<NameEntry> names;            // longest sequences first
};

// Regular spelling rules: +ed / +ing / +s with final-e drop, consonant
// doubling, and y -> ie.  Base form returns unchanged.
std::string inflect(const std::string& base, VerbForm f);

// Surface form of the entry in the given slot (irregular override wins).
std::string verb_form(const VerbEntry& e, VerbForm f);

struct VerbAnalysis {
  const VerbEntry* entry;
  VerbForm form;
};

// Every (entry, form) whose surface form equals the word; empty when the
// word is no verb form at all.
std::vector<VerbAnalysis> verb_analyses(const std::string& word,
                                        const Lexicon& lx);

// Loads the line-oriented lexicon format:
//   verb <base> <class> <pred>(subj[,obj]) [past=w] [pastpart=w]
//        [prespart=w] [third=w]
//   noun <word> <pred>
//   name <word> <constant>     (underscores join multi-word names)
// '#' starts a comment.  Throws LexError with a line number on bad input.
Lexicon load_lexicon(const std::string& text);

}  // namespace tqa::lex
