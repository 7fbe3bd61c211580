// Question-answering sessions: load a database and lexicon, fix the speech
// time, then answer questions one at a time (REPL) or from a file (batch).
// Per-question failures are reported on the output stream and never end the
// session; only load/configuration problems throw.
#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tqa/database.hpp"
#include "tqa/lexicon.hpp"
#include "tqa/time.hpp"

namespace tqa::cli {

struct SessionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  std::string db_path;
  std::string lexicon_path;
  std::string now;  // speech time, "D/M/YYYY" or "D/M/YYYY HH:MM"
  bool show_top = false;
  bool show_tsql2 = false;
  bool check = false;
  bool first_reading_only = false;  // --readings first
};

struct Session {
  SessionConfig config;
  db::Database database;
  lex::Lexicon lexicon;
  time::TimePoint st = 0;
};

// What happened while answering one question.  user_error covers questions
// the system correctly rejects (unknown words, no parse, dates off the
// axis); internal_error covers everything that should not happen.
struct Outcome {
  bool user_error = false;
  bool internal_error = false;
  bool divergence = false;  // check mode: the two paths disagreed
};

// Speech time text -> axis point.  Throws SessionError when malformed,
// finer than the axis granularity, or off the axis.
time::TimePoint resolve_now(const std::string& text, const time::Axis& axis);

// Loads both files, resolves the speech time, and cross-checks every
// lexicon predicate against the database schema.  Throws SessionError.
Session open_session(const SessionConfig& config);

// Answers one question on out: per reading, the formula (show_top), the
// TSQL2 text (show_tsql2), the answer, and the check verdict (check).
// Readings are labeled "reading N:" when more than one is shown.
Outcome answer_question(const Session& s, const std::string& question,
                        std::ostream& out);

// Interactive loop: prompts with "> ", answers until :quit or end of input.
// Returns the process exit status (0 ok, 1 internal errors, 2 divergence).
int run_repl(const Session& s, std::istream& in, std::ostream& out);

// Batch loop: echoes each question, then its answer block.  Blank lines and
// '#' comments are skipped.  Output is byte-deterministic.  Exit status as
// run_repl; questions the system rejects do not change it.
int run_batch(const Session& s, std::istream& questions, std::ostream& out);

}  // namespace tqa::cli
