#include "tqa/session.hpp"

#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <vector>

#include "tqa/algebra.hpp"
#include "tqa/evaluator.hpp"
#include "tqa/formula.hpp"
#include "tqa/grammar.hpp"
#include "tqa/tsql2.hpp"

namespace tqa::cli {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string read_file(const std::string& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw SessionError(std::string("cannot open ") + what + " file: " + path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

// The schema facts a lexicon entry commits to must match the database, or
// every question over the entry would fail; reject them at load instead.
void cross_check(const lex::Lexicon& lx, const db::Database& d) {
  top::SymbolTable syms = db::symbol_table(d);
  for (const auto& [base, verb] : lx.verbs) {
    auto it = syms.find(verb.pred);
    if (it == syms.end())
      throw SessionError("verb '" + base + "': predicate '" + verb.pred +
                         "' is not a database relation");
    int arity = verb.transitive ? 2 : 1;
    if (it->second.arity != arity)
      throw SessionError("verb '" + base + "': predicate '" + verb.pred +
                         "' takes " + std::to_string(arity) +
                         " argument(s) but the relation has " +
                         std::to_string(it->second.arity));
    if (it->second.cls != verb.verb_class)
      throw SessionError("verb '" + base + "': lexicon class " +
                         top::verb_class_name(verb.verb_class) +
                         " does not match relation '" + verb.pred +
                         "' declared as " +
                         top::verb_class_name(it->second.cls));
  }
  for (const auto& [word, noun] : lx.nouns) {
    auto it = syms.find(noun.pred);
    if (it == syms.end())
      throw SessionError("noun '" + word + "': predicate '" + noun.pred +
                         "' is not a database relation");
    if (it->second.arity != 1)
      throw SessionError("noun '" + word + "': predicate '" + noun.pred +
                         "' must be unary, the relation has " +
                         std::to_string(it->second.arity) + " columns");
  }
}

// Dates a question mentions must land on the axis; rejecting them up front
// keeps them classified as user errors rather than evaluation failures.
void validate_dates(const top::FormulaPtr& f, const time::Axis& axis) {
  if (!f) return;
  if (f->op == top::Op::At) time::resolve_pattern(f->pattern, axis);
  for (const top::FormulaPtr& r : f->restriction) validate_dates(r, axis);
  validate_dates(f->child, axis);
}

}  // namespace

time::TimePoint resolve_now(const std::string& text, const time::Axis& axis) {
  std::string t = trim(text);
  if (t.empty()) throw SessionError("speech time must not be empty");
  std::string date_part = t;
  std::string clock_part;
  if (std::size_t sp = t.find(' '); sp != std::string::npos) {
    date_part = trim(t.substr(0, sp));
    clock_part = trim(t.substr(sp + 1));
  }
  time::CalendarStamp stamp;
  try {
    time::DateExpr de = time::parse_date_expr(date_part);
    if (de.kind != time::DateExpr::Kind::Date)
      throw SessionError("speech time must start with a date: " + text);
    stamp.date = de.date;
    if (!clock_part.empty()) {
      time::DateExpr te = time::parse_date_expr(clock_part);
      if (te.kind != time::DateExpr::Kind::TimeOfDay)
        throw SessionError("speech time clock part is not a time: " + text);
      stamp.hour = te.hour;
      stamp.minute = te.minute;
    }
    std::optional<time::TimePoint> p = time::point_of_stamp(stamp, axis);
    if (!p)
      throw SessionError("speech time " + text +
                         " is outside the database axis");
    return *p;
  } catch (const time::TimeError& e) {
    throw SessionError(std::string("bad speech time '") + text +
                       "': " + e.what());
  }
}

Session open_session(const SessionConfig& config) {
  Session s;
  s.config = config;
  try {
    s.database = db::load_database_file(config.db_path);
  } catch (const SessionError&) {
    throw;
  } catch (const std::exception& e) {
    throw SessionError("database " + config.db_path + ": " + e.what());
  }
  try {
    s.lexicon = lex::load_lexicon(read_file(config.lexicon_path, "lexicon"));
  } catch (const SessionError&) {
    throw;
  } catch (const std::exception& e) {
    throw SessionError("lexicon " + config.lexicon_path + ": " + e.what());
  }
  s.st = resolve_now(config.now, s.database.axis);
  cross_check(s.lexicon, s.database);
  return s;
}

Outcome answer_question(const Session& s, const std::string& question,
                        std::ostream& out) {
  Outcome outcome;
  std::vector<top::FormulaPtr> readings;
  try {
    readings = gram::analyze(question, s.lexicon);
  } catch (const gram::GramError& e) {
    out << "error: " << e.what() << "\n";
    outcome.user_error = true;
    return outcome;
  } catch (const time::TimeError& e) {
    out << "error: " << e.what() << "\n";
    outcome.user_error = true;
    return outcome;
  }
  if (s.config.first_reading_only && readings.size() > 1) readings.resize(1);
  bool label = readings.size() > 1;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    const top::FormulaPtr& f = readings[i];
    if (label) out << "reading " << (i + 1) << ":\n";
    try {
      validate_dates(f, s.database.axis);
      if (s.config.show_top) out << top::render_formula(f) << "\n";
      alg::AlgExprPtr tree;
      if (s.config.show_tsql2 || s.config.check)
        tree = alg::translate(f, s.st, s.database.axis);
      if (s.config.show_tsql2)
        out << tsql2::render_tsql2(tree, s.database.axis) << "\n";
      eval::Answer reference = eval::eval(s.database, f, s.st);
      out << eval::render_answer(reference, s.database.axis) << "\n";
      if (s.config.check) {
        eval::Answer compiled = alg::eval_alg(s.database, tree);
        if (compiled == reference) {
          out << "CHECK OK\n";
        } else {
          outcome.divergence = true;
          out << "CHECK DIVERGENCE: reading " << (i + 1) << " of \""
              << question << "\"\n";
          out << "reference answer:\n"
              << eval::render_answer(reference, s.database.axis) << "\n";
          out << "algebra answer:\n"
              << eval::render_answer(compiled, s.database.axis) << "\n";
        }
      }
    } catch (const time::TimeError& e) {
      out << "error: " << e.what() << "\n";
      outcome.user_error = true;
    } catch (const std::exception& e) {
      out << "error: " << e.what() << "\n";
      outcome.internal_error = true;
    }
  }
  return outcome;
}

namespace {

int exit_status(const Session& s, bool any_internal, bool any_divergence) {
  if (s.config.check && any_divergence) return 2;
  return any_internal ? 1 : 0;
}

}  // namespace

int run_repl(const Session& s, std::istream& in, std::ostream& out) {
  bool any_internal = false;
  bool any_divergence = false;
  std::string line;
  for (;;) {
    out << "> " << std::flush;
    if (!std::getline(in, line)) {
      out << "\n";
      break;
    }
    std::string q = trim(line);
    if (q == ":quit") break;
    if (q.empty() || q[0] == '#') continue;
    Outcome o = answer_question(s, q, out);
    any_internal = any_internal || o.internal_error;
    any_divergence = any_divergence || o.divergence;
  }
  return exit_status(s, any_internal, any_divergence);
}

int run_batch(const Session& s, std::istream& questions, std::ostream& out) {
  bool any_internal = false;
  bool any_divergence = false;
  int failed = 0;
  std::string line;
  while (std::getline(questions, line)) {
    std::string q = trim(line);
    if (q.empty() || q[0] == '#') continue;
    out << "> " << q << "\n";
    Outcome o = answer_question(s, q, out);
    if (o.user_error || o.internal_error) ++failed;
    any_internal = any_internal || o.internal_error;
    any_divergence = any_divergence || o.divergence;
  }
  if (failed > 0) out << failed << " question(s) failed\n";
  return exit_status(s, any_internal, any_divergence);
}

}  // namespace tqa::cli
