// Temporal-operator formula language (TOP): the meaning representation that
// questions compile into and both evaluation paths consume.
//
// F := PRED | Culm[F] | Begin[F] | End[F] | Past[VAR, F] | Pres[VAR, F]
//    | Perf[VAR, F] | At[PATTERN, F] | For[UNIT, INT, F]
//    | exists VAR REST F | ? VAR REST F | ?mxl VAR F
//
// Restrictions are predicate lists joined by "and"; there is no free-standing
// conjunction.  Event variables index tense/perfect operators; entity
// variables fill predicate argument slots.
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tqa/time.hpp"

namespace tqa::top {

enum class VerbClass { State, Activity, CulmActivity, Point, Timeless };

std::string verb_class_name(VerbClass c);
std::optional<VerbClass> verb_class_from_name(std::string_view name);

enum class VarKind { Entity, Event };

struct Variable {
  std::string name;
  VarKind kind = VarKind::Entity;
  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

// A predicate argument: constant symbol or entity variable.
struct Term {
  bool is_var = false;
  std::string text;
  friend bool operator==(const Term&, const Term&) = default;
};

inline Term constant(std::string s) { return Term{false, std::move(s)}; }
inline Term var(std::string s) { return Term{true, std::move(s)}; }

enum class Op {
  Pred, Culm, Begin, End, Past, Pres, Perf, At, For,
  Exists, Interrog, InterrogMxl,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Op op = Op::Pred;
  // Op::Pred
  std::string pred;
  std::vector<Term> args;
  // event variable (Past/Pres/Perf/InterrogMxl) or entity variable
  // (Exists/Interrog)
  std::string var;
  time::DateExpr pattern;  // Op::At
  time::Unit unit = time::Unit::Day;  // Op::For
  long count = 0;                     // Op::For
  std::vector<FormulaPtr> restriction;  // Exists/Interrog: Pred nodes
  FormulaPtr child;
};

FormulaPtr make_pred(std::string pred, std::vector<Term> args);
FormulaPtr make_culm(FormulaPtr pred);  // child must be Op::Pred
FormulaPtr make_begin(FormulaPtr f);
FormulaPtr make_end(FormulaPtr f);
FormulaPtr make_past(std::string event_var, FormulaPtr f);
FormulaPtr make_pres(std::string event_var, FormulaPtr f);
FormulaPtr make_perf(std::string event_var, FormulaPtr f);
FormulaPtr make_at(time::DateExpr pattern, FormulaPtr f);
FormulaPtr make_for(time::Unit unit, long count, FormulaPtr f);
FormulaPtr make_exists(std::string entity_var, std::vector<FormulaPtr> restriction,
                       FormulaPtr body);
FormulaPtr make_interrog(std::string entity_var, std::vector<FormulaPtr> restriction,
                         FormulaPtr body);
FormulaPtr make_interrog_mxl(std::string event_var, FormulaPtr body);

bool equal(const FormulaPtr& a, const FormulaPtr& b);

// Signature table used by the well-formedness check: predicate name to
// arity and verb class.  Built from a lexicon or from database relations.
struct PredSig {
  int arity = 0;
  VerbClass cls = VerbClass::State;
};
using SymbolTable = std::map<std::string, PredSig>;

struct FormulaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Returns the list of violations (empty means well-formed): unknown or
// misused predicates, Culm over non-culminating predicates, reused event
// variables, unbound or rebound variables, interrogative-maximal misuse.
std::vector<std::string> well_formed(const FormulaPtr& f, const SymbolTable& syms);

// Removes Culm everywhere below a For operator (through any intervening
// operators).  Idempotent; preserves well-formedness and free variables.
FormulaPtr cancel_culm_under_for(const FormulaPtr& f);

// Free entity variables, sorted by name.
std::vector<Variable> free_vars(const FormulaPtr& f);

// Canonical text; parse_formula(render_formula(f)) is structurally equal
// to f, and structurally equal formulae render identically.
std::string render_formula(const FormulaPtr& f);

// Throws FormulaError with a character offset on syntax errors.
FormulaPtr parse_formula(std::string_view text);

// Renames bound variables into a canonical scheme (entity x1.., event e1..,
// assigned in traversal order); alpha-equivalent formulae canonicalize to
// structurally equal trees.
FormulaPtr alpha_canonical(const FormulaPtr& f);

inline bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  return equal(alpha_canonical(a), alpha_canonical(b));
}

}  // namespace tqa::top
