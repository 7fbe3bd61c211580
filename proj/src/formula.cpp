#include "tqa/formula.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <set>

namespace tqa::top {

std::string verb_class_name(VerbClass c) {
  switch (c) {
    case VerbClass::State: return "state";
    case VerbClass::Activity: return "activity";
    case VerbClass::CulmActivity: return "culm_activity";
    case VerbClass::Point: return "point";
    case VerbClass::Timeless: return "timeless";
  }
  return "?";
}

std::optional<VerbClass> verb_class_from_name(std::string_view name) {
  if (name == "state") return VerbClass::State;
  if (name == "activity") return VerbClass::Activity;
  if (name == "culm_activity") return VerbClass::CulmActivity;
  if (name == "point") return VerbClass::Point;
  if (name == "timeless") return VerbClass::Timeless;
  return std::nullopt;
}

namespace {

std::shared_ptr<Formula> node(Op op) {
  auto f = std::make_shared<Formula>();
  f->op = op;
  return f;
}

}  // namespace

FormulaPtr make_pred(std::string pred, std::vector<Term> args) {
  auto f = node(Op::Pred);
  f->pred = std::move(pred);
  f->args = std::move(args);
  return f;
}

FormulaPtr make_culm(FormulaPtr pred) {
  if (!pred || pred->op != Op::Pred)
    throw FormulaError("Culm applies to a predicate");
  auto f = node(Op::Culm);
  f->child = std::move(pred);
  return f;
}

FormulaPtr make_begin(FormulaPtr c) {
  auto f = node(Op::Begin);
  f->child = std::move(c);
  return f;
}

FormulaPtr make_end(FormulaPtr c) {
  auto f = node(Op::End);
  f->child = std::move(c);
  return f;
}

namespace {
FormulaPtr make_indexed(Op op, std::string v, FormulaPtr c) {
  auto f = node(op);
  f->var = std::move(v);
  f->child = std::move(c);
  return f;
}
}  // namespace

FormulaPtr make_past(std::string v, FormulaPtr c) { return make_indexed(Op::Past, std::move(v), std::move(c)); }
FormulaPtr make_pres(std::string v, FormulaPtr c) { return make_indexed(Op::Pres, std::move(v), std::move(c)); }
FormulaPtr make_perf(std::string v, FormulaPtr c) { return make_indexed(Op::Perf, std::move(v), std::move(c)); }

FormulaPtr make_at(time::DateExpr pattern, FormulaPtr c) {
  auto f = node(Op::At);
  f->pattern = pattern;
  f->child = std::move(c);
  return f;
}

FormulaPtr make_for(time::Unit unit, long count, FormulaPtr c) {
  auto f = node(Op::For);
  f->unit = unit;
  f->count = count;
  f->child = std::move(c);
  return f;
}

namespace {
FormulaPtr make_quant(Op op, std::string v, std::vector<FormulaPtr> restriction,
                      FormulaPtr body) {
  for (const auto& r : restriction)
    if (!r || r->op != Op::Pred)
      throw FormulaError("restriction must be a predicate list");
  auto f = node(op);
  f->var = std::move(v);
  f->restriction = std::move(restriction);
  f->child = std::move(body);
  return f;
}
}  // namespace

FormulaPtr make_exists(std::string v, std::vector<FormulaPtr> r, FormulaPtr b) {
  return make_quant(Op::Exists, std::move(v), std::move(r), std::move(b));
}
FormulaPtr make_interrog(std::string v, std::vector<FormulaPtr> r, FormulaPtr b) {
  return make_quant(Op::Interrog, std::move(v), std::move(r), std::move(b));
}
FormulaPtr make_interrog_mxl(std::string v, FormulaPtr b) {
  return make_indexed(Op::InterrogMxl, std::move(v), std::move(b));
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op || a->pred != b->pred || a->args != b->args ||
      a->var != b->var || a->unit != b->unit || a->count != b->count ||
      !(a->pattern == b->pattern) ||
      a->restriction.size() != b->restriction.size())
    return false;
  for (std::size_t i = 0; i < a->restriction.size(); ++i)
    if (!equal(a->restriction[i], b->restriction[i])) return false;
  if (!a->child != !b->child) return false;
  return !a->child || equal(a->child, b->child);
}

// ---------------------------------------------------------------------------
// Well-formedness.

namespace {

struct WfState {
  const SymbolTable& syms;
  std::vector<std::string> out;
  std::set<std::string> entity_binders;   // all entity binder names seen
  std::set<std::string> event_binders;    // all tense/perfect index names seen
  int interrog_mxl_count = 0;

  void note(std::string msg) {
    if (std::find(out.begin(), out.end(), msg) == out.end())
      out.push_back(std::move(msg));
  }
};

void wf_pred(const Formula& f, WfState& st, const std::set<std::string>& scope) {
  auto it = st.syms.find(f.pred);
  if (it == st.syms.end()) {
    st.note("unknown predicate " + f.pred);
  } else if (static_cast<int>(f.args.size()) != it->second.arity) {
    st.note("arity mismatch for " + f.pred + ": expected " +
            std::to_string(it->second.arity) + ", got " +
            std::to_string(f.args.size()));
  }
  for (const Term& t : f.args)
    if (t.is_var && !scope.count(t.text)) st.note("unbound variable " + t.text);
}

// scope: entity variables in scope; mxl_var: interrogative-maximal variable
// whose indexed tense operator we are still looking for (counted via hits).
void wf_walk(const FormulaPtr& f, WfState& st, std::set<std::string> scope,
             const std::string& mxl_var, int& mxl_hits) {
  switch (f->op) {
    case Op::Pred:
      wf_pred(*f, st, scope);
      return;
    case Op::Culm: {
      if (f->child->op != Op::Pred) {
        st.note("Culm applies to a predicate");
      } else {
        auto it = st.syms.find(f->child->pred);
        if (it != st.syms.end() && it->second.cls != VerbClass::CulmActivity)
          st.note("Culm over non-culminating predicate " + f->child->pred);
      }
      wf_walk(f->child, st, scope, mxl_var, mxl_hits);
      return;
    }
    case Op::Begin:
    case Op::End:
      wf_walk(f->child, st, scope, mxl_var, mxl_hits);
      return;
    case Op::Past:
    case Op::Pres:
    case Op::Perf: {
      bool is_tense = f->op != Op::Perf;
      if (f->var == mxl_var && !mxl_var.empty()) {
        if (is_tense)
          ++mxl_hits;
        else
          st.note("interrogative-maximal variable " + f->var +
                  " must index a tense operator");
      } else {
        if (!st.event_binders.insert(f->var).second)
          st.note("event variable " + f->var + " reused");
        if (st.entity_binders.count(f->var))
          st.note("variable name " + f->var + " used for both kinds");
      }
      wf_walk(f->child, st, scope, mxl_var, mxl_hits);
      return;
    }
    case Op::At:
    case Op::For:
      if (f->op == Op::For && f->count < 1) st.note("non-positive duration count");
      wf_walk(f->child, st, scope, mxl_var, mxl_hits);
      return;
    case Op::Exists:
    case Op::Interrog: {
      if (!st.entity_binders.insert(f->var).second)
        st.note("entity variable " + f->var + " rebound");
      if (st.event_binders.count(f->var))
        st.note("variable name " + f->var + " used for both kinds");
      scope.insert(f->var);
      for (const auto& r : f->restriction) {
        if (r->op != Op::Pred)
          st.note("restriction must be a predicate list");
        else
          wf_pred(*r, st, scope);
      }
      wf_walk(f->child, st, scope, mxl_var, mxl_hits);
      return;
    }
    case Op::InterrogMxl: {
      ++st.interrog_mxl_count;
      if (st.interrog_mxl_count > 1) {
        st.note("multiple interrogative-maximal quantifiers");
        wf_walk(f->child, st, scope, mxl_var, mxl_hits);
        return;
      }
      if (!st.event_binders.insert(f->var).second)
        st.note("event variable " + f->var + " reused");
      int hits = 0;
      wf_walk(f->child, st, scope, f->var, hits);
      if (hits != 1)
        st.note("interrogative-maximal variable " + f->var +
                " must index exactly one tense operator (found " +
                std::to_string(hits) + ")");
      return;
    }
  }
}

}  // namespace

std::vector<std::string> well_formed(const FormulaPtr& f, const SymbolTable& syms) {
  WfState st{syms, {}, {}, {}, 0};
  int hits = 0;
  wf_walk(f, st, {}, "", hits);
  return st.out;
}

// ---------------------------------------------------------------------------

namespace {

FormulaPtr cancel_walk(const FormulaPtr& f, bool under_for) {
  switch (f->op) {
    case Op::Pred:
      return f;
    case Op::Culm:
      if (under_for) return cancel_walk(f->child, under_for);
      return f;
    default: {
      bool next = under_for || f->op == Op::For;
      FormulaPtr child = f->child ? cancel_walk(f->child, next) : nullptr;
      if (child == f->child) return f;
      auto g = std::make_shared<Formula>(*f);
      g->child = std::move(child);
      return g;
    }
  }
}

}  // namespace

FormulaPtr cancel_culm_under_for(const FormulaPtr& f) {
  return cancel_walk(f, false);
}

std::vector<Variable> free_vars(const FormulaPtr& f) {
  std::set<std::string> out;
  std::function<void(const FormulaPtr&, std::set<std::string>)> walk =
      [&](const FormulaPtr& g, std::set<std::string> scope) {
        if (g->op == Op::Pred) {
          for (const Term& t : g->args)
            if (t.is_var && !scope.count(t.text)) out.insert(t.text);
          return;
        }
        if (g->op == Op::Exists || g->op == Op::Interrog) {
          scope.insert(g->var);
          for (const auto& r : g->restriction)
            for (const Term& t : r->args)
              if (t.is_var && !scope.count(t.text)) out.insert(t.text);
        }
        if (g->child) walk(g->child, scope);
      };
  walk(f, {});
  std::vector<Variable> vars;
  for (const std::string& n : out) vars.push_back({n, VarKind::Entity});
  return vars;
}

// ---------------------------------------------------------------------------
// Rendering.

namespace {

void render_walk(const FormulaPtr& f, std::string& out) {
  switch (f->op) {
    case Op::Pred: {
      out += f->pred;
      out += '(';
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ", ";
        out += f->args[i].text;
      }
      out += ')';
      return;
    }
    case Op::Culm:
    case Op::Begin:
    case Op::End: {
      out += f->op == Op::Culm ? "Culm[" : f->op == Op::Begin ? "Begin[" : "End[";
      render_walk(f->child, out);
      out += ']';
      return;
    }
    case Op::Past:
    case Op::Pres:
    case Op::Perf: {
      out += f->op == Op::Past ? "Past[" : f->op == Op::Pres ? "Pres[" : "Perf[";
      out += f->var;
      out += ", ";
      render_walk(f->child, out);
      out += ']';
      return;
    }
    case Op::At: {
      out += "At[\"";
      out += time::render_date_expr(f->pattern);
      out += "\", ";
      render_walk(f->child, out);
      out += ']';
      return;
    }
    case Op::For: {
      out += "For[";
      out += time::unit_name(f->unit);
      out += ", ";
      out += std::to_string(f->count);
      out += ", ";
      render_walk(f->child, out);
      out += ']';
      return;
    }
    case Op::Exists:
    case Op::Interrog: {
      out += f->op == Op::Exists ? "exists " : "? ";
      out += f->var;
      out += ' ';
      for (const auto& r : f->restriction) {
        render_walk(r, out);
        out += " and ";
      }
      render_walk(f->child, out);
      return;
    }
    case Op::InterrogMxl: {
      out += "?mxl ";
      out += f->var;
      out += ' ';
      render_walk(f->child, out);
      return;
    }
  }
}

}  // namespace

std::string render_formula(const FormulaPtr& f) {
  std::string out;
  render_walk(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

struct Token {
  enum class Kind { Ident, Number, LBrack, RBrack, LParen, RParen, Comma,
                    Colon, Quoted, Quest, QuestMxl, End } kind;
  std::string text;
  std::size_t pos = 0;
};

struct Lexer {
  std::string_view src;
  std::size_t i = 0;
  std::vector<Token> tokens;

  [[noreturn]] void fail(std::size_t pos, const std::string& msg) {
    throw FormulaError("parse error at offset " + std::to_string(pos) + ": " + msg);
  }

  void run() {
    while (i < src.size()) {
      char c = src[i];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
      std::size_t start = i;
      if (c == '[') { tokens.push_back({Token::Kind::LBrack, "[", start}); ++i; continue; }
      if (c == ']') { tokens.push_back({Token::Kind::RBrack, "]", start}); ++i; continue; }
      if (c == '(') { tokens.push_back({Token::Kind::LParen, "(", start}); ++i; continue; }
      if (c == ')') { tokens.push_back({Token::Kind::RParen, ")", start}); ++i; continue; }
      if (c == ',') { tokens.push_back({Token::Kind::Comma, ",", start}); ++i; continue; }
      if (c == ':') { tokens.push_back({Token::Kind::Colon, ":", start}); ++i; continue; }
      if (c == '"') {
        ++i;
        std::size_t j = src.find('"', i);
        if (j == std::string_view::npos) fail(start, "unterminated pattern");
        tokens.push_back({Token::Kind::Quoted, std::string(src.substr(i, j - i)), start});
        i = j + 1;
        continue;
      }
      if (c == '?') {
        if (src.substr(i, 4) == "?mxl") {
          tokens.push_back({Token::Kind::QuestMxl, "?mxl", start});
          i += 4;
        } else {
          tokens.push_back({Token::Kind::Quest, "?", start});
          ++i;
        }
        continue;
      }
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t j = i;
        while (j < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
          ++j;
        std::string text(src.substr(i, j - i));
        bool digits = std::all_of(text.begin(), text.end(),
                                  [](char d) { return d >= '0' && d <= '9'; });
        tokens.push_back({digits ? Token::Kind::Number : Token::Kind::Ident, text, start});
        i = j;
        continue;
      }
      fail(start, std::string("unexpected character '") + c + "'");
    }
    tokens.push_back({Token::Kind::End, "", src.size()});
  }
};

struct Parser {
  std::vector<Token> ts;
  std::size_t i = 0;
  std::set<std::string> entity_scope;

  [[noreturn]] void fail(const std::string& msg) {
    throw FormulaError("parse error at offset " + std::to_string(ts[i].pos) + ": " + msg);
  }

  const Token& peek() const { return ts[i]; }
  Token take() { return ts[i++]; }

  void expect(Token::Kind k, const char* what) {
    if (peek().kind != k) fail(std::string("expected ") + what);
    ++i;
  }

  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::Number)
      fail(std::string("expected ") + what);
    return take().text;
  }

  bool starts_formula() const {
    switch (peek().kind) {
      case Token::Kind::Ident:
        return peek().text != "and";
      case Token::Kind::Quest:
      case Token::Kind::QuestMxl:
        return true;
      default:
        return false;
    }
  }

  FormulaPtr parse_pred_tail(const std::string& name) {
    expect(Token::Kind::LParen, "'('");
    std::vector<Term> args;
    if (peek().kind != Token::Kind::RParen) {
      while (true) {
        std::string t = ident("argument");
        args.push_back(entity_scope.count(t) ? var(t) : constant(t));
        if (peek().kind == Token::Kind::Comma) { ++i; continue; }
        break;
      }
    }
    expect(Token::Kind::RParen, "')'");
    return make_pred(name, std::move(args));
  }

  FormulaPtr parse_bracketed(Op op) {
    expect(Token::Kind::LBrack, "'['");
    FormulaPtr out;
    switch (op) {
      case Op::Culm: {
        FormulaPtr f = parse_formula();
        if (f->op != Op::Pred) fail("Culm applies to a predicate");
        out = make_culm(f);
        break;
      }
      case Op::Begin:
        out = make_begin(parse_formula());
        break;
      case Op::End:
        out = make_end(parse_formula());
        break;
      case Op::Past:
      case Op::Pres:
      case Op::Perf: {
        std::string v = ident("event variable");
        expect(Token::Kind::Comma, "','");
        FormulaPtr f = parse_formula();
        out = op == Op::Past   ? make_past(v, f)
              : op == Op::Pres ? make_pres(v, f)
                               : make_perf(v, f);
        break;
      }
      case Op::At: {
        if (peek().kind != Token::Kind::Quoted) fail("expected quoted pattern");
        std::size_t at = peek().pos;
        std::string raw = take().text;
        time::DateExpr e;
        try {
          e = time::parse_date_expr(raw);
        } catch (const time::TimeError& err) {
          throw FormulaError("parse error at offset " + std::to_string(at) + ": " +
                             err.what());
        }
        expect(Token::Kind::Comma, "','");
        out = make_at(e, parse_formula());
        break;
      }
      case Op::For: {
        std::string u = ident("duration unit");
        auto unit = time::unit_from_name(u);
        if (!unit) fail("unknown duration unit '" + u + "'");
        expect(Token::Kind::Comma, "','");
        if (peek().kind != Token::Kind::Number) fail("expected count");
        long n = std::stol(take().text);
        expect(Token::Kind::Comma, "','");
        out = make_for(*unit, n, parse_formula());
        break;
      }
      default:
        fail("internal operator dispatch");
    }
    expect(Token::Kind::RBrack, "']'");
    return out;
  }

  FormulaPtr parse_quant(Op op) {
    std::string v = ident("variable");
    if (op == Op::InterrogMxl) return make_interrog_mxl(v, parse_formula());

    bool added = entity_scope.insert(v).second;
    std::vector<FormulaPtr> items;
    items.push_back(parse_formula());
    while (peek().kind == Token::Kind::Ident && peek().text == "and") {
      ++i;
      items.push_back(parse_formula());
    }
    FormulaPtr body;
    std::vector<FormulaPtr> restriction;
    if (peek().kind == Token::Kind::Colon) {
      ++i;
      restriction = std::move(items);
      body = parse_formula();
    } else if (starts_formula()) {
      restriction = std::move(items);
      body = parse_formula();
    } else {
      body = items.back();
      items.pop_back();
      restriction = std::move(items);
    }
    for (const auto& r : restriction)
      if (r->op != Op::Pred) fail("restriction must be a predicate list");
    if (added) entity_scope.erase(v);
    return op == Op::Exists ? make_exists(v, std::move(restriction), body)
                            : make_interrog(v, std::move(restriction), body);
  }

  FormulaPtr parse_formula() {
    const Token& t = peek();
    switch (t.kind) {
      case Token::Kind::Quest:
        ++i;
        return parse_quant(Op::Interrog);
      case Token::Kind::QuestMxl:
        ++i;
        return parse_quant(Op::InterrogMxl);
      case Token::Kind::Ident: {
        std::string name = take().text;
        if (name == "exists") return parse_quant(Op::Exists);
        if (name == "Culm") return parse_bracketed(Op::Culm);
        if (name == "Begin") return parse_bracketed(Op::Begin);
        if (name == "End") return parse_bracketed(Op::End);
        if (name == "Past") return parse_bracketed(Op::Past);
        if (name == "Pres") return parse_bracketed(Op::Pres);
        if (name == "Perf") return parse_bracketed(Op::Perf);
        if (name == "At") return parse_bracketed(Op::At);
        if (name == "For") return parse_bracketed(Op::For);
        return parse_pred_tail(name);
      }
      default:
        fail("expected a formula");
    }
  }
};

}  // namespace

FormulaPtr parse_formula(std::string_view text) {
  Lexer lex;
  lex.src = text;
  lex.run();
  Parser p;
  p.ts = std::move(lex.tokens);
  FormulaPtr f = p.parse_formula();
  if (p.peek().kind != Token::Kind::End) p.fail("trailing input");
  return f;
}

// ---------------------------------------------------------------------------
// Alpha canonicalization.

namespace {

struct Renamer {
  std::map<std::string, std::string> entity, event;
  int next_entity = 1, next_event = 1;

  std::string entity_bind(const std::string& v) {
    std::string fresh = "x" + std::to_string(next_entity++);
    entity[v] = fresh;
    return fresh;
  }
  std::string event_bind(const std::string& v) {
    auto it = event.find(v);
    if (it != event.end()) return it->second;  // interrogative-maximal share
    std::string fresh = "e" + std::to_string(next_event++);
    event[v] = fresh;
    return fresh;
  }
};

FormulaPtr canon_walk(const FormulaPtr& f, Renamer& rn) {
  switch (f->op) {
    case Op::Pred: {
      std::vector<Term> args;
      for (const Term& t : f->args) {
        if (t.is_var) {
          auto it = rn.entity.find(t.text);
          args.push_back(var(it != rn.entity.end() ? it->second : t.text));
        } else {
          args.push_back(t);
        }
      }
      return make_pred(f->pred, std::move(args));
    }
    case Op::Culm:
      return make_culm(canon_walk(f->child, rn));
    case Op::Begin:
      return make_begin(canon_walk(f->child, rn));
    case Op::End:
      return make_end(canon_walk(f->child, rn));
    case Op::Past:
    case Op::Pres:
    case Op::Perf: {
      std::string v = rn.event_bind(f->var);
      FormulaPtr c = canon_walk(f->child, rn);
      return f->op == Op::Past   ? make_past(v, c)
             : f->op == Op::Pres ? make_pres(v, c)
                                 : make_perf(v, c);
    }
    case Op::At:
      return make_at(f->pattern, canon_walk(f->child, rn));
    case Op::For:
      return make_for(f->unit, f->count, canon_walk(f->child, rn));
    case Op::Exists:
    case Op::Interrog: {
      // Binder renamed before restriction and body; shadowed outer mapping
      // is intentionally not restored (well-formed formulae never shadow).
      std::string v = rn.entity_bind(f->var);
      std::vector<FormulaPtr> restriction;
      for (const auto& r : f->restriction) restriction.push_back(canon_walk(r, rn));
      FormulaPtr body = canon_walk(f->child, rn);
      return f->op == Op::Exists ? make_exists(v, std::move(restriction), body)
                                 : make_interrog(v, std::move(restriction), body);
    }
    case Op::InterrogMxl: {
      std::string v = rn.event_bind(f->var);
      return make_interrog_mxl(v, canon_walk(f->child, rn));
    }
  }
  throw FormulaError("unreachable");
}

}  // namespace

FormulaPtr alpha_canonical(const FormulaPtr& f) {
  Renamer rn;
  return canon_walk(f, rn);
}

}  // namespace tqa::top
