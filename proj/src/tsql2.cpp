#include "tqa/tsql2.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string_view>
#include <vector>

namespace tqa::tsql2 {

namespace {

using alg::AlgExprPtr;
using alg::AlgOp;

std::string upper(std::string s) {
  for (char& c : s) c = char(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// Entity variables whose columns a block exposes to enclosing blocks.
void exposed_vars(const AlgExprPtr& a, std::set<std::string>& out) {
  switch (a->op) {
    case AlgOp::Scan:
      for (const auto& t : a->pattern)
        if (t.is_var) out.insert(t.text);
      return;
    case AlgOp::EntityJoin:
      out.insert(a->var);
      for (const auto& r : a->restrictions) exposed_vars(r, out);
      exposed_vars(a->child, out);
      return;
    default:
      if (a->child) exposed_vars(a->child, out);
      return;
  }
}

struct Emitter {
  const time::Axis& axis;
  int next_alias = 1;

  std::string alias() { return "a" + std::to_string(next_alias++); }

  std::string period_literal(time::Period p) const {
    return "PERIOD '" + time::render_period(p, axis) + "'";
  }

  std::string window_text(const time::TemporalSet& w) const {
    if (w.periods.empty()) return "empty";
    std::string out;
    for (std::size_t i = 0; i < w.periods.size(); ++i) {
      if (i) out += ";";
      out += time::render_period(w.periods[i], axis);
    }
    return out;
  }

  // Condition keeping rows of `al` inside the window.  A prefix window of
  // the axis reads as strict precedence of the first excluded point.
  std::string window_condition(const std::string& al,
                               const time::TemporalSet& w) const {
    if (w.periods.empty()) return "1 = 0";
    if (w.periods.size() == 1 && w.periods[0].start == 0 &&
        w.periods[0].end < axis.horizon) {
      time::TimePoint next = w.periods[0].end + 1;
      return "VALID(" + al + ") PRECEDES " + period_literal({next, next});
    }
    std::string out;
    for (std::size_t i = 0; i < w.periods.size(); ++i) {
      if (i) out += " OR ";
      out += period_literal(w.periods[i]) + " CONTAINS VALID(" + al + ")";
    }
    return w.periods.size() > 1 ? "(" + out + ")" : out;
  }

  void indent_into(std::vector<std::string>& out,
                   const std::vector<std::string>& block) {
    for (const auto& line : block) out.push_back("  " + line);
  }

  std::vector<std::string> scan_block(const AlgExprPtr& a) {
    std::string t = alias();
    std::vector<std::string> out;
    std::string args;
    for (std::size_t i = 0; i < a->pattern.size(); ++i) {
      if (i) args += ", ";
      args += a->pattern[i].text;
    }
    out.push_back("-- TOP: " + a->pred + "(" + args + ")");
    std::string sel;
    std::set<std::string> named;
    for (std::size_t i = 0; i < a->pattern.size(); ++i) {
      if (i) sel += ", ";
      sel += t + ".arg" + std::to_string(i + 1);
      if (a->pattern[i].is_var && named.insert(a->pattern[i].text).second)
        sel += " AS " + a->pattern[i].text;
    }
    out.push_back("SELECT " + sel);
    out.push_back("FROM " + upper(a->pred) + " AS " + t);
    std::vector<std::string> conds;
    std::map<std::string, std::size_t> first_var;
    for (std::size_t i = 0; i < a->pattern.size(); ++i) {
      const top::Term& term = a->pattern[i];
      if (!term.is_var) {
        conds.push_back(t + ".arg" + std::to_string(i + 1) + " = '" +
                        term.text + "'");
      } else {
        auto [it, fresh] = first_var.emplace(term.text, i);
        if (!fresh)
          conds.push_back(t + ".arg" + std::to_string(i + 1) + " = " + t +
                          ".arg" + std::to_string(it->second + 1));
      }
    }
    for (std::size_t i = 0; i < conds.size(); ++i)
      out.push_back((i == 0 ? "WHERE " : "  AND ") + conds[i]);
    return out;
  }

  std::vector<std::string> block(const AlgExprPtr& a) {
    std::vector<std::string> out;
    switch (a->op) {
      case AlgOp::Scan:
        return scan_block(a);
      case AlgOp::CulmSelect: {
        std::string t = alias();
        out.push_back("-- TOP: culminated event");
        out.push_back("SELECT " + t + ".*");
        out.push_back("FROM (");
        indent_into(out, block(a->child));
        out.push_back(") AS " + t);
        out.push_back("WHERE END(VALID(" + t + ")) = " + t + ".climax");
        return out;
      }
      case AlgOp::WindowRestrict: {
        std::string t = alias();
        out.push_back("-- TOP: window " + window_text(a->window));
        out.push_back("SELECT " + t + ".*");
        out.push_back("FROM (");
        indent_into(out, block(a->child));
        out.push_back(") AS " + t);
        out.push_back("WHERE " + window_condition(t, a->window));
        return out;
      }
      case AlgOp::BeginPoints:
      case AlgOp::EndPoints: {
        const bool begin = a->op == AlgOp::BeginPoints;
        std::string t = alias();
        std::string fn = begin ? "BEGIN" : "END";
        out.push_back(std::string("-- TOP: ") + (begin ? "begin" : "end") +
                      " points");
        out.push_back("SELECT " + t + ".*");
        out.push_back("FROM (");
        indent_into(out, block(a->child));
        out.push_back(") AS " + t);
        out.push_back("VALID PERIOD(" + fn + "(VALID(" + t + ")), " + fn +
                      "(VALID(" + t + ")))");
        return out;
      }
      case AlgOp::SubperiodsOfDuration: {
        std::string t = alias();
        out.push_back("-- TOP: duration " + std::to_string(a->points) +
                      " points");
        out.push_back("SELECT " + t + ".*");
        out.push_back("FROM (");
        indent_into(out, block(a->child));
        out.push_back(") AS " + t);
        out.push_back("WHERE DURATION(VALID(" + t +
                      ")) = " + std::to_string(a->points));
        return out;
      }
      case AlgOp::PrecedesJoin: {
        std::string tc = alias();
        std::string tx = alias();
        out.push_back("-- TOP: perfect, reference window " +
                      window_text(a->window));
        out.push_back("SELECT " + tc + ".*");
        out.push_back("FROM (");
        indent_into(out, block(a->child));
        out.push_back(") AS " + tc + ", AXIS AS " + tx);
        out.push_back("WHERE VALID(" + tc + ") PRECEDES VALID(" + tx + ")");
        out.push_back("  AND " + window_condition(tx, a->window));
        out.push_back("VALID VALID(" + tx + ")");
        return out;
      }
      case AlgOp::EntityJoin: {
        out.push_back("-- TOP: bind " + a->var);
        struct Item {
          std::string al;
          bool binds;
          const AlgExprPtr* tree;  // null for the ENTITIES pseudo-table
        };
        std::vector<Item> items;
        for (const auto& r : a->restrictions) {
          std::set<std::string> vars;
          exposed_vars(r, vars);
          items.push_back({alias(), vars.count(a->var) > 0, &r});
        }
        std::set<std::string> body_vars;
        exposed_vars(a->child, body_vars);
        Item body{alias(), body_vars.count(a->var) > 0, &a->child};
        bool any_binds =
            body.binds || std::any_of(items.begin(), items.end(),
                                      [](const Item& i) { return i.binds; });
        std::string entities_alias;
        if (!any_binds) entities_alias = alias();

        std::string sel;
        if (!any_binds)
          sel = entities_alias + ".entity AS " + a->var + ", ";
        for (const Item& i : items) sel += i.al + ".*, ";
        sel += body.al + ".*";
        out.push_back("SELECT " + sel);

        std::vector<const Item*> all;
        for (const Item& i : items) all.push_back(&i);
        all.push_back(&body);
        for (std::size_t k = 0; k < all.size(); ++k) {
          out.push_back(k == 0 ? "FROM ("
                               : ") AS " + all[k - 1]->al + ", (");
          indent_into(out, block(*all[k]->tree));
        }
        out.push_back(") AS " + body.al +
                      (entities_alias.empty()
                           ? ""
                           : ", ENTITIES AS " + entities_alias));

        // Equate every alias that binds the variable.
        std::vector<std::string> binders;
        for (const Item& i : items)
          if (i.binds) binders.push_back(i.al);
        if (body.binds) binders.push_back(body.al);
        if (!entities_alias.empty()) binders.push_back(entities_alias);
        std::vector<std::string> conds;
        for (std::size_t i = 1; i < binders.size(); ++i) {
          auto col = [&](const std::string& al) {
            return al + (al == entities_alias ? ".entity" : "." + a->var);
          };
          conds.push_back(col(binders[i - 1]) + " = " + col(binders[i]));
        }
        for (std::size_t i = 0; i < conds.size(); ++i)
          out.push_back((i == 0 ? "WHERE " : "  AND ") + conds[i]);
        return out;
      }
      case AlgOp::Collect: {
        switch (a->kind) {
          case alg::CollectKind::Bool: {
            out.push_back("-- TOP: answer yes/no");
            out.push_back("SELECT SNAPSHOT 'yes'");
            out.push_back("WHERE EXISTS (");
            indent_into(out, block(a->child));
            out.push_back(")");
            return out;
          }
          case alg::CollectKind::Bindings: {
            std::string t = alias();
            std::string cols;
            for (std::size_t i = 0; i < a->columns.size(); ++i) {
              if (i) cols += ", ";
              cols += t + "." + a->columns[i];
            }
            std::string names;
            for (std::size_t i = 0; i < a->columns.size(); ++i) {
              if (i) names += ", ";
              names += a->columns[i];
            }
            out.push_back("-- TOP: answer " + names);
            out.push_back("SELECT SNAPSHOT DISTINCT " + cols);
            out.push_back("FROM (");
            indent_into(out, block(a->child));
            out.push_back(") AS " + t);
            return out;
          }
          case alg::CollectKind::Maximal: {
            std::string t = alias();
            std::string anti = alias();
            std::string head;
            for (const auto& c : a->columns) head += t + "." + c + ", ";
            head += "VALID(" + t + ")";
            out.push_back("-- TOP: answer maximal " +
                          a->period_var.value_or("period"));
            out.push_back("SELECT DISTINCT " + head);
            out.push_back("FROM (");
            indent_into(out, block(a->child));
            out.push_back(") AS " + t);
            out.push_back("WHERE NOT EXISTS (");
            std::vector<std::string> sub;
            sub.push_back("SELECT " + anti + ".*");
            sub.push_back("FROM (");
            indent_into(sub, block(a->child));
            sub.push_back(") AS " + anti);
            sub.push_back("WHERE VALID(" + anti + ") CONTAINS VALID(" + t +
                          ")");
            sub.push_back("  AND VALID(" + anti + ") <> VALID(" + t + ")");
            for (const auto& g : a->group_vars)
              sub.push_back("  AND " + anti + "." + g + " = " + t + "." + g);
            indent_into(out, sub);
            out.push_back(")");
            return out;
          }
        }
        throw Tsql2Error("unhandled collect kind");
      }
    }
    throw Tsql2Error("unhandled node");
  }
};

}  // namespace

std::string render_tsql2(const AlgExprPtr& a, const time::Axis& axis) {
  Emitter em{axis};
  std::string out;
  for (const auto& line : em.block(a)) {
    out += line;
    out += "\n";
  }
  return out;
}

std::string emit_tsql2(const top::FormulaPtr& f, time::TimePoint st,
                       const time::Axis& axis) {
  return render_tsql2(alg::translate(f, st, axis), axis);
}

// ---------------------------------------------------------------------------
// Subset reparser.

namespace {

struct Token {
  enum Kind { Ident, Number, Str, Sym, End } kind = End;
  std::string text;  // idents uppercased for keyword checks lose nothing:
                     // the grammar never compares case-sensitively
  int line = 1;
};

struct Lexer {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;
  std::vector<Token> tokens;

  void run() {
    while (pos < src.size()) {
      char c = src[pos];
      if (c == '\n') {
        ++line, ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '-' && pos + 1 < src.size() && src[pos + 1] == '-') {
        while (pos < src.size() && src[pos] != '\n') ++pos;
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::size_t s = pos;
        while (pos < src.size() &&
               (std::isalnum(static_cast<unsigned char>(src[pos])) ||
                src[pos] == '_'))
          ++pos;
        tokens.push_back({Token::Ident,
                          std::string(src.substr(s, pos - s)), line});
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        std::size_t s = pos;
        while (pos < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[pos])))
          ++pos;
        tokens.push_back({Token::Number,
                          std::string(src.substr(s, pos - s)), line});
      } else if (c == '\'') {
        std::size_t s = ++pos;
        while (pos < src.size() && src[pos] != '\'' && src[pos] != '\n') ++pos;
        if (pos >= src.size() || src[pos] != '\'')
          throw Tsql2Error("line " + std::to_string(line) +
                           ": unterminated string literal");
        tokens.push_back({Token::Str, std::string(src.substr(s, pos - s)),
                          line});
        ++pos;
      } else if (c == '<' && pos + 1 < src.size() && src[pos + 1] == '>') {
        tokens.push_back({Token::Sym, "<>", line});
        pos += 2;
      } else if (std::string("(),.*=").find(c) != std::string::npos) {
        tokens.push_back({Token::Sym, std::string(1, c), line});
        ++pos;
      } else {
        throw Tsql2Error("line " + std::to_string(line) +
                         ": unexpected character '" + std::string(1, c) + "'");
      }
    }
    tokens.push_back({Token::End, "", line});
  }
};

struct Parser {
  std::vector<Token> ts;
  std::size_t i = 0;
  int blocks = 0;

  [[noreturn]] void fail(const std::string& what) {
    throw Tsql2Error("line " + std::to_string(ts[i].line) + ": expected " +
                     what);
  }
  const Token& peek() const { return ts[i]; }
  bool is_kw(const char* kw) const {
    return ts[i].kind == Token::Ident && upper(ts[i].text) == kw;
  }
  bool eat_kw(const char* kw) {
    if (!is_kw(kw)) return false;
    ++i;
    return true;
  }
  bool eat_sym(const char* s) {
    if (ts[i].kind != Token::Sym || ts[i].text != s) return false;
    ++i;
    return true;
  }
  void need_sym(const char* s) {
    if (!eat_sym(s)) fail(std::string("'") + s + "'");
  }
  std::string need_ident() {
    if (ts[i].kind != Token::Ident) fail("an identifier");
    return ts[i++].text;
  }

  // expr := PERIOD str | PERIOD(expr, expr) | FUNC(expr...) | ident[.col]
  //       | number | string
  void expr() {
    if (is_kw("PERIOD")) {
      ++i;
      if (peek().kind == Token::Str) {
        ++i;
        return;
      }
      need_sym("(");
      expr();
      need_sym(",");
      expr();
      need_sym(")");
      return;
    }
    if (is_kw("VALID") || is_kw("BEGIN") || is_kw("END") ||
        is_kw("DURATION")) {
      ++i;
      need_sym("(");
      expr();
      need_sym(")");
      return;
    }
    if (peek().kind == Token::Number || peek().kind == Token::Str) {
      ++i;
      return;
    }
    if (peek().kind == Token::Ident) {
      ++i;
      if (eat_sym(".")) {
        if (!eat_sym("*")) (void)need_ident();
      }
      return;
    }
    fail("an expression");
  }

  void comparison() {
    expr();
    if (eat_sym("=") || eat_sym("<>") || eat_kw("PRECEDES") ||
        eat_kw("CONTAINS") || eat_kw("OVERLAPS")) {
      expr();
      return;
    }
    fail("a comparison operator");
  }

  void atom() {
    if (eat_kw("NOT")) {
      if (!eat_kw("EXISTS")) fail("EXISTS");
      need_sym("(");
      select_block();
      need_sym(")");
      return;
    }
    if (eat_kw("EXISTS")) {
      need_sym("(");
      select_block();
      need_sym(")");
      return;
    }
    if (eat_sym("(")) {
      disjunct();
      need_sym(")");
      return;
    }
    comparison();
  }

  void conjunct() {
    atom();
    while (eat_kw("AND")) atom();
  }

  void disjunct() {
    conjunct();
    while (eat_kw("OR")) conjunct();
  }

  void select_item() {
    expr();
    if (eat_kw("AS")) (void)need_ident();
  }

  void from_item() {
    if (eat_sym("(")) {
      select_block();
      need_sym(")");
    } else {
      (void)need_ident();  // base or pseudo table
    }
    if (!eat_kw("AS")) fail("AS");
    (void)need_ident();
  }

  void select_block() {
    if (!eat_kw("SELECT")) fail("SELECT");
    ++blocks;
    (void)eat_kw("SNAPSHOT");
    (void)eat_kw("DISTINCT");
    select_item();
    while (eat_sym(",")) select_item();
    if (eat_kw("FROM")) {
      from_item();
      while (eat_sym(",")) from_item();
    }
    if (eat_kw("WHERE")) disjunct();
    if (eat_kw("VALID")) expr();
  }
};

}  // namespace

int parse_tsql2(const std::string& text) {
  Lexer lex;
  lex.src = text;
  lex.run();
  Parser p;
  p.ts = std::move(lex.tokens);
  p.select_block();
  if (p.peek().kind != Token::End)
    throw Tsql2Error("line " + std::to_string(p.peek().line) +
                     ": trailing input after the query");
  return p.blocks;
}

}  // namespace tqa::tsql2
