// Brute-force second implementation of eval(), kept deliberately separate
// from the engine in evaluator.cpp: windows are raw point sets, every
// candidate event time is enumerated, nothing is cached.  Tests compare its
// Answers against eval()'s; it is unusable beyond small axes by design.
#include <functional>

#include "tqa/evaluator.hpp"

namespace tqa::eval {

namespace {

using top::Op;
using PtSet = std::set<time::TimePoint>;

struct OracleBinds {
  std::map<std::string, std::string> ent;
  std::map<std::string, time::Period> ev;
};

struct Oracle {
  const db::Database& d;
  time::TimePoint st;
  time::TimePoint h;

  Oracle(const db::Database& dbase, time::TimePoint speech)
      : d(dbase), st(speech), h(dbase.axis.horizon) {}

  const db::Tuple* find_tuple(const std::string& pred,
                              const std::vector<top::Term>& args,
                              const OracleBinds& b) const {
    auto it = d.relations.find(pred);
    if (it == d.relations.end())
      throw db::DatabaseError("unknown predicate " + pred);
    const db::Relation& rel = it->second;
    if (args.size() != rel.arity)
      throw db::DatabaseError("arity mismatch for " + pred);
    std::vector<std::string> want;
    for (const auto& t : args) {
      if (t.is_var) {
        auto e = b.ent.find(t.text);
        if (e == b.ent.end()) throw EvalError("unbound variable " + t.text);
        want.push_back(e->second);
      } else {
        want.push_back(t.text);
      }
    }
    for (const db::Tuple& tup : rel.tuples)
      if (tup.values == want) return &tup;
    return nullptr;
  }

  static PtSet expand(const time::TemporalSet& ts) {
    PtSet s;
    for (time::Period p : ts.periods)
      for (time::TimePoint t = p.start; t <= p.end; ++t) s.insert(t);
    return s;
  }

  static bool inside(time::Period et, const PtSet& s) {
    for (time::TimePoint t = et.start; t <= et.end; ++t)
      if (!s.count(t)) return false;
    return true;
  }

  PtSet full() const {
    PtSet s;
    for (time::TimePoint t = 0; t <= h; ++t) s.insert(t);
    return s;
  }

  bool restriction_ok(const std::vector<top::FormulaPtr>& restriction,
                      OracleBinds& b) const {
    for (const auto& r : restriction)
      if (!find_tuple(r->pred, r->args, b)) return false;
    return true;
  }

  bool holds(const top::FormulaPtr& f, const PtSet& lt, OracleBinds& b,
             time::Period et) const {
    switch (f->op) {
      case Op::Pred: {
        const db::Tuple* t = find_tuple(f->pred, f->args, b);
        return t && inside(et, lt) && inside(et, expand(t->valid));
      }
      case Op::Culm: {
        const db::Tuple* t =
            find_tuple(f->child->pred, f->child->args, b);
        if (!t) return false;
        PtSet v = expand(t->valid);
        if (!inside(et, v)) return false;
        if (v.count(et.start - 1) || v.count(et.end + 1)) return false;
        bool climax = false;
        for (time::TimePoint c : t->climaxes)
          if (c == et.end) climax = true;
        return climax && inside(et, lt);
      }
      case Op::Past:
      case Op::Pres: {
        if (auto pinned = b.ev.find(f->var);
            pinned != b.ev.end() && !(pinned->second == et))
          return false;
        PtSet w;
        for (time::TimePoint t : lt)
          if (f->op == Op::Past ? t < st : t == st) w.insert(t);
        if (!inside(et, w)) return false;
        return with_event(b, f->var, et,
                          [&] { return holds(f->child, w, b, et); });
      }
      case Op::At: {
        time::TemporalSet pat;
        try {
          pat = time::resolve_pattern(f->pattern, d.axis);
        } catch (const time::TimeError& e) {
          throw EvalError(e.what());
        }
        for (time::Period p : pat.periods) {
          PtSet lt2;
          for (time::TimePoint t : lt)
            if (p.start <= t && t <= p.end) lt2.insert(t);
          if (holds(f->child, lt2, b, et)) return true;
        }
        return false;
      }
      case Op::Perf: {
        if (!inside(et, lt)) return false;
        PtSet whole = full();
        for (time::TimePoint a = 0; a < et.start; ++a)
          for (time::TimePoint b2 = a; b2 < et.start; ++b2) {
            time::Period et2{a, b2};
            if (auto pinned = b.ev.find(f->var);
                pinned != b.ev.end() && !(pinned->second == et2))
              continue;
            if (with_event(b, f->var, et2,
                           [&] { return holds(f->child, whole, b, et2); }))
              return true;
          }
        return false;
      }
      case Op::Begin: {
        if (et.start != et.end || !lt.count(et.start)) return false;
        PtSet whole = full();
        for (time::TimePoint b2 = et.start; b2 <= h; ++b2)
          if (holds(f->child, whole, b, {et.start, b2})) return true;
        return false;
      }
      case Op::End: {
        if (et.start != et.end || !lt.count(et.end)) return false;
        PtSet whole = full();
        for (time::TimePoint a = 0; a <= et.end; ++a)
          if (holds(f->child, whole, b, {a, et.end})) return true;
        return false;
      }
      case Op::For: {
        time::TimePoint len;
        try {
          len = time::duration_points(f->unit, f->count, d.axis.gran);
        } catch (const time::TimeError& e) {
          throw EvalError(e.what());
        }
        return et.end - et.start + 1 == len && holds(f->child, lt, b, et);
      }
      case Op::Exists:
      case Op::Interrog: {
        for (const auto& c : d.entities) {
          auto prev = b.ent.find(f->var);
          bool had = prev != b.ent.end();
          std::string saved = had ? prev->second : "";
          b.ent[f->var] = c;
          bool ok = restriction_ok(f->restriction, b) &&
                    holds(f->child, lt, b, et);
          if (had)
            b.ent[f->var] = saved;
          else
            b.ent.erase(f->var);
          if (ok) return true;
        }
        return false;
      }
      case Op::InterrogMxl:
        return holds(f->child, lt, b, et);
    }
    return false;
  }

  template <class Fn>
  bool with_event(OracleBinds& b, const std::string& var, time::Period et,
                  Fn fn) const {
    auto prev = b.ev.find(var);
    bool had = prev != b.ev.end();
    time::Period saved = had ? prev->second : time::Period{};
    b.ev[var] = et;
    bool r = fn();
    if (had)
      b.ev[var] = saved;
    else
      b.ev.erase(var);
    return r;
  }

  bool satisfiable(const top::FormulaPtr& body, OracleBinds& b) const {
    PtSet whole = full();
    for (time::TimePoint a = 0; a <= h; ++a)
      for (time::TimePoint e = a; e <= h; ++e)
        if (holds(body, whole, b, {a, e})) return true;
    return false;
  }
};

std::vector<time::Period> naive_maximal(const std::vector<time::Period>& v) {
  std::vector<time::Period> out;
  for (time::Period p : v) {
    bool dominated = false;
    for (time::Period q : v)
      if (!(q == p) && q.start <= p.start && p.end <= q.end) dominated = true;
    if (!dominated) out.push_back(p);
  }
  return out;
}

}  // namespace

Answer oracle_eval(const db::Database& d, const top::FormulaPtr& f,
                   time::TimePoint st) {
  if (d.axis.horizon > 1000)
    throw EvalError("oracle horizon guard exceeded (over 1000 points)");
  if (st < 0 || st > d.axis.horizon)
    throw EvalError("speech time is off the axis");

  struct Q {
    Op op;
    std::string var;
    const std::vector<top::FormulaPtr>* restriction;
  };
  std::vector<Q> prefix;
  std::optional<std::string> mxl;
  top::FormulaPtr body = f;
  while (body->op == Op::Exists || body->op == Op::Interrog ||
         body->op == Op::InterrogMxl) {
    if (body->op == Op::InterrogMxl) {
      if (mxl) throw EvalError("multiple interrogative-maximal quantifiers");
      mxl = body->var;
    }
    prefix.push_back({body->op, body->var, &body->restriction});
    body = body->child;
  }
  std::function<void(const top::Formula*)> reject = [&](const top::Formula* g) {
    if (g->op == Op::Interrog || g->op == Op::InterrogMxl)
      throw EvalError("interrogative quantifier must be outermost");
    for (const auto& r : g->restriction) reject(r.get());
    if (g->child) reject(g->child.get());
  };
  reject(body.get());

  Answer ans;
  for (const Q& q : prefix)
    if (q.op == Op::Interrog) ans.entity_columns.push_back(q.var);
  ans.period_column = mxl;
  ans.kind = (!ans.entity_columns.empty() || mxl) ? Answer::Kind::Rows
                                                  : Answer::Kind::Boolean;

  Oracle oracle(d, st);
  OracleBinds binds;
  std::vector<std::string> ent_row;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == prefix.size()) {
      if (!mxl) {
        if (oracle.satisfiable(body, binds)) {
          ans.truth = true;
          if (ans.kind == Answer::Kind::Rows)
            ans.rows.insert({ent_row, std::nullopt});
        }
        return;
      }
      std::vector<time::Period> cands;
      for (time::TimePoint a = 0; a <= oracle.h; ++a)
        for (time::TimePoint e = a; e <= oracle.h; ++e) {
          binds.ev[*mxl] = {a, e};
          if (oracle.satisfiable(body, binds)) cands.push_back({a, e});
        }
      binds.ev.erase(*mxl);
      for (time::Period p : naive_maximal(cands)) {
        ans.truth = true;
        ans.rows.insert({ent_row, p});
      }
      return;
    }
    const Q& q = prefix[i];
    if (q.op == Op::InterrogMxl) {
      rec(i + 1);
      return;
    }
    for (const auto& c : d.entities) {
      binds.ent[q.var] = c;
      if (!oracle.restriction_ok(*q.restriction, binds)) {
        binds.ent.erase(q.var);
        continue;
      }
      if (q.op == Op::Interrog) {
        ent_row.push_back(c);
        rec(i + 1);
        ent_row.pop_back();
      } else {
        rec(i + 1);
      }
      binds.ent.erase(q.var);
    }
  };
  rec(0);
  return ans;
}

}  // namespace tqa::eval
