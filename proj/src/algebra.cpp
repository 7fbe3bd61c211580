#include "tqa/algebra.hpp"

#include <algorithm>
#include <limits>
#include <set>

namespace tqa::alg {

namespace {

using top::Op;
using Bmap = std::map<std::string, std::string>;

void reject_nested_interrogatives(const top::Formula* f) {
  if (f->op == Op::Interrog || f->op == Op::InterrogMxl)
    throw AlgError("interrogative quantifier must be outermost");
  for (const auto& r : f->restriction) reject_nested_interrogatives(r.get());
  if (f->child) reject_nested_interrogatives(f->child.get());
}

// True iff the tense operator indexed by `var` is reached from f through
// event-time-preserving operators only (everything except Perf, Begin, End,
// whose inner formula is evaluated at a different event time).  Must agree
// with the reference evaluator's notion.
bool et_preserving_path(const top::Formula* f, const std::string& var) {
  if ((f->op == Op::Past || f->op == Op::Pres) && f->var == var) return true;
  switch (f->op) {
    case Op::At:
    case Op::For:
    case Op::Exists:
    case Op::Interrog:
    case Op::InterrogMxl:
    case Op::Past:
    case Op::Pres:
      return f->child && et_preserving_path(f->child.get(), var);
    default:
      return false;
  }
}

// Keeps periods with no strict superperiod in the input.  Same sweep as the
// reference evaluator so answers compare bit-for-bit.
std::vector<time::Period> maximal_periods(std::vector<time::Period> v) {
  std::sort(v.begin(), v.end(), [](time::Period x, time::Period y) {
    return x.start != y.start ? x.start < y.start : x.end > y.end;
  });
  std::vector<time::Period> out;
  time::TimePoint best = std::numeric_limits<time::TimePoint>::min();
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j].start == v[i].start) ++j;
    if (v[i].end > best) {
      out.push_back(v[i]);
      best = v[i].end;
    }
    i = j;
  }
  return out;
}

AlgExprPtr make_scan(const top::Formula* pred_node) {
  auto n = std::make_shared<AlgExpr>();
  n->op = AlgOp::Scan;
  n->pred = pred_node->pred;
  n->pattern = pred_node->args;
  return n;
}

AlgExprPtr make_window(AlgExprPtr child, time::TemporalSet w) {
  auto n = std::make_shared<AlgExpr>();
  n->op = AlgOp::WindowRestrict;
  n->window = std::move(w);
  n->child = std::move(child);
  return n;
}

AlgExprPtr make_entity_join(const std::string& var,
                            const std::vector<top::FormulaPtr>& restriction,
                            AlgExprPtr body) {
  auto n = std::make_shared<AlgExpr>();
  n->op = AlgOp::EntityJoin;
  n->var = var;
  for (const auto& r : restriction) {
    if (r->op != Op::Pred)
      throw AlgError("quantifier restriction must be a plain predicate");
    n->restrictions.push_back(make_scan(r.get()));
  }
  n->child = std::move(body);
  return n;
}

struct Translator {
  time::TimePoint st;
  const time::Axis& axis;

  // Windows accumulate while descending; the first pushed ends up innermost,
  // wrapped around the leaf.
  AlgExprPtr wrap(AlgExprPtr core, std::vector<time::TemporalSet>& stack) {
    for (auto& w : stack) core = make_window(std::move(core), std::move(w));
    return core;
  }

  time::TemporalSet past_window() const {
    if (st <= 0) return {};
    return time::intersect(time::full_axis(axis), time::Period{0, st - 1});
  }

  time::TemporalSet pres_window() const {
    return time::intersect(time::full_axis(axis), time::Period{st, st});
  }

  time::TemporalSet stack_window(const std::vector<time::TemporalSet>& stack) const {
    time::TemporalSet w = time::full_axis(axis);
    for (const auto& s : stack) w = time::intersect(w, s);
    return w;
  }

  AlgExprPtr rec(const top::FormulaPtr& f, std::vector<time::TemporalSet> stack) {
    switch (f->op) {
      case Op::Pred:
        return wrap(make_scan(f.get()), stack);
      case Op::Culm: {
        auto n = std::make_shared<AlgExpr>();
        n->op = AlgOp::CulmSelect;
        n->child = make_scan(f->child.get());
        return wrap(std::move(n), stack);
      }
      case Op::Past:
        stack.push_back(past_window());
        return rec(f->child, std::move(stack));
      case Op::Pres:
        stack.push_back(pres_window());
        return rec(f->child, std::move(stack));
      case Op::At: {
        try {
          stack.push_back(time::resolve_pattern(f->pattern, axis));
        } catch (const time::TimeError& e) {
          throw AlgError(e.what());
        }
        return rec(f->child, std::move(stack));
      }
      case Op::For: {
        auto n = std::make_shared<AlgExpr>();
        n->op = AlgOp::SubperiodsOfDuration;
        n->points = time::duration_points(f->unit, f->count, axis.gran);
        n->child = rec(f->child, std::move(stack));
        return n;
      }
      case Op::Perf: {
        auto n = std::make_shared<AlgExpr>();
        n->op = AlgOp::PrecedesJoin;
        n->window = stack_window(stack);
        n->child = rec(f->child, {});
        return n;
      }
      case Op::Begin:
      case Op::End: {
        auto n = std::make_shared<AlgExpr>();
        n->op = f->op == Op::Begin ? AlgOp::BeginPoints : AlgOp::EndPoints;
        n->child = rec(f->child, {});
        return wrap(std::move(n), stack);
      }
      case Op::Exists:
        return make_entity_join(f->var, f->restriction,
                                rec(f->child, std::move(stack)));
      case Op::Interrog:
      case Op::InterrogMxl:
        throw AlgError("interrogative quantifier must be outermost");
    }
    throw AlgError("unhandled operator");
  }
};

bool compatible(const Bmap& a, const Bmap& b) {
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it != b.end() && it->second != v) return false;
  }
  return true;
}

Bmap merged(const Bmap& a, const Bmap& b) {
  Bmap m = a;
  m.insert(b.begin(), b.end());
  return m;
}

const std::string& binding_of(const AlgRow& row, const std::string& var) {
  auto it = row.bindings.find(var);
  if (it == row.bindings.end())
    throw AlgError("variable " + var + " is unbound in a collected row");
  return it->second;
}

}  // namespace

AlgExprPtr translate(const top::FormulaPtr& f, time::TimePoint st,
                     const time::Axis& axis) {
  if (st < 0 || st > axis.horizon) throw AlgError("speech time is off the axis");

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
      if (mxl) throw AlgError("multiple interrogative-maximal quantifiers");
      mxl = body->var;
    }
    prefix.push_back({body->op, body->var, &body->restriction});
    body = body->child;
  }
  reject_nested_interrogatives(body.get());
  if (mxl && !et_preserving_path(body.get(), *mxl))
    throw AlgError(
        "maximal-period variable must stay on an event-time-preserving path");

  Translator tr{st, axis};
  AlgExprPtr expr = tr.rec(body, {});
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    if (it->op != Op::InterrogMxl)
      expr = make_entity_join(it->var, *it->restriction, std::move(expr));

  auto root = std::make_shared<AlgExpr>();
  root->op = AlgOp::Collect;
  for (const Q& q : prefix)
    if (q.op == Op::Interrog) root->columns.push_back(q.var);
  if (mxl)  // grouping matters only to the maximality filter
    for (const Q& q : prefix)
      if (q.op != Op::InterrogMxl) root->group_vars.push_back(q.var);
  root->period_var = mxl;
  root->kind = mxl                    ? CollectKind::Maximal
               : !root->columns.empty() ? CollectKind::Bindings
                                        : CollectKind::Bool;
  root->child = std::move(expr);
  return root;
}

AlgExprPtr push_window(const AlgExprPtr& a, const time::TemporalSet& w) {
  switch (a->op) {
    case AlgOp::Scan:
    case AlgOp::CulmSelect:
    case AlgOp::BeginPoints:
    case AlgOp::EndPoints:
      return make_window(a, w);
    case AlgOp::WindowRestrict:
    case AlgOp::SubperiodsOfDuration:
    case AlgOp::EntityJoin:
    case AlgOp::Collect: {
      auto copy = std::make_shared<AlgExpr>(*a);
      copy->child = push_window(a->child, w);
      return copy;
    }
    case AlgOp::PrecedesJoin: {
      auto copy = std::make_shared<AlgExpr>(*a);
      copy->window = time::intersect(a->window, w);
      return copy;
    }
  }
  throw AlgError("unhandled node");
}

bool alg_equal(const AlgExprPtr& a, const AlgExprPtr& b) {
  if (!a || !b) return a == b;
  if (a->op != b->op || a->pred != b->pred || a->pattern != b->pattern ||
      a->window.periods != b->window.periods || a->points != b->points ||
      a->var != b->var || a->kind != b->kind || a->columns != b->columns ||
      a->period_var != b->period_var || a->group_vars != b->group_vars)
    return false;
  if (a->restrictions.size() != b->restrictions.size()) return false;
  for (std::size_t i = 0; i < a->restrictions.size(); ++i)
    if (!alg_equal(a->restrictions[i], b->restrictions[i])) return false;
  return alg_equal(a->child, b->child);
}

namespace {

std::string render_window(const time::TemporalSet& w, const time::Axis& axis) {
  if (w.periods.empty()) return "empty";
  std::string out;
  for (std::size_t i = 0; i < w.periods.size(); ++i) {
    if (i) out += ";";
    out += time::render_period(w.periods[i], axis);
  }
  return out;
}

}  // namespace

std::string render_alg(const AlgExprPtr& a, const time::Axis& axis) {
  switch (a->op) {
    case AlgOp::Scan: {
      std::string out = "Scan(" + a->pred + ", [";
      for (std::size_t i = 0; i < a->pattern.size(); ++i) {
        if (i) out += ", ";
        out += a->pattern[i].text;
      }
      return out + "])";
    }
    case AlgOp::CulmSelect:
      return "CulmSelect(" + render_alg(a->child, axis) + ")";
    case AlgOp::BeginPoints:
      return "BeginPoints(" + render_alg(a->child, axis) + ")";
    case AlgOp::EndPoints:
      return "EndPoints(" + render_alg(a->child, axis) + ")";
    case AlgOp::WindowRestrict:
      return "WindowRestrict(" + render_alg(a->child, axis) + ", " +
             render_window(a->window, axis) + ")";
    case AlgOp::SubperiodsOfDuration:
      return "SubperiodsOfDuration(" + render_alg(a->child, axis) + ", " +
             std::to_string(a->points) + ")";
    case AlgOp::PrecedesJoin:
      return "PrecedesJoin(" + render_window(a->window, axis) + ", " +
             render_alg(a->child, axis) + ")";
    case AlgOp::EntityJoin: {
      std::string out = "EntityJoin(" + a->var + ", [";
      for (std::size_t i = 0; i < a->restrictions.size(); ++i) {
        if (i) out += "; ";
        out += render_alg(a->restrictions[i], axis);
      }
      return out + "], " + render_alg(a->child, axis) + ")";
    }
    case AlgOp::Collect: {
      const char* kind = a->kind == CollectKind::Bool       ? "bool"
                         : a->kind == CollectKind::Bindings ? "bindings"
                                                            : "maximal";
      return std::string("Collect(") + kind + ", " +
             render_alg(a->child, axis) + ")";
    }
  }
  throw AlgError("unhandled node");
}

std::vector<AlgRow> eval_rows(const db::Database& d, const AlgExprPtr& a) {
  std::vector<AlgRow> out;
  auto emit = [&out](AlgRow row) {
    if (!row.et.empty()) out.push_back(std::move(row));
  };
  switch (a->op) {
    case AlgOp::Scan: {
      for (auto& r : db::denotation(d, a->pred, a->pattern))
        emit({std::move(r.bindings), std::move(r.valid), std::move(r.climaxes),
              RowMode::DownwardClosed});
      break;
    }
    case AlgOp::CulmSelect: {
      for (auto& row : eval_rows(d, a->child)) {
        if (row.mode != RowMode::DownwardClosed)
          throw AlgError("culmination selection expects raw denotation rows");
        time::TemporalSet kept;
        for (time::Period p : row.et.periods)
          if (std::binary_search(row.climaxes.begin(), row.climaxes.end(),
                                 p.end))
            kept.periods.push_back(p);
        emit({std::move(row.bindings), std::move(kept), {}, RowMode::Exact});
      }
      break;
    }
    case AlgOp::WindowRestrict: {
      for (auto& row : eval_rows(d, a->child)) {
        if (row.mode == RowMode::Exact) {
          time::TemporalSet kept;
          for (time::Period p : row.et.periods)
            if (time::contains(a->window, p)) kept.periods.push_back(p);
          row.et = std::move(kept);
        } else {
          row.et = time::intersect(row.et, a->window);
        }
        emit(std::move(row));
      }
      break;
    }
    case AlgOp::BeginPoints:
    case AlgOp::EndPoints: {
      const bool begin = a->op == AlgOp::BeginPoints;
      for (auto& row : eval_rows(d, a->child)) {
        if (row.mode == RowMode::Exact) {
          // A downward-closed or points row already covers the boundary
          // points of every represented period; only exact rows collapse.
          std::vector<time::Period> pts;
          for (time::Period p : row.et.periods) {
            time::TimePoint t = begin ? p.start : p.end;
            pts.push_back({t, t});
          }
          row.et = time::normalize(std::move(pts));
        }
        row.mode = RowMode::Points;
        row.climaxes.clear();
        emit(std::move(row));
      }
      break;
    }
    case AlgOp::SubperiodsOfDuration: {
      const time::TimePoint n = a->points;
      for (auto& row : eval_rows(d, a->child)) {
        if (row.mode == RowMode::DownwardClosed) {
          time::TemporalSet subs;
          for (time::Period p : row.et.periods)
            for (time::TimePoint s = p.start; s + n - 1 <= p.end; ++s)
              subs.periods.push_back({s, s + n - 1});
          row.et = std::move(subs);
          row.mode = RowMode::Exact;
        } else if (row.mode == RowMode::Exact) {
          time::TemporalSet kept;
          for (time::Period p : row.et.periods)
            if (time::duration(p) == n) kept.periods.push_back(p);
          row.et = std::move(kept);
        } else if (n != 1) {
          row.et = {};
        }
        row.climaxes.clear();
        emit(std::move(row));
      }
      break;
    }
    case AlgOp::PrecedesJoin: {
      for (auto& row : eval_rows(d, a->child)) {
        // Earliest possible end of an event the row represents: a
        // downward-closed or points period [a,b] offers [a,a].
        time::TimePoint min_end = std::numeric_limits<time::TimePoint>::max();
        for (time::Period p : row.et.periods)
          min_end = std::min(min_end,
                             row.mode == RowMode::Exact ? p.end : p.start);
        time::TemporalSet after;
        for (time::Period w : a->window.periods) {
          time::TimePoint lo = std::max(w.start, min_end + 1);
          if (lo <= w.end) after.periods.push_back({lo, w.end});
        }
        emit({std::move(row.bindings), std::move(after), {},
              RowMode::DownwardClosed});
      }
      break;
    }
    case AlgOp::EntityJoin: {
      // Candidate bindings: the natural join of the restriction scans,
      // multiplied over every entity when they leave the variable open.
      std::vector<Bmap> cand{{}};
      for (const auto& r : a->restrictions) {
        std::set<Bmap> maps;
        for (auto& row : eval_rows(d, r)) maps.insert(std::move(row.bindings));
        std::set<Bmap> next;
        for (const Bmap& c : cand)
          for (const Bmap& m : maps)
            if (compatible(c, m)) next.insert(merged(c, m));
        cand.assign(next.begin(), next.end());
      }
      std::vector<Bmap> bound;
      for (const Bmap& c : cand) {
        if (c.count(a->var)) {
          bound.push_back(c);
        } else {
          for (const auto& e : d.entities) {
            Bmap c2 = c;
            c2[a->var] = e;
            bound.push_back(std::move(c2));
          }
        }
      }
      for (auto& row : eval_rows(d, a->child))
        for (const Bmap& c : bound)
          if (compatible(row.bindings, c))
            emit({merged(row.bindings, c), row.et, row.climaxes, row.mode});
      break;
    }
    case AlgOp::Collect:
      throw AlgError("Collect is a query root, not a row source");
  }
  return out;
}

eval::Answer eval_alg(const db::Database& d, const AlgExprPtr& a) {
  if (!a || a->op != AlgOp::Collect)
    throw AlgError("query root must be a Collect node");
  std::vector<AlgRow> rows = eval_rows(d, a->child);

  eval::Answer ans;
  ans.entity_columns = a->columns;
  ans.period_column = a->period_var;
  ans.kind = a->kind == CollectKind::Bool ? eval::Answer::Kind::Boolean
                                          : eval::Answer::Kind::Rows;
  switch (a->kind) {
    case CollectKind::Bool:
      ans.truth = !rows.empty();
      break;
    case CollectKind::Bindings: {
      for (const AlgRow& row : rows) {
        eval::AnswerRow r;
        for (const auto& col : a->columns)
          r.entities.push_back(binding_of(row, col));
        ans.rows.insert(std::move(r));
      }
      ans.truth = !ans.rows.empty();
      break;
    }
    case CollectKind::Maximal: {
      // Candidate periods grouped per quantified-binding combination; the
      // maximality filter runs inside each group, then groups project onto
      // the reported columns.
      std::map<std::vector<std::string>, std::vector<time::Period>> groups;
      for (const AlgRow& row : rows) {
        std::vector<std::string> key;
        for (const auto& v : a->group_vars) key.push_back(binding_of(row, v));
        auto& g = groups[std::move(key)];
        for (time::Period p : row.et.periods) {
          if (row.mode == RowMode::Points)
            for (time::TimePoint t = p.start; t <= p.end; ++t)
              g.push_back({t, t});
          else
            g.push_back(p);
        }
      }
      for (auto& [key, cands] : groups) {
        eval::AnswerRow base;
        for (const auto& col : a->columns) {
          auto it = std::find(a->group_vars.begin(), a->group_vars.end(), col);
          base.entities.push_back(key[std::size_t(it - a->group_vars.begin())]);
        }
        for (time::Period p : maximal_periods(std::move(cands))) {
          eval::AnswerRow r = base;
          r.period = p;
          ans.rows.insert(std::move(r));
        }
      }
      ans.truth = !ans.rows.empty();
      break;
    }
  }
  return ans;
}

}  // namespace tqa::alg
