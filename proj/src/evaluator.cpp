#include "tqa/evaluator.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>

namespace tqa::eval {

namespace {

using top::Op;
using Bindings = std::map<std::string, Value>;

// Bitset over all axis periods: period (a, b) is bit a*n+b.  Satisfaction
// sets are computed bottom-up, one bitset per (node, window, bindings).
struct SatBits {
  int n = 0;
  std::vector<std::uint64_t> w;

  explicit SatBits(int points)
      : n(points), w((static_cast<std::size_t>(points) * points + 63) / 64) {}

  std::size_t idx(int a, int b) const {
    return static_cast<std::size_t>(a) * n + b;
  }
  void set(int a, int b) { w[idx(a, b) >> 6] |= 1ull << (idx(a, b) & 63); }
  bool test(int a, int b) const {
    return (w[idx(a, b) >> 6] >> (idx(a, b) & 63)) & 1;
  }

  // Sets bits (a, b) for all b in [b1, b2].
  void set_run(int a, int b1, int b2) {
    std::size_t lo = idx(a, b1), hi = idx(a, b2);
    std::size_t wl = lo >> 6, wh = hi >> 6;
    std::uint64_t ml = ~0ull << (lo & 63);
    std::uint64_t mh = ~0ull >> (63 - (hi & 63));
    if (wl == wh) {
      w[wl] |= ml & mh;
      return;
    }
    w[wl] |= ml;
    for (std::size_t k = wl + 1; k < wh; ++k) w[k] = ~0ull;
    w[wh] |= mh;
  }

  void or_with(const SatBits& o) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
  }
  bool any() const {
    for (std::uint64_t x : w)
      if (x) return true;
    return false;
  }

  template <class F>
  void for_each(F f) const {
    for (std::size_t k = 0; k < w.size(); ++k) {
      std::uint64_t x = w[k];
      while (x) {
        int bit = std::countr_zero(x);
        x &= x - 1;
        std::size_t i = k * 64 + bit;
        f(static_cast<int>(i / n), static_cast<int>(i % n));
      }
    }
  }
};

using SatPtr = std::shared_ptr<const SatBits>;

struct Engine {
  const db::Database& d;
  time::TimePoint st;
  int n;

  struct Key {
    const top::Formula* node;
    std::vector<time::Period> lt;
    std::vector<std::pair<std::string, Value>> binds;
    friend auto operator<=>(const Key&, const Key&) = default;
  };
  std::map<Key, SatPtr> memo;
  std::map<const top::Formula*, std::vector<std::string>> occ_cache;

  Engine(const db::Database& dbase, time::TimePoint speech)
      : d(dbase), st(speech), n(static_cast<int>(d.axis.horizon + 1)) {}

  static void collect_names(const top::Formula* f,
                            std::vector<std::string>& out) {
    if (!f->var.empty()) out.push_back(f->var);
    for (const auto& t : f->args)
      if (t.is_var) out.push_back(t.text);
    for (const auto& r : f->restriction) collect_names(r.get(), out);
    if (f->child) collect_names(f->child.get(), out);
  }

  // All variable names occurring in the subformula; the memo key projects
  // the bindings onto these.
  const std::vector<std::string>& occurrences(const top::Formula* f) {
    auto it = occ_cache.find(f);
    if (it != occ_cache.end()) return it->second;
    std::vector<std::string> names;
    collect_names(f, names);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    return occ_cache.emplace(f, std::move(names)).first->second;
  }

  std::vector<top::Term> substitute(const std::vector<top::Term>& args,
                                    const Bindings& binds) const {
    std::vector<top::Term> out;
    out.reserve(args.size());
    for (const auto& t : args) {
      if (!t.is_var) {
        out.push_back(t);
        continue;
      }
      auto it = binds.find(t.text);
      if (it == binds.end()) throw EvalError("unbound variable " + t.text);
      if (it->second.is_period)
        throw EvalError("event variable " + t.text + " in argument position");
      out.push_back(top::constant(it->second.constant));
    }
    return out;
  }

  // Entities satisfying every restriction predicate somewhere on the axis.
  std::vector<std::string> candidates(
      const std::vector<top::FormulaPtr>& restriction, const std::string& var,
      const Bindings& binds) const {
    std::vector<std::string> out;
    for (const auto& c : d.entities) {
      Bindings b2 = binds;
      b2[var] = entity_value(c);
      bool ok = true;
      for (const auto& r : restriction) {
        if (db::denotation(d, r->pred, substitute(r->args, b2)).empty()) {
          ok = false;
          break;
        }
      }
      if (ok) out.push_back(c);
    }
    return out;
  }

  const Value* pin(const top::Formula* f, const Bindings& binds) const {
    auto it = binds.find(f->var);
    if (it == binds.end()) return nullptr;
    if (!it->second.is_period)
      throw EvalError("entity value bound to event variable " + f->var);
    return &it->second;
  }

  SatPtr sat(const top::FormulaPtr& f, const time::TemporalSet& lt,
             const Bindings& binds) {
    Key key{f.get(), lt.periods, {}};
    for (const auto& name : occurrences(f.get())) {
      auto it = binds.find(name);
      if (it != binds.end()) key.binds.emplace_back(name, it->second);
    }
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    auto out = std::make_shared<SatBits>(n);
    switch (f->op) {
      case Op::Pred: {
        // True at et iff et is inside the window and the tuple's valid set;
        // downward closure is set explicitly per maximal period.
        for (const auto& row :
             db::denotation(d, f->pred, substitute(f->args, binds))) {
          time::TemporalSet w = time::intersect(row.valid, lt);
          for (time::Period p : w.periods)
            for (time::TimePoint a = p.start; a <= p.end; ++a)
              out->set_run(static_cast<int>(a), static_cast<int>(a),
                           static_cast<int>(p.end));
        }
        break;
      }
      case Op::Culm: {
        // et must be exactly a maximal valid period ending in a climax, and
        // lie inside the window.
        const top::Formula* p = f->child.get();
        for (const auto& row :
             db::denotation(d, p->pred, substitute(p->args, binds))) {
          for (time::Period m : row.valid.periods) {
            bool climax = std::binary_search(row.climaxes.begin(),
                                             row.climaxes.end(), m.end);
            if (climax && time::contains(lt, m))
              out->set(static_cast<int>(m.start), static_cast<int>(m.end));
          }
        }
        break;
      }
      case Op::Past:
      case Op::Pres: {
        time::TemporalSet w =
            f->op == Op::Past
                ? (st > 0 ? time::intersect(lt, time::Period{0, st - 1})
                          : time::TemporalSet{})
                : time::intersect(lt, time::Period{st, st});
        SatPtr child = sat(f->child, w, binds);
        if (const Value* pv = pin(f.get(), binds)) {
          // The indexed variable is already bound: et must equal the pin.
          time::Period p = pv->period;
          if (child->test(static_cast<int>(p.start), static_cast<int>(p.end)))
            out->set(static_cast<int>(p.start), static_cast<int>(p.end));
          break;
        }
        memo.emplace(std::move(key), child);
        return child;
      }
      case Op::At: {
        time::TemporalSet pat;
        try {
          pat = time::resolve_pattern(f->pattern, d.axis);
        } catch (const time::TimeError& e) {
          throw EvalError(e.what());
        }
        for (time::Period p : pat.periods)
          out->or_with(*sat(f->child, time::intersect(lt, p), binds));
        break;
      }
      case Op::Perf: {
        // et inside the window, strictly preceded by a satisfying et2; the
        // inner window resets to the whole axis.
        SatPtr inner = sat(f->child, time::full_axis(d.axis), binds);
        std::optional<time::TimePoint> min_end;
        if (const Value* pv = pin(f.get(), binds)) {
          time::Period p = pv->period;
          if (inner->test(static_cast<int>(p.start), static_cast<int>(p.end)))
            min_end = p.end;
        } else {
          inner->for_each([&](int, int b) {
            if (!min_end || b < *min_end) min_end = b;
          });
        }
        if (min_end) {
          for (time::Period p : lt.periods) {
            time::TimePoint lo = std::max(p.start, *min_end + 1);
            for (time::TimePoint a = lo; a <= p.end; ++a)
              out->set_run(static_cast<int>(a), static_cast<int>(a),
                           static_cast<int>(p.end));
          }
        }
        break;
      }
      case Op::Begin:
      case Op::End: {
        // et is the single start/end point of some satisfying inner et2,
        // evaluated against the whole axis; the point must lie in lt.
        SatPtr inner = sat(f->child, time::full_axis(d.axis), binds);
        std::vector<char> pts(n, 0);
        bool begin = f->op == Op::Begin;
        inner->for_each([&](int a, int b) { pts[begin ? a : b] = 1; });
        for (int p = 0; p < n; ++p)
          if (pts[p] && time::contains_point(lt, p)) out->set(p, p);
        break;
      }
      case Op::For: {
        time::TimePoint len;
        try {
          len = time::duration_points(f->unit, f->count, d.axis.gran);
        } catch (const time::TimeError& e) {
          throw EvalError(e.what());
        }
        SatPtr child = sat(f->child, lt, binds);
        for (int a = 0; a + len - 1 < n; ++a)
          if (child->test(a, static_cast<int>(a + len - 1)))
            out->set(a, static_cast<int>(a + len - 1));
        break;
      }
      case Op::Exists:
      case Op::Interrog: {
        // In satisfaction position both quantifiers are existential; row
        // collection happens in eval()'s prefix walk.
        for (const auto& c : candidates(f->restriction, f->var, binds)) {
          Bindings b2 = binds;
          b2[f->var] = entity_value(c);
          out->or_with(*sat(f->child, lt, b2));
        }
        break;
      }
      case Op::InterrogMxl: {
        // Existential reading: the variable binds freely at its tense
        // operator.
        SatPtr child = sat(f->child, lt, binds);
        memo.emplace(std::move(key), child);
        return child;
      }
    }
    SatPtr res = out;
    memo.emplace(std::move(key), res);
    return res;
  }
};

void reject_nested_interrogatives(const top::Formula* f) {
  if (f->op == Op::Interrog || f->op == Op::InterrogMxl)
    throw EvalError("interrogative quantifier must be outermost");
  for (const auto& r : f->restriction) reject_nested_interrogatives(r.get());
  if (f->child) reject_nested_interrogatives(f->child.get());
}

// True iff the tense operator indexed by `var` is reached from f through
// event-time-preserving operators only (everything except Perf, Begin, End,
// whose inner formula is evaluated at a different event time).
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

// Keeps periods with no strict superperiod in the input.
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
    // v[i] has the largest end of its start group; later group members are
    // strictly inside it.  It survives iff no earlier-starting period
    // reaches its end.
    if (v[i].end > best) {
      out.push_back(v[i]);
      best = v[i].end;
    }
    i = j;
  }
  return out;
}

void check_st(const db::Database& d, time::TimePoint st) {
  if (st < 0 || st > d.axis.horizon)
    throw EvalError("speech time is off the axis");
}

// Satset sizes are quadratic in the axis; reject configurations that would
// allocate unreasonably.
void check_axis(const db::Database& d) {
  if (d.axis.horizon > 12000)
    throw EvalError("axis too large for evaluation (over 12000 points)");
}

}  // namespace

bool holds(const db::Database& d, const top::FormulaPtr& f, const Context& ctx,
           time::Period et) {
  check_axis(d);
  check_st(d, ctx.st);
  if (et.start < 0 || et.end > d.axis.horizon)
    throw EvalError("event time is off the axis");
  Engine eng(d, ctx.st);
  return eng
      .sat(f, ctx.lt, ctx.bindings)
      ->test(static_cast<int>(et.start), static_cast<int>(et.end));
}

Answer eval(const db::Database& d, const top::FormulaPtr& f,
            time::TimePoint st) {
  check_axis(d);
  check_st(d, st);

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
  reject_nested_interrogatives(body.get());

  Answer ans;
  for (const Q& q : prefix)
    if (q.op == Op::Interrog) ans.entity_columns.push_back(q.var);
  ans.period_column = mxl;
  ans.kind = (!ans.entity_columns.empty() || mxl) ? Answer::Kind::Rows
                                                  : Answer::Kind::Boolean;

  Engine eng(d, st);
  time::TemporalSet full = time::full_axis(d.axis);
  bool fast = mxl && et_preserving_path(body.get(), *mxl);

  Bindings binds;
  std::vector<std::string> ent_row;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == prefix.size()) {
      if (!mxl) {
        if (eng.sat(body, full, binds)->any()) {
          ans.truth = true;
          if (ans.kind == Answer::Kind::Rows)
            ans.rows.insert({ent_row, std::nullopt});
        }
        return;
      }
      std::vector<time::Period> cands;
      if (fast) {
        // The body's satisfying event times are exactly the periods the
        // indexed tense operator binds.
        eng.sat(body, full, binds)->for_each([&](int a, int b) {
          cands.push_back({a, b});
        });
      } else {
        for (time::TimePoint a = 0; a <= d.axis.horizon; ++a)
          for (time::TimePoint b = a; b <= d.axis.horizon; ++b) {
            binds[*mxl] = period_value({a, b});
            if (eng.sat(body, full, binds)->any()) cands.push_back({a, b});
          }
        binds.erase(*mxl);
      }
      for (time::Period p : maximal_periods(std::move(cands))) {
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
    for (const auto& c : eng.candidates(*q.restriction, q.var, binds)) {
      binds[q.var] = entity_value(c);
      if (q.op == Op::Interrog) {
        ent_row.push_back(c);
        rec(i + 1);
        ent_row.pop_back();
      } else {
        rec(i + 1);
      }
      binds.erase(q.var);
    }
  };
  rec(0);
  return ans;
}

std::string render_answer(const Answer& a, const time::Axis& axis) {
  if (a.kind == Answer::Kind::Boolean) return a.truth ? "yes" : "no";
  if (a.rows.empty()) return "(none)";
  std::string out;
  bool first_line = true;
  for (const AnswerRow& row : a.rows) {
    if (!first_line) out += "\n";
    first_line = false;
    bool first = true;
    for (const auto& e : row.entities) {
      if (!first) out += "\t";
      out += e;
      first = false;
    }
    if (row.period) {
      if (!first) out += "\t";
      out += time::render_period(*row.period, axis);
    }
  }
  return out;
}

}  // namespace tqa::eval
