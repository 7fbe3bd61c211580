#include "tqa/database.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace tqa::db {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (true) {
    std::size_t j = text.find(sep, i);
    if (j == std::string::npos) {
      out.push_back(text.substr(i));
      return out;
    }
    out.push_back(text.substr(i, j - i));
    i = j + 1;
  }
}

bool is_constant(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

struct Loader {
  bool have_axis = false;
  time::Axis axis;
  std::map<std::string, Relation> relations;
  // Pre-coalescing accumulation, keyed by (relation, values).
  std::map<std::pair<std::string, std::vector<std::string>>,
           std::pair<std::vector<time::Period>, std::vector<time::TimePoint>>>
      pending;
  int lineno = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw DatabaseError("line " + std::to_string(lineno) + ": " + msg);
  }

  time::CalendarDate parse_date(const std::string& text) const {
    time::DateExpr e;
    try {
      e = time::parse_date_expr(text);
    } catch (const time::TimeError& err) {
      fail(err.what());
    }
    if (e.kind != time::DateExpr::Kind::Date) fail("expected a date, got a clock time");
    return e.date;
  }

  // First axis point of the calendar day; the day must lie fully on the axis.
  time::TimePoint day_first(const time::CalendarDate& d) const {
    std::int64_t day = time::days_from_civil(d) - time::days_from_civil(axis.origin);
    time::TimePoint ppd = time::points_per_day(axis.gran);
    time::TimePoint first = day * ppd;
    if (first < 0 || first + ppd - 1 > axis.horizon)
      fail("date " + time::render_date_expr(
               {time::DateExpr::Kind::Date, d, 0, 0}) + " is off the axis");
    return first;
  }

  // "D/M/YYYY" or "D/M/YYYY@HH:MM"; a plain date denotes its first point
  // (is_end=false) or last point (is_end=true).
  time::TimePoint endpoint(const std::string& text, bool is_end) const {
    std::size_t at = text.find('@');
    if (at == std::string::npos) {
      time::TimePoint first = day_first(parse_date(text));
      return is_end ? first + time::points_per_day(axis.gran) - 1 : first;
    }
    if (axis.gran == time::Granularity::Day)
      fail("'" + text + "': clock times need an axis finer than a day");
    time::CalendarDate d = parse_date(text.substr(0, at));
    time::DateExpr tod;
    try {
      tod = time::parse_date_expr(text.substr(at + 1));
    } catch (const time::TimeError& err) {
      fail(err.what());
    }
    if (tod.kind != time::DateExpr::Kind::TimeOfDay)
      fail("'" + text + "': expected a clock time after '@'");
    std::optional<time::TimePoint> p;
    try {
      p = time::point_of_stamp({d, tod.hour, tod.minute}, axis);
    } catch (const time::TimeError& err) {
      fail(err.what());
    }
    if (!p) fail("'" + text + "' is off the axis");
    return *p;
  }

  time::Period parse_period(const std::string& text) const {
    std::size_t dots = text.find("..");
    if (dots == std::string::npos) fail("'" + text + "': expected DATE..DATE");
    time::TimePoint a = endpoint(text.substr(0, dots), false);
    time::TimePoint b = endpoint(text.substr(dots + 2), true);
    if (a > b) fail("'" + text + "': period ends before it starts");
    return {a, b};
  }

  void do_axis(const std::vector<std::string>& toks) {
    if (have_axis) fail("duplicate axis line");
    if (toks.size() != 4) fail("expected: axis FIRST-DATE LAST-DATE GRANULARITY");
    auto gran = time::granularity_from_name(toks[3]);
    if (!gran) fail("unknown granularity '" + toks[3] + "'");
    time::DateExpr first, last;
    try {
      first = time::parse_date_expr(toks[1]);
      last = time::parse_date_expr(toks[2]);
      if (first.kind != time::DateExpr::Kind::Date ||
          last.kind != time::DateExpr::Kind::Date)
        fail("axis bounds must be dates");
      axis = time::make_axis(first.date, last.date, *gran);
    } catch (const time::TimeError& err) {
      fail(err.what());
    }
    have_axis = true;
  }

  void do_relation(const std::vector<std::string>& toks) {
    if (!have_axis) fail("axis must be declared before relations");
    if (toks.size() != 3) fail("expected: relation NAME/ARITY CLASS");
    auto parts = split_on(toks[1], '/');
    if (parts.size() != 2 || parts[0].empty()) fail("expected NAME/ARITY");
    std::size_t arity = 0;
    try {
      arity = std::stoul(parts[1]);
    } catch (...) {
      fail("bad arity '" + parts[1] + "'");
    }
    if (arity == 0) fail("arity must be positive");
    auto cls = top::verb_class_from_name(toks[2]);
    if (!cls) fail("unknown verb class '" + toks[2] + "'");
    auto [it, inserted] =
        relations.emplace(parts[0], Relation{parts[0], arity, *cls, {}});
    if (!inserted) fail("relation " + parts[0] + " already declared");
    (void)it;
  }

  void do_tuple(const std::vector<std::string>& toks) {
    if (toks.size() < 2) fail("expected: tuple RELATION VALUES...");
    auto rel_it = relations.find(toks[1]);
    if (rel_it == relations.end()) fail("unknown relation '" + toks[1] + "'");
    Relation& rel = rel_it->second;

    std::vector<std::string> values;
    std::vector<time::Period> periods;
    std::vector<time::TimePoint> climaxes;
    bool saw_valid = false, saw_climax = false;
    for (std::size_t i = 2; i < toks.size(); ++i) {
      const std::string& t = toks[i];
      if (t.rfind("valid=", 0) == 0) {
        if (saw_valid) fail("duplicate valid=");
        saw_valid = true;
        for (const std::string& p : split_on(t.substr(6), ';'))
          periods.push_back(parse_period(p));
      } else if (t.rfind("climax=", 0) == 0) {
        if (saw_climax) fail("duplicate climax=");
        saw_climax = true;
        for (const std::string& d : split_on(t.substr(7), ';'))
          climaxes.push_back(endpoint(d, true));
      } else if (t.find('=') != std::string::npos) {
        fail("unknown option '" + t + "'");
      } else {
        if (saw_valid || saw_climax) fail("values must precede valid=/climax=");
        if (!is_constant(t)) fail("bad constant '" + t + "'");
        values.push_back(t);
      }
    }
    if (values.size() != rel.arity)
      fail("relation " + rel.name + " expects " + std::to_string(rel.arity) +
           " values, got " + std::to_string(values.size()));
    if (rel.verb_class == top::VerbClass::Timeless) {
      if (saw_valid) fail("timeless relation " + rel.name + " takes no valid=");
    } else if (!saw_valid) {
      fail("relation " + rel.name + " requires valid=");
    }
    if (saw_climax && rel.verb_class != top::VerbClass::CulmActivity)
      fail("climax= is only allowed in culm_activity relations");

    auto& acc = pending[{rel.name, values}];
    if (rel.verb_class == top::VerbClass::Timeless)
      acc.first.push_back({0, axis.horizon});
    else
      acc.first.insert(acc.first.end(), periods.begin(), periods.end());
    acc.second.insert(acc.second.end(), climaxes.begin(), climaxes.end());
  }

  Database finish() {
    if (!have_axis) fail("missing axis line");
    Database out;
    out.axis = axis;
    out.relations = std::move(relations);
    for (auto& [key, acc] : pending) {
      Relation& rel = out.relations.at(key.first);
      Tuple t;
      t.values = key.second;
      t.valid = time::normalize(std::move(acc.first));
      std::sort(acc.second.begin(), acc.second.end());
      acc.second.erase(std::unique(acc.second.begin(), acc.second.end()),
                       acc.second.end());
      t.climaxes = std::move(acc.second);
      for (time::TimePoint c : t.climaxes) {
        bool at_end = std::any_of(t.valid.periods.begin(), t.valid.periods.end(),
                                  [&](time::Period p) { return p.end == c; });
        if (!at_end) {
          std::string vals;
          for (const auto& v : t.values) vals += (vals.empty() ? "" : ", ") + v;
          throw DatabaseError("climax " + time::render_point(c, axis) + " of " +
                              rel.name + "(" + vals +
                              ") is not the end of a maximal valid period");
        }
      }
      for (const auto& v : t.values) out.entities.insert(v);
      rel.tuples.push_back(std::move(t));
    }
    return out;
  }
};

}  // namespace

Database load_database(std::string_view text) {
  Loader loader;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++loader.lineno;
    if (std::size_t hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    std::vector<std::string> toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "axis")
      loader.do_axis(toks);
    else if (toks[0] == "relation")
      loader.do_relation(toks);
    else if (toks[0] == "tuple")
      loader.do_tuple(toks);
    else
      loader.fail("unknown directive '" + toks[0] + "'");
  }
  ++loader.lineno;
  return loader.finish();
}

Database load_database_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatabaseError("cannot open database file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_database(buf.str());
}

std::vector<DenotationRow> denotation(const Database& db,
                                      const std::string& pred,
                                      const std::vector<top::Term>& pattern) {
  auto it = db.relations.find(pred);
  if (it == db.relations.end())
    throw DatabaseError("unknown predicate " + pred);
  const Relation& rel = it->second;
  if (pattern.size() != rel.arity)
    throw DatabaseError("arity mismatch for " + pred + ": expected " +
                        std::to_string(rel.arity) + ", got " +
                        std::to_string(pattern.size()));
  std::vector<DenotationRow> rows;
  for (const Tuple& t : rel.tuples) {
    DenotationRow row;
    bool ok = true;
    for (std::size_t i = 0; i < pattern.size() && ok; ++i) {
      if (!pattern[i].is_var) {
        ok = pattern[i].text == t.values[i];
      } else {
        auto [pos, inserted] = row.bindings.emplace(pattern[i].text, t.values[i]);
        if (!inserted) ok = pos->second == t.values[i];
      }
    }
    if (!ok) continue;
    row.valid = t.valid;
    row.climaxes = t.climaxes;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::set<std::vector<std::string>> snapshot(const Database& db,
                                            const std::string& pred,
                                            time::TimePoint t) {
  auto it = db.relations.find(pred);
  if (it == db.relations.end())
    throw DatabaseError("unknown predicate " + pred);
  std::set<std::vector<std::string>> out;
  for (const Tuple& tup : it->second.tuples)
    if (time::contains_point(tup.valid, t)) out.insert(tup.values);
  return out;
}

top::SymbolTable symbol_table(const Database& db) {
  top::SymbolTable syms;
  for (const auto& [name, rel] : db.relations)
    syms[name] = {static_cast<int>(rel.arity), rel.verb_class};
  return syms;
}

}  // namespace tqa::db
