#include "tqa/time.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace tqa::time {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw TimeError(msg); }

int to_int(std::string_view s) {
  int value = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || p != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
  return value;
}

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Period make_period(TimePoint start, TimePoint end) {
  if (start > end)
    fail("period start " + std::to_string(start) + " after end " + std::to_string(end));
  return Period{start, end};
}

TemporalSet normalize(std::vector<Period> periods) {
  std::sort(periods.begin(), periods.end());
  TemporalSet out;
  for (const Period& p : periods) {
    if (!out.periods.empty() && p.start <= out.periods.back().end + 1)
      out.periods.back().end = std::max(out.periods.back().end, p.end);
    else
      out.periods.push_back(p);
  }
  return out;
}

bool contains(const TemporalSet& ts, Period p) {
  // Last maximal period starting at or before p.start.
  auto it = std::upper_bound(ts.periods.begin(), ts.periods.end(), p.start,
                             [](TimePoint t, const Period& q) { return t < q.start; });
  if (it == ts.periods.begin()) return false;
  --it;
  return p.end <= it->end;
}

bool contains(const TemporalSet& outer, const TemporalSet& inner) {
  return std::all_of(inner.periods.begin(), inner.periods.end(),
                     [&](const Period& p) { return contains(outer, p); });
}

bool contains_point(const TemporalSet& ts, TimePoint t) {
  return contains(ts, Period{t, t});
}

TemporalSet intersect(const TemporalSet& ts, Period window) {
  TemporalSet out;
  for (const Period& p : ts.periods) {
    TimePoint s = std::max(p.start, window.start);
    TimePoint e = std::min(p.end, window.end);
    if (s <= e) out.periods.push_back(Period{s, e});
  }
  return out;
}

TemporalSet intersect(const TemporalSet& a, const TemporalSet& b) {
  TemporalSet out;
  std::size_t i = 0, j = 0;
  while (i < a.periods.size() && j < b.periods.size()) {
    TimePoint s = std::max(a.periods[i].start, b.periods[j].start);
    TimePoint e = std::min(a.periods[i].end, b.periods[j].end);
    if (s <= e) out.periods.push_back(Period{s, e});
    if (a.periods[i].end < b.periods[j].end) ++i; else ++j;
  }
  return out;
}

TemporalSet unite(const TemporalSet& a, const TemporalSet& b) {
  std::vector<Period> all = a.periods;
  all.insert(all.end(), b.periods.begin(), b.periods.end());
  return normalize(std::move(all));
}

// ---------------------------------------------------------------------------

std::string granularity_name(Granularity g) {
  switch (g) {
    case Granularity::Day: return "day";
    case Granularity::Hour: return "hour";
    case Granularity::Minute: return "minute";
  }
  return "?";
}

std::optional<Granularity> granularity_from_name(std::string_view name) {
  if (name == "day") return Granularity::Day;
  if (name == "hour") return Granularity::Hour;
  if (name == "minute") return Granularity::Minute;
  return std::nullopt;
}

TimePoint points_per_day(Granularity g) {
  switch (g) {
    case Granularity::Day: return 1;
    case Granularity::Hour: return 24;
    case Granularity::Minute: return 1440;
  }
  return 1;
}

int last_day_of_month(int year, int month) {
  static constexpr std::array<int, 12> len{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  if (month == 2 && leap) return 29;
  return len[static_cast<std::size_t>(month - 1)];
}

bool valid_date(const CalendarDate& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= last_day_of_month(d.year, d.month);
}

// Howard Hinnant's civil-days algorithm; epoch 1/1/1970.
std::int64_t days_from_civil(const CalendarDate& d) {
  std::int64_t y = d.year;
  std::int64_t m = d.month;
  std::int64_t dd = d.day;
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const std::int64_t yoe = y - era * 400;
  const std::int64_t doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + dd - 1;
  const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

CalendarDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const std::int64_t doe = z - era * 146097;
  const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = yoe + era * 400;
  const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const std::int64_t mp = (5 * doy + 2) / 153;
  const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
  const std::int64_t m = mp + (mp < 10 ? 3 : -9);
  return CalendarDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m),
                      static_cast<int>(d)};
}

Axis make_axis(const CalendarDate& first, const CalendarDate& last,
               Granularity gran) {
  if (!valid_date(first) || !valid_date(last)) fail("invalid axis date");
  std::int64_t days = days_from_civil(last) - days_from_civil(first) + 1;
  if (days < 1) fail("axis end precedes start");
  TimePoint horizon = days * points_per_day(gran) - 1;
  if (horizon < 1) fail("axis must span at least two points");
  return Axis{first, gran, horizon};
}

CalendarStamp stamp_of_point(TimePoint p, const Axis& axis) {
  TimePoint ppd = points_per_day(axis.gran);
  std::int64_t day = p / ppd;
  std::int64_t rem = p % ppd;
  CalendarStamp s;
  s.date = civil_from_days(days_from_civil(axis.origin) + day);
  switch (axis.gran) {
    case Granularity::Day: break;
    case Granularity::Hour: s.hour = static_cast<int>(rem); break;
    case Granularity::Minute:
      s.hour = static_cast<int>(rem / 60);
      s.minute = static_cast<int>(rem % 60);
      break;
  }
  return s;
}

std::optional<TimePoint> point_of_stamp(const CalendarStamp& s, const Axis& axis) {
  if (!valid_date(s.date)) fail("invalid date");
  if (axis.gran == Granularity::Day && (s.hour != 0 || s.minute != 0))
    fail("time of day given on a day-granularity axis");
  if (axis.gran == Granularity::Hour && s.minute != 0)
    fail("minutes given on an hour-granularity axis");
  std::int64_t day = days_from_civil(s.date) - days_from_civil(axis.origin);
  TimePoint rem = 0;
  switch (axis.gran) {
    case Granularity::Day: break;
    case Granularity::Hour: rem = s.hour; break;
    case Granularity::Minute: rem = s.hour * 60 + s.minute; break;
  }
  TimePoint p = day * points_per_day(axis.gran) + rem;
  if (day < 0 || p < 0 || p > axis.horizon) return std::nullopt;
  return p;
}

// ---------------------------------------------------------------------------

bool looks_like_date(std::string_view text) {
  return text.find('/') != std::string_view::npos;
}

bool looks_like_time(std::string_view text) {
  return text.find(':') != std::string_view::npos;
}

DateExpr parse_date_expr(std::string_view text) {
  if (looks_like_date(text)) {
    std::size_t a = text.find('/');
    std::size_t b = text.find('/', a + 1);
    if (b == std::string_view::npos) fail("bad date '" + std::string(text) + "'");
    std::string_view ds = text.substr(0, a);
    std::string_view ms = text.substr(a + 1, b - a - 1);
    std::string_view ys = text.substr(b + 1);
    if (!all_digits(ds) || !all_digits(ms) || !all_digits(ys) ||
        (ys.size() != 2 && ys.size() != 4))
      fail("bad date '" + std::string(text) + "'");
    CalendarDate d;
    d.day = to_int(ds);
    d.month = to_int(ms);
    int y = to_int(ys);
    d.year = ys.size() == 2 ? (y >= 50 ? 1900 + y : 2000 + y) : y;
    if (!valid_date(d)) fail("invalid date '" + std::string(text) + "'");
    return DateExpr{DateExpr::Kind::Date, d, 0, 0};
  }
  if (looks_like_time(text)) {
    std::size_t c = text.find(':');
    std::string_view hs = text.substr(0, c);
    std::string_view rest = text.substr(c + 1);
    int pm = -1;  // -1 none, 0 am, 1 pm
    if (rest.size() >= 2) {
      std::string_view tail = rest.substr(rest.size() - 2);
      if (tail == "am") pm = 0;
      if (tail == "pm") pm = 1;
      if (pm >= 0) rest = rest.substr(0, rest.size() - 2);
    }
    if (!all_digits(hs) || !all_digits(rest) || rest.size() != 2)
      fail("bad time '" + std::string(text) + "'");
    int h = to_int(hs);
    int m = to_int(rest);
    if (pm >= 0) {
      if (h < 1 || h > 12) fail("bad time '" + std::string(text) + "'");
      h = h % 12 + (pm == 1 ? 12 : 0);
    }
    if (h < 0 || h > 23 || m < 0 || m > 59) fail("bad time '" + std::string(text) + "'");
    DateExpr e;
    e.kind = DateExpr::Kind::TimeOfDay;
    e.hour = h;
    e.minute = m;
    return e;
  }
  fail("expected a date or clock time, got '" + std::string(text) + "'");
}

namespace {

std::string two_digits(int v) {
  std::string s = std::to_string(v);
  return v < 10 ? "0" + s : s;
}

std::string render_date(const CalendarDate& d) {
  return std::to_string(d.day) + "/" + std::to_string(d.month) + "/" +
         std::to_string(d.year);
}

}  // namespace

std::string render_date_expr(const DateExpr& e) {
  if (e.kind == DateExpr::Kind::Date) return render_date(e.date);
  return two_digits(e.hour) + ":" + two_digits(e.minute);
}

TemporalSet resolve_pattern(const DateExpr& e, const Axis& axis) {
  TimePoint ppd = points_per_day(axis.gran);
  if (e.kind == DateExpr::Kind::Date) {
    std::int64_t day = days_from_civil(e.date) - days_from_civil(axis.origin);
    TimePoint s = day * ppd;
    TimePoint t = s + ppd - 1;
    s = std::max<TimePoint>(s, 0);
    t = std::min(t, axis.horizon);
    if (day < 0 || s > t)
      fail("date " + render_date(e.date) + " lies outside the axis");
    return TemporalSet{{Period{s, t}}};
  }
  TimePoint offset = 0;
  switch (axis.gran) {
    case Granularity::Day:
      fail("clock time " + render_date_expr(e) + " on a day-granularity axis");
    case Granularity::Hour:
      if (e.minute != 0)
        fail("clock time " + render_date_expr(e) + " on an hour-granularity axis");
      offset = e.hour;
      break;
    case Granularity::Minute:
      offset = e.hour * 60 + e.minute;
      break;
  }
  TemporalSet out;
  for (TimePoint p = offset; p <= axis.horizon; p += ppd)
    out.periods.push_back(Period{p, p});
  if (out.empty()) fail("clock time " + render_date_expr(e) + " lies outside the axis");
  return out;
}

std::string render_point(TimePoint p, const Axis& axis) {
  CalendarStamp s = stamp_of_point(p, axis);
  if (axis.gran == Granularity::Day) return render_date(s.date);
  return render_date(s.date) + " " + two_digits(s.hour) + ":" + two_digits(s.minute);
}

std::string render_period(Period p, const Axis& axis) {
  return render_point(p.start, axis) + ".." + render_point(p.end, axis);
}

// ---------------------------------------------------------------------------

std::string unit_name(Unit u) {
  switch (u) {
    case Unit::Minute: return "minute";
    case Unit::Hour: return "hour";
    case Unit::Day: return "day";
    case Unit::Week: return "week";
    case Unit::Month: return "month";
    case Unit::Year: return "year";
  }
  return "?";
}

std::optional<Unit> unit_from_name(std::string_view name) {
  if (name == "minute") return Unit::Minute;
  if (name == "hour") return Unit::Hour;
  if (name == "day") return Unit::Day;
  if (name == "week") return Unit::Week;
  if (name == "month") return Unit::Month;
  if (name == "year") return Unit::Year;
  return std::nullopt;
}

TimePoint unit_points(Unit u, Granularity g) {
  TimePoint day = points_per_day(g);
  TimePoint per_day_unit = 0;
  switch (u) {
    case Unit::Minute:
      if (g != Granularity::Minute) fail("unit minute finer than axis granularity");
      return 1;
    case Unit::Hour:
      if (g == Granularity::Day) fail("unit hour finer than axis granularity");
      return g == Granularity::Hour ? 1 : 60;
    case Unit::Day: per_day_unit = 1; break;
    case Unit::Week: per_day_unit = 7; break;
    case Unit::Month: per_day_unit = 30; break;
    case Unit::Year: per_day_unit = 365; break;
  }
  return per_day_unit * day;
}

TimePoint duration_points(Unit u, long count, Granularity g) {
  if (count < 1) fail("duration count must be positive");
  return unit_points(u, g) * count;
}

}  // namespace tqa::time
