// Discrete time core: bounded point axis, closed periods, coalesced period
// sets, and the calendar layer that maps date/clock expressions onto axis
// points.  Everything downstream (database, evaluator, algebra) works in
// axis points; only this module talks to the Gregorian calendar.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tqa::time {

using TimePoint = std::int64_t;

struct TimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Closed period [start, end], start <= end.  A single point is [p, p].
struct Period {
  TimePoint start = 0;
  TimePoint end = 0;
  friend bool operator==(const Period&, const Period&) = default;
  friend auto operator<=>(const Period&, const Period&) = default;
};

// Throws TimeError when start > end.
Period make_period(TimePoint start, TimePoint end);

inline TimePoint duration(Period p) { return p.end - p.start + 1; }

// True iff inner is a subperiod of outer.
inline bool subperiod(Period inner, Period outer) {
  return outer.start <= inner.start && inner.end <= outer.end;
}

// Sorted, pairwise disjoint, non-adjacent maximal periods.  The canonical
// representation of a set of time points; build via normalize().
struct TemporalSet {
  std::vector<Period> periods;

  bool empty() const { return periods.empty(); }
  friend bool operator==(const TemporalSet&, const TemporalSet&) = default;
};

// Coalesces arbitrary periods into canonical form.  Overlapping or adjacent
// input periods merge; idempotent on canonical input.
TemporalSet normalize(std::vector<Period> periods);

// True iff p is a subperiod of one maximal period of ts.
bool contains(const TemporalSet& ts, Period p);
// True iff every maximal period of inner is contained in outer.
bool contains(const TemporalSet& outer, const TemporalSet& inner);
bool contains_point(const TemporalSet& ts, TimePoint t);

TemporalSet intersect(const TemporalSet& ts, Period window);
TemporalSet intersect(const TemporalSet& a, const TemporalSet& b);
TemporalSet unite(const TemporalSet& a, const TemporalSet& b);

// ---------------------------------------------------------------------------
// Calendar layer.

enum class Granularity { Day, Hour, Minute };

std::string granularity_name(Granularity g);
std::optional<Granularity> granularity_from_name(std::string_view name);
TimePoint points_per_day(Granularity g);

struct CalendarDate {
  int year = 0;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  friend bool operator==(const CalendarDate&, const CalendarDate&) = default;
};

bool valid_date(const CalendarDate& d);
int last_day_of_month(int year, int month);
// Proleptic Gregorian day number (0 = 1/1/1970); inverse below.
std::int64_t days_from_civil(const CalendarDate& d);
CalendarDate civil_from_days(std::int64_t z);

// Point axis: point 0 is 00:00 of the origin day; horizon is the last valid
// point index (>= 1).
struct Axis {
  CalendarDate origin;
  Granularity gran = Granularity::Day;
  TimePoint horizon = 0;
};

// Axis covering the inclusive day span [first, last].  Throws when last
// precedes first or when the axis would hold fewer than two points.
Axis make_axis(const CalendarDate& first, const CalendarDate& last,
               Granularity gran);

inline TemporalSet full_axis(const Axis& axis) {
  return TemporalSet{{Period{0, axis.horizon}}};
}

// A calendar timestamp with granularity-dependent precision.
struct CalendarStamp {
  CalendarDate date;
  int hour = 0;
  int minute = 0;
  friend bool operator==(const CalendarStamp&, const CalendarStamp&) = default;
};

CalendarStamp stamp_of_point(TimePoint p, const Axis& axis);
// Exact granule for the stamp; nullopt when off the axis.  Sub-day fields
// finer than the axis granularity must be zero (throws otherwise).
std::optional<TimePoint> point_of_stamp(const CalendarStamp& s,
                                        const Axis& axis);

// ---------------------------------------------------------------------------
// Date expressions: the surface syntax shared by questions, formulas and
// database files.  DATE := d"/"m"/"(yy|yyyy) with two-digit pivot 50;
// TIME := h":"mm("am"|"pm")?.
struct DateExpr {
  enum class Kind { Date, TimeOfDay };
  Kind kind = Kind::Date;
  CalendarDate date;   // Kind::Date
  int hour = 0;        // Kind::TimeOfDay, 0..23
  int minute = 0;      // Kind::TimeOfDay, 0..59
  friend bool operator==(const DateExpr&, const DateExpr&) = default;
};

// Throws TimeError on malformed or invalid expressions ("31/2/94").
DateExpr parse_date_expr(std::string_view text);
bool looks_like_date(std::string_view text);
bool looks_like_time(std::string_view text);
// Canonical text: dates as "d/m/yyyy", clock times as 24-hour "HH:MM".
std::string render_date_expr(const DateExpr& e);

// Maps a date expression to axis periods: a date becomes the singleton set
// covering that calendar day (clipped to the axis); a clock time becomes one
// single-granule period per axis day.  Throws TimeError when the date lies
// outside the axis or the expression is finer than the axis granularity.
TemporalSet resolve_pattern(const DateExpr& e, const Axis& axis);

std::string render_point(TimePoint p, const Axis& axis);
// "D/M/YYYY..D/M/YYYY" at day granularity, "D/M/YYYY HH:MM.." below it.
std::string render_period(Period p, const Axis& axis);

// ---------------------------------------------------------------------------
// Duration units.

enum class Unit { Minute, Hour, Day, Week, Month, Year };

std::string unit_name(Unit u);
std::optional<Unit> unit_from_name(std::string_view name);
// Points per unit at the given granularity; months are 30 days and years
// 365 days by convention.  Throws when the unit is finer than the axis.
TimePoint unit_points(Unit u, Granularity g);
TimePoint duration_points(Unit u, long count, Granularity g);

}  // namespace tqa::time
