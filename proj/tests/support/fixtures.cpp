#include "fixtures.hpp"

#include <stdexcept>

namespace tqa::test {

const std::string& demo_db_text() {
  static const std::string text = R"(# Demo database: tanks, engine repairs, adverts, bridge construction.
axis 1/1/1984 31/12/1995 day

relation contain/2 state
tuple contain tank2 water valid=5/1/1994..20/1/1994;10/3/1994..15/3/1994
tuple contain tank1 oil valid=1/1/1994..28/2/1994

relation run/1 activity
tuple run john valid=1/6/1994..1/6/1994

relation fixing/2 culm_activity
tuple fixing john eng2 valid=28/5/1994..1/6/1994 climax=1/6/1994
tuple fixing john eng1 valid=3/6/1994..7/6/1994
tuple fixing john eng3 valid=1/6/1994..1/6/1994 climax=1/6/1994

relation advertise/2 activity
tuple advertise ibi ppc valid=1/10/1984..20/10/1984

relation building/2 culm_activity
tuple building housecorp bridge2 valid=1/1/1984..30/12/1985 climax=30/12/1985

relation engine/1 timeless
tuple engine eng1
tuple engine eng2
tuple engine eng3

relation engineer/1 timeless
tuple engineer john
tuple engineer mary

relation tank/1 timeless
tuple tank tank1
tuple tank tank2
)";
  return text;
}

const db::Database& demo_db() {
  static const db::Database d = db::load_database(demo_db_text());
  return d;
}

const std::string& demo_lexicon_text() {
  static const std::string text = R"(# Demo lexicon matching the demo database.
verb contain state contain(subj,obj)
verb run activity run(subj) past=ran pastpart=run
verb fix culm_activity fixing(subj,obj) past=fixed pastpart=fixed prespart=fixing
verb advertise activity advertise(subj,obj)
verb build culm_activity building(subj,obj) past=built pastpart=built

noun engine engine
noun engineer engineer
noun tank tank

name john john
name mary mary
name water water
name oil oil
name tank_1 tank1
name tank_2 tank2
name engine_1 eng1
name engine_2 eng2
name engine_3 eng3
name ibi ibi
name ppc ppc
name housecorp housecorp
name bridge_2 bridge2
)";
  return text;
}

const lex::Lexicon& demo_lexicon() {
  static const lex::Lexicon lx = lex::load_lexicon(demo_lexicon_text());
  return lx;
}

time::TimePoint day_point(const time::Axis& axis, const std::string& date) {
  time::TemporalSet s = time::resolve_pattern(time::parse_date_expr(date), axis);
  if (s.periods.size() != 1)
    throw std::logic_error("day off axis: " + date);
  return s.periods[0].start;
}

time::Period day_span(const time::Axis& axis, const std::string& from,
                      const std::string& to) {
  time::TemporalSet a = time::resolve_pattern(time::parse_date_expr(from), axis);
  time::TemporalSet b = time::resolve_pattern(time::parse_date_expr(to), axis);
  if (a.periods.size() != 1 || b.periods.size() != 1)
    throw std::logic_error("day span off axis: " + from + ".." + to);
  return {a.periods[0].start, b.periods[0].end};
}

}  // namespace tqa::test
