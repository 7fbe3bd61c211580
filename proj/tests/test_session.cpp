#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "tqa/session.hpp"

using namespace tqa;

namespace {

// A session over the in-memory demo fixtures; no files involved.
cli::Session demo_session(const std::string& now = "8/6/1994") {
  cli::Session s;
  s.database = test::demo_db();
  s.lexicon = test::demo_lexicon();
  s.st = cli::resolve_now(now, s.database.axis);
  return s;
}

std::string ask(const cli::Session& s, const std::string& q,
                cli::Outcome* outcome = nullptr) {
  std::ostringstream out;
  cli::Outcome o = cli::answer_question(s, q, out);
  if (outcome) *outcome = o;
  return out.str();
}

// Demo database and lexicon written to disk once for the file-based tests.
struct DemoFiles {
  std::filesystem::path dir;
  DemoFiles() {
    dir = std::filesystem::temp_directory_path() / "tqa-session-tests";
    std::filesystem::create_directories(dir);
    write("demo.db", test::demo_db_text());
    write("demo.lex", test::demo_lexicon_text());
  }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    f << text;
  }
  std::string path(const std::string& name) const {
    return (dir / name).string();
  }
};

const DemoFiles& files() {
  static DemoFiles f;
  return f;
}

}  // namespace

TEST_SUITE("session") {

TEST_CASE("plain answers: booleans, rows, periods") {
  cli::Session s = demo_session();
  CHECK(ask(s, "Did tank 2 contain water?") == "yes\n");
  CHECK(ask(s, "Did tank 1 contain water?") == "no\n");
  CHECK(ask(s, "What did John fix?") == "eng2\neng3\n");
  CHECK(ask(s, "When did tank 2 contain water?") ==
        "5/1/1994..20/1/1994\n10/3/1994..15/3/1994\n");
  CHECK(ask(s, "Which tank contained oil?") == "tank1\n");
  CHECK(ask(s, "Who fixed engine 1?") == "(none)\n");
}

TEST_CASE("speech time comes from the session, not the clock") {
  CHECK(ask(demo_session("5/6/1994"), "Is John fixing engine 1?") == "yes\n");
  CHECK(ask(demo_session("8/6/1994"), "Is John fixing engine 1?") == "no\n");
  // Before the repairs nothing has happened yet.
  CHECK(ask(demo_session("1/1/1994"), "What did John fix?") == "(none)\n");
}

TEST_CASE("multiple readings are labeled in order") {
  cli::Session s = demo_session();
  std::string out = ask(s, "Had IBI advertised PPC on 1/1/85?");
  CHECK(out == "reading 1:\nyes\nreading 2:\nno\n");
  s.config.first_reading_only = true;
  CHECK(ask(s, "Had IBI advertised PPC on 1/1/85?") == "yes\n");
}

TEST_CASE("show flags print the formula and the translation first") {
  cli::Session s = demo_session();
  s.config.show_top = true;
  std::string out = ask(s, "Did tank 2 contain water?");
  CHECK(out == "Past[e1, contain(tank2, water)]\nyes\n");
  s.config.show_tsql2 = true;
  out = ask(s, "Did tank 2 contain water?");
  CHECK(out.substr(0, out.find('\n')) == "Past[e1, contain(tank2, water)]");
  CHECK(out.find("-- TOP:") != std::string::npos);
  CHECK(out.find("SELECT") != std::string::npos);
  CHECK(out.find("\nyes\n") != std::string::npos);
}

TEST_CASE("check mode confirms both paths agree") {
  cli::Session s = demo_session();
  s.config.check = true;
  CHECK(ask(s, "Did tank 2 contain water?") == "yes\nCHECK OK\n");
  std::string out = ask(s, "When did tank 2 contain water?");
  CHECK(out ==
        "5/1/1994..20/1/1994\n10/3/1994..15/3/1994\nCHECK OK\n");
  out = ask(s, "Had IBI advertised PPC on 1/1/85?");
  CHECK(out ==
        "reading 1:\nyes\nCHECK OK\nreading 2:\nno\nCHECK OK\n");
}

TEST_CASE("bad questions are reported and classified as user errors") {
  cli::Session s = demo_session();
  cli::Outcome o;
  std::string out = ask(s, "Colourless green ideas sleep furiously", &o);
  CHECK(out == "error: unknown word 'colourless' at token 1\n");
  CHECK(o.user_error);
  CHECK_FALSE(o.internal_error);
  out = ask(s, "Did John fix?", &o);
  CHECK(out.substr(0, 7) == "error: ");
  CHECK(o.user_error);
  // A well-formed question about a day beyond the axis.
  out = ask(s, "Did John run on 1/6/2024?", &o);
  CHECK(out.substr(0, 7) == "error: ");
  CHECK(o.user_error);
  CHECK_FALSE(o.internal_error);
}

TEST_CASE("repl answers until :quit and survives errors") {
  cli::Session s = demo_session();
  std::istringstream in(
      "Did tank 2 contain water?\n"
      "Colourless green ideas sleep furiously\n"
      "What did John fix?\n"
      ":quit\n"
      "Did tank 1 contain oil?\n");
  std::ostringstream out;
  int code = cli::run_repl(s, in, out);
  CHECK(code == 0);
  CHECK(out.str() ==
        "> yes\n"
        "> error: unknown word 'colourless' at token 1\n"
        "> eng2\neng3\n"
        "> ");
}

TEST_CASE("repl closes the prompt line at end of input") {
  cli::Session s = demo_session();
  std::istringstream in("Did tank 2 contain water?\n");
  std::ostringstream out;
  CHECK(cli::run_repl(s, in, out) == 0);
  CHECK(out.str() == "> yes\n> \n");
}

TEST_CASE("batch echoes questions, skips comments, counts failures") {
  cli::Session s = demo_session();
  const std::string questions =
      "# demo corpus\n"
      "\n"
      "Did tank 2 contain water?\n"
      "What did John fix?\n"
      "Gribble?\n";
  std::istringstream in(questions);
  std::ostringstream out;
  int code = cli::run_batch(s, in, out);
  CHECK(code == 0);
  CHECK(out.str() ==
        "> Did tank 2 contain water?\n"
        "yes\n"
        "> What did John fix?\n"
        "eng2\neng3\n"
        "> Gribble?\n"
        "error: unknown word 'gribble' at token 1\n"
        "1 question(s) failed\n");
  // Byte-identical on a second run.
  std::istringstream in2(questions);
  std::ostringstream out2;
  CHECK(cli::run_batch(s, in2, out2) == code);
  CHECK(out2.str() == out.str());
}

TEST_CASE("empty batch input produces empty output and exit 0") {
  cli::Session s = demo_session();
  for (const char* text : {"", "\n\n", "# only comments\n\n# more\n"}) {
    std::istringstream in(text);
    std::ostringstream out;
    CHECK(cli::run_batch(s, in, out) == 0);
    CHECK(out.str().empty());
  }
}

TEST_CASE("open_session loads files and resolves the speech time") {
  cli::SessionConfig cfg;
  cfg.db_path = files().path("demo.db");
  cfg.lexicon_path = files().path("demo.lex");
  cfg.now = "8/6/1994";
  cli::Session s = cli::open_session(cfg);
  CHECK(s.st == test::day_point(s.database.axis, "8/6/1994"));
  CHECK(ask(s, "Did tank 2 contain water?") == "yes\n");
  CHECK(s.lexicon.verbs.count("fix") == 1);
}

TEST_CASE("open_session rejects bad paths and bad speech times") {
  cli::SessionConfig cfg;
  cfg.db_path = files().path("demo.db");
  cfg.lexicon_path = files().path("demo.lex");
  cfg.now = "8/6/1994";

  cli::SessionConfig bad = cfg;
  bad.db_path = files().path("nonexistent.db");
  CHECK_THROWS_AS(cli::open_session(bad), cli::SessionError);

  bad = cfg;
  bad.lexicon_path = files().path("nonexistent.lex");
  CHECK_THROWS_AS(cli::open_session(bad), cli::SessionError);

  for (const char* now :
       {"", "31/2/1994", "1/1/2001", "8/6/1994 14:00", "14:00", "soon"}) {
    bad = cfg;
    bad.now = now;
    CAPTURE(now);
    CHECK_THROWS_AS(cli::open_session(bad), cli::SessionError);
  }
}

TEST_CASE("open_session cross-checks the lexicon against the schema") {
  const struct {
    const char* extra;
    const char* message_part;
  } cases[] = {
      {"verb paint activity paint(subj,obj)\n", "not a database relation"},
      {"verb rest state fixing(subj,obj)\n", "does not match"},
      {"verb glow state contain(subj)\n", "argument(s)"},
      {"noun widget gadget\n", "not a database relation"},
      {"noun blob contain\n", "must be unary"},
  };
  for (const auto& c : cases) {
    CAPTURE(c.extra);
    files().write("bad.lex", test::demo_lexicon_text() + c.extra);
    cli::SessionConfig cfg;
    cfg.db_path = files().path("demo.db");
    cfg.lexicon_path = files().path("bad.lex");
    cfg.now = "8/6/1994";
    CHECK_THROWS_WITH_AS(cli::open_session(cfg),
                         doctest::Contains(c.message_part),
                         cli::SessionError);
  }
}

TEST_CASE("resolve_now accepts clock parts at matching granularity") {
  time::Axis day = test::demo_db().axis;
  CHECK(cli::resolve_now("8/6/1994", day) ==
        test::day_point(day, "8/6/1994"));
  CHECK(cli::resolve_now("  8/6/1994  ", day) ==
        test::day_point(day, "8/6/1994"));
  time::Axis minute = time::make_axis({1994, 6, 1}, {1994, 6, 2},
                                      time::Granularity::Minute);
  CHECK(cli::resolve_now("1/6/1994 00:01", minute) == 1);
  CHECK(cli::resolve_now("1/6/1994", minute) == 0);
  CHECK_THROWS_AS(cli::resolve_now("8/6/1994 00:01", minute),
                  cli::SessionError);
}

}  // TEST_SUITE
