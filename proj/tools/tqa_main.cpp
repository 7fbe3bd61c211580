#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tqa/session.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Answer English questions about a valid-time database"};
  tqa::cli::SessionConfig config;
  std::string readings = "all";
  std::string batch_path;
  app.add_option("--db", config.db_path, "Database file")->required();
  app.add_option("--lexicon", config.lexicon_path, "Lexicon file")->required();
  app.add_option("--now", config.now,
                 "Speech time, \"D/M/YYYY\" or \"D/M/YYYY HH:MM\"")
      ->required();
  app.add_flag("--show-top", config.show_top,
               "Print the logical form of each reading");
  app.add_flag("--show-tsql2", config.show_tsql2,
               "Print the TSQL2 translation of each reading");
  app.add_flag("--check", config.check,
               "Run both evaluation paths and report any divergence");
  app.add_option("--readings", readings, "Answer all readings or only the first")
      ->check(CLI::IsMember({"all", "first"}));
  app.add_option("--batch", batch_path,
                 "Answer the questions in this file, then exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }
  config.first_reading_only = (readings == "first");
  try {
    tqa::cli::Session session = tqa::cli::open_session(config);
    if (!batch_path.empty()) {
      std::ifstream in(batch_path, std::ios::binary);
      if (!in) {
        std::cerr << "error: cannot open batch file: " << batch_path << "\n";
        return 1;
      }
      return tqa::cli::run_batch(session, in, std::cout);
    }
    return tqa::cli::run_repl(session, std::cin, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
