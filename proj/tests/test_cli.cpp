#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <string>

#include "json.hpp"

#include "sqlfix/correct.hpp"
#include "sqlfix/util.hpp"

using namespace sqlfix;

namespace {

const std::string kCli = CLI_PATH;
const std::string kFixtures = FIXTURES_DIR;

struct Workdir {
  std::string path;
  explicit Workdir(const std::string& name) : path("/tmp/sqlfix_cli_" + name) {
    std::system(("rm -rf " + path + " && mkdir -p " + path).c_str());
  }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

int run(const std::string& args) {
  std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void run_pipeline(const Workdir& w) {
  REQUIRE(run("ingest --input " + kFixtures + "/mini_corpus.jsonl --output " +
              w.file("kept.jsonl") + " --report " + w.file("report.json")) == 0);
  REQUIRE(run("build-pool --input " + w.file("kept.jsonl") +
              " --split train --generator mock:" + kFixtures +
              "/gen_replies.jsonl --out " + w.file("pool.jsonl")) == 0);
  REQUIRE(run("correct --input " + w.file("kept.jsonl") +
              " --split test --pool " + w.file("pool.jsonl") +
              " --generator mock:" + kFixtures + "/gen_replies.jsonl" +
              " --client mock:" + kFixtures + "/rag_replies.jsonl" +
              " --mode ragprompt --strategy nlq+sql+error --shots 1 --out " +
              w.file("attempts.jsonl")) == 0);
  REQUIRE(run("evaluate --input " + w.file("kept.jsonl") + " --attempts " +
              w.file("attempts.jsonl") + " --out " + w.file("outcomes.jsonl") +
              " --report-out " + w.file("report.txt")) == 0);
}

}  // namespace

TEST_CASE("help exits zero for every command") {
  CHECK(run("--help") == 0);
  for (const char* sub : {"ingest", "build-pool", "correct", "evaluate", "report"})
    CHECK(run(std::string(sub) + " --help") == 0);
}

TEST_CASE("missing inputs exit nonzero") {
  CHECK(run("ingest --input /nonexistent/x.jsonl --output /tmp/sqlfix_cli_x.jsonl") == 1);
  CHECK(run("ingest") == 1);
  CHECK(run("evaluate --input /nonexistent/x.jsonl --attempts /nonexistent/y.jsonl"
            " --out /tmp/sqlfix_cli_y.jsonl") == 1);
}

TEST_CASE("full mock pipeline produces the engineered outcome") {
  Workdir w("pipeline");
  run_pipeline(w);

  nlohmann::json report = nlohmann::json::parse(read_file(w.file("report.json")));
  CHECK(report.at("kept").get<int>() == 30);

  auto pool_lines = split_lines(read_file(w.file("pool.jsonl")));
  nlohmann::json manifest = nlohmann::json::parse(pool_lines.at(0));
  CHECK(manifest.at("build_stats").at("stored").get<int>() == 15);
  CHECK(manifest.at("build_stats").at("correct_skipped").get<int>() == 3);
  CHECK(manifest.at("build_stats").at("unparseable_discarded").get<int>() == 2);

  auto attempts = attempts_from_jsonl(read_file(w.file("attempts.jsonl")));
  CHECK(attempts.size() == 10);

  std::string grid = read_file(w.file("report.txt"));
  CHECK(grid.find("RAG using embedding of NLQ, Predicted SQL, and SQL Error") !=
        std::string::npos);
  CHECK(grid.find("60.0%") != std::string::npos);
  CHECK(grid.find("66.7%") != std::string::npos);
}

TEST_CASE("pipeline reruns are byte identical") {
  Workdir a("det_a");
  Workdir b("det_b");
  run_pipeline(a);
  run_pipeline(b);
  for (const char* name :
       {"kept.jsonl", "report.json", "pool.jsonl", "attempts.jsonl",
        "outcomes.jsonl", "report.txt"})
    CHECK(read_file(a.file(name)) == read_file(b.file(name)));
}

TEST_CASE("mode none copies predictions through") {
  Workdir w("none");
  REQUIRE(run("ingest --input " + kFixtures + "/mini_corpus.jsonl --output " +
              w.file("kept.jsonl")) == 0);
  REQUIRE(run("correct --input " + w.file("kept.jsonl") +
              " --split test --generator mock:" + kFixtures +
              "/gen_replies.jsonl --client mock:" + kFixtures +
              "/simple_replies.jsonl --mode none --shots 0 --out " +
              w.file("attempts.jsonl")) == 0);
  auto attempts = attempts_from_jsonl(read_file(w.file("attempts.jsonl")));
  REQUIRE(attempts.size() == 10);
  for (const auto& a : attempts) {
    CHECK(a.corrected_sql == a.original_sql);
    CHECK(a.prompt_text.empty());
  }
}

TEST_CASE("config file supplies defaults and flags win") {
  Workdir w("config");
  nlohmann::ordered_json cfg;
  cfg["input"] = kFixtures + "/mini_corpus.jsonl";
  cfg["output"] = w.file("kept_from_config.jsonl");
  write_file(w.file("cfg.json"), cfg.dump());

  REQUIRE(run("ingest --config " + w.file("cfg.json")) == 0);
  CHECK(file_exists(w.file("kept_from_config.jsonl")));

  REQUIRE(run("ingest --config " + w.file("cfg.json") + " --output " +
              w.file("kept_flag.jsonl")) == 0);
  CHECK(file_exists(w.file("kept_flag.jsonl")));
}

TEST_CASE("empty kept set builds an empty pool and exits zero") {
  Workdir w("empty_pool");
  write_file(w.file("kept.jsonl"), "");
  REQUIRE(run("build-pool --input " + w.file("kept.jsonl") +
              " --generator mock:" + kFixtures + "/gen_replies.jsonl --out " +
              w.file("pool.jsonl")) == 0);
  auto lines = split_lines(read_file(w.file("pool.jsonl")));
  REQUIRE(lines.size() == 1);  // manifest only
  nlohmann::json manifest = nlohmann::json::parse(lines[0]);
  CHECK(manifest.at("example_count").get<int>() == 0);
}

TEST_CASE("shots are validated per mode") {
  Workdir w("shots");
  REQUIRE(run("ingest --input " + kFixtures + "/mini_corpus.jsonl --output " +
              w.file("kept.jsonl")) == 0);
  CHECK(run("correct --input " + w.file("kept.jsonl") +
            " --split test --generator mock:" + kFixtures +
            "/gen_replies.jsonl --client mock:" + kFixtures +
            "/rag_replies.jsonl --mode ragprompt --shots 2 --out " +
            w.file("attempts.jsonl")) == 1);
  CHECK(run("correct --input " + w.file("kept.jsonl") +
            " --split test --generator mock:" + kFixtures +
            "/gen_replies.jsonl --client mock:" + kFixtures +
            "/simple_replies.jsonl --mode none --shots 1 --out " +
            w.file("attempts.jsonl")) == 1);
}

TEST_CASE("embedder mismatch against a saved pool exits nonzero") {
  Workdir w("mismatch");
  REQUIRE(run("ingest --input " + kFixtures + "/mini_corpus.jsonl --output " +
              w.file("kept.jsonl")) == 0);
  REQUIRE(run("build-pool --input " + w.file("kept.jsonl") +
              " --split train --generator mock:" + kFixtures +
              "/gen_replies.jsonl --out " + w.file("pool.jsonl")) == 0);
  CHECK(run("correct --input " + w.file("kept.jsonl") +
            " --split test --pool " + w.file("pool.jsonl") +
            " --embedder-dim 64 --generator mock:" + kFixtures +
            "/gen_replies.jsonl --client mock:" + kFixtures +
            "/rag_replies.jsonl --mode ragprompt --shots 1 --out " +
            w.file("attempts.jsonl")) == 1);
}

TEST_CASE("ingest filter fixture counts match construction") {
  Workdir w("filter");
  REQUIRE(run("ingest --input " + kFixtures + "/ingest_fixture.jsonl --output " +
              w.file("kept.jsonl") + " --report " + w.file("report.json")) == 0);
  nlohmann::json report = nlohmann::json::parse(read_file(w.file("report.json")));
  CHECK(report.at("kept").get<int>() == 4);
  CHECK(report.at("dropped_db_creation").get<int>() == 2);
  CHECK(report.at("dropped_golden_error").get<int>() == 2);
  CHECK(report.at("dropped_golden_empty").get<int>() == 2);
}
