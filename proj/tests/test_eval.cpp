#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <string>
#include <vector>

#include "sqlfix/errors.hpp"
#include "sqlfix/eval.hpp"

using namespace sqlfix;

namespace {

const char* kDdl =
    "CREATE TABLE t(a INTEGER, b TEXT);"
    "INSERT INTO t VALUES (1, 'x'); INSERT INTO t VALUES (2, 'y');";

DatasetRecord record(const std::string& id, const std::string& golden) {
  DatasetRecord r;
  r.id = id;
  r.nlq = "q " + id;
  r.schema_ddl = kDdl;
  r.golden_sql = golden;
  return r;
}

CorrectionAttempt attempt(const std::string& id, const std::string& original,
                          const std::string& corrected,
                          const std::string& mode = "ragprompt", int shots = 1,
                          const std::string& strategy = "nlq+sql+error") {
  CorrectionAttempt a;
  a.record_id = id;
  a.nlq = "q " + id;
  a.original_sql = original;
  a.corrected_sql = corrected;
  a.mode = mode;
  a.shots = shots;
  a.strategy = strategy;
  return a;
}

EvalOutcome outcome(ExecStatus pre, ExecStatus post, const std::string& mode,
                    int shots, const std::string& strategy) {
  EvalOutcome o;
  o.record_id = "r";
  o.pre_status = pre;
  o.post_status = post;
  o.mode = mode;
  o.shots = shots;
  o.strategy = strategy;
  return o;
}

}  // namespace

TEST_CASE("evaluate classifies pre and post statuses") {
  std::vector<DatasetRecord> records = {record("r1", "SELECT a FROM t"),
                                        record("r2", "SELECT a FROM t"),
                                        record("r3", "SELECT a FROM t")};
  std::vector<CorrectionAttempt> attempts = {
      // Original equals golden: correct before and after.
      attempt("r1", "SELECT a FROM t", "SELECT a FROM t"),
      // Unknown column, corrected to golden: a fix.
      attempt("r2", "SELECT nope FROM t", "SELECT a FROM t"),
      // Wrong result, untouched (mode none echoes).
      attempt("r3", "SELECT b FROM t", "SELECT b FROM t", "none", 0, ""),
  };
  auto outcomes = evaluate(attempts, records);
  REQUIRE(outcomes.size() == 3);
  CHECK(outcomes[0].pre_status == ExecStatus::Correct);
  CHECK(outcomes[0].post_status == ExecStatus::Correct);
  CHECK(outcomes[1].pre_status == ExecStatus::ExecError);
  CHECK(outcomes[1].post_status == ExecStatus::Correct);
  CHECK(outcomes[2].pre_status == ExecStatus::WrongResult);
  CHECK(outcomes[2].post_status == ExecStatus::WrongResult);
}

TEST_CASE("evaluate honors golden row order") {
  std::vector<DatasetRecord> records = {
      record("o1", "SELECT a FROM t ORDER BY a DESC")};
  std::vector<CorrectionAttempt> attempts = {
      attempt("o1", "SELECT a FROM t ORDER BY a", "SELECT a FROM t ORDER BY a")};
  auto outcomes = evaluate(attempts, records);
  CHECK(outcomes[0].pre_status == ExecStatus::WrongResult);
}

TEST_CASE("missing records are reported") {
  std::vector<DatasetRecord> records = {record("known", "SELECT a FROM t")};
  std::vector<CorrectionAttempt> attempts = {
      attempt("unknown", "SELECT a FROM t", "SELECT a FROM t")};
  CHECK_THROWS_AS(evaluate(attempts, records), MissingRecord);
}

TEST_CASE("hand-labeled twenty-record fixture matches hand computation") {
  // 8 correct, 7 exec errors (4 fixed), 5 wrong results (never corrected).
  std::vector<DatasetRecord> records;
  std::vector<CorrectionAttempt> attempts;
  int n = 0;
  auto add = [&](const std::string& original, const std::string& corrected) {
    std::string id = "rec" + std::to_string(n++);
    records.push_back(record(id, "SELECT a FROM t"));
    attempts.push_back(attempt(id, original, corrected));
  };
  for (int i = 0; i < 8; ++i) add("SELECT a FROM t", "SELECT a FROM t");
  for (int i = 0; i < 4; ++i) add("SELECT missing FROM t", "SELECT a FROM t");
  for (int i = 0; i < 3; ++i)
    add("SELECT missing FROM t", "SELECT still_wrong FROM t");
  for (int i = 0; i < 5; ++i) add("SELECT b FROM t", "SELECT b FROM t");

  auto outcomes = evaluate(attempts, records);
  EvalReport report = compute_report(outcomes);
  REQUIRE(report.rows.size() == 1);
  const EvalRow& row = report.rows[0];
  CHECK(row.total == 20);
  CHECK(row.pre_correct == 8);
  CHECK(row.pre_exec_error == 7);
  CHECK(row.pre_wrong_result == 5);
  CHECK(row.fixed == 4);
  // Hand computation: accuracy (8+4)/20 = 60.0%, fix rate 4/7 = 57.142...%.
  CHECK(row.execution_accuracy == doctest::Approx(0.60).epsilon(1e-9));
  CHECK(row.fix_rate == doctest::Approx(4.0 / 7.0).epsilon(1e-9));
  CHECK(row.pre_correct + row.pre_exec_error + row.pre_wrong_result == row.total);
  CHECK(row.execution_accuracy >= double(row.pre_correct) / double(row.total));
  CHECK(row.fixed <= row.pre_exec_error);
}

TEST_CASE("392 of 1000 exec errors fixed renders as 39.2%") {
  std::vector<EvalOutcome> outcomes;
  for (int i = 0; i < 1000; ++i)
    outcomes.push_back(outcome(ExecStatus::ExecError,
                               i < 392 ? ExecStatus::Correct : ExecStatus::ExecError,
                               "ragprompt", 3, "nlq+sql+error"));
  EvalReport report = compute_report(outcomes);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].fix_rate == doctest::Approx(0.392).epsilon(1e-12));
  std::string text = render_report_text(report);
  CHECK(text.find("39.2%") != std::string::npos);
}

TEST_CASE("all-correct batch: full accuracy, undefined fix rate") {
  std::vector<EvalOutcome> outcomes(
      10, outcome(ExecStatus::Correct, ExecStatus::Correct, "none", 0, ""));
  EvalReport report = compute_report(outcomes);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].execution_accuracy == 1.0);
  CHECK_FALSE(report.rows[0].fix_rate_defined);
  std::string text = render_report_text(report);
  CHECK(text.find("100.0%") != std::string::npos);
  CHECK(text.find("n/a") != std::string::npos);
}

TEST_CASE("report grid carries the seven method rows") {
  std::vector<EvalOutcome> outcomes;
  auto push = [&](const std::string& mode, int shots, const std::string& strategy,
                  int fixed, int errors) {
    for (int i = 0; i < errors; ++i)
      outcomes.push_back(outcome(ExecStatus::ExecError,
                                 i < fixed ? ExecStatus::Correct
                                           : ExecStatus::ExecError,
                                 mode, shots, strategy));
    outcomes.push_back(outcome(ExecStatus::Correct, ExecStatus::Correct, mode,
                               shots, strategy));
  };
  push("none", 0, "", 0, 4);
  push("simple0shot", 0, "", 1, 4);
  for (const char* strat : {"error", "nlq", "sql", "nlq+sql", "nlq+sql+error"}) {
    push("ragprompt", 1, strat, 2, 4);
    push("ragprompt", 3, strat, 3, 4);
  }

  EvalReport report = compute_report(outcomes);
  std::string text = render_report_text(report);
  const char* labels[] = {
      "Baseline without Error Correction",
      "Baseline with Simple Error Correction",
      "RAG using embedding of SQL Error",
      "RAG using embedding of NLQ",
      "RAG using embedding of Predicted SQL",
      "RAG using embedding of NLQ and Predicted SQL",
      "RAG using embedding of NLQ, Predicted SQL, and SQL Error",
  };
  size_t last = 0;
  for (const char* label : labels) {
    size_t pos = text.find(label);
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= last);  // canonical order
    last = pos;
  }
  CHECK(text.find("0-shot") != std::string::npos);
  CHECK(text.find("1-shot") != std::string::npos);
  CHECK(text.find("3-shot") != std::string::npos);
  CHECK(text.find("Additional configurations") == std::string::npos);

  // Baseline fix rate is 0%.
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (line.find("Baseline without Error Correction") != std::string::npos)
      CHECK(line.find("0.0%") != std::string::npos);
}

TEST_CASE("csv renders rows and survives a reparse") {
  std::vector<EvalOutcome> outcomes;
  for (int i = 0; i < 5; ++i)
    outcomes.push_back(outcome(i < 2 ? ExecStatus::Correct : ExecStatus::ExecError,
                               i < 3 ? ExecStatus::Correct : ExecStatus::ExecError,
                               "ragprompt", 1, "nlq"));
  EvalReport report = compute_report(outcomes);
  std::string csv = render_report_csv(report);

  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  CHECK(header.find("execution_accuracy_pct") != std::string::npos);
  std::getline(in, row);
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream row_in(row);
  while (std::getline(row_in, cell, ',')) cells.push_back(cell);
  REQUIRE(cells.size() == 10);
  CHECK(cells[0] == "ragprompt");
  CHECK(cells[1] == "1");
  CHECK(cells[2] == "nlq");
  CHECK(cells[3] == "60.0");  // (2 + 1 fixed) / 5
  CHECK(cells[4] == "33.3");  // 1 / 3
  CHECK(cells[5] == "5");
  CHECK(cells[6] == "2");
  CHECK(cells[7] == "3");
  CHECK(cells[8] == "0");
  CHECK(cells[9] == "1");

  // Rendering the same report again is byte-identical.
  CHECK(render_report_csv(report) == csv);
}

TEST_CASE("applyscript rows land outside the grid") {
  std::vector<EvalOutcome> outcomes = {
      outcome(ExecStatus::ExecError, ExecStatus::Correct, "applyscript", 1,
              "nlq+sql+error")};
  std::string text = render_report_text(compute_report(outcomes));
  CHECK(text.find("Additional configurations") != std::string::npos);
  CHECK(text.find("mode=applyscript") != std::string::npos);
}

TEST_CASE("outcomes round trip through jsonl") {
  std::vector<EvalOutcome> outcomes = {
      outcome(ExecStatus::ExecError, ExecStatus::Correct, "ragprompt", 3, "nlq"),
      outcome(ExecStatus::Correct, ExecStatus::Correct, "none", 0, ""),
  };
  std::string jsonl = outcomes_to_jsonl(outcomes);
  auto loaded = outcomes_from_jsonl(jsonl);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].pre_status == ExecStatus::ExecError);
  CHECK(loaded[0].post_status == ExecStatus::Correct);
  CHECK(loaded[1].mode == "none");
  CHECK(outcomes_to_jsonl(loaded) == jsonl);
}
