#include "sqlfix/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {
using ordered_json = nlohmann::ordered_json;
}

const char* exec_status_name(ExecStatus s) {
  switch (s) {
    case ExecStatus::Correct: return "correct";
    case ExecStatus::ExecError: return "exec_error";
    case ExecStatus::WrongResult: return "wrong_result";
  }
  return "?";
}

ExecStatus exec_status_from_name(const std::string& name) {
  if (name == "correct") return ExecStatus::Correct;
  if (name == "exec_error") return ExecStatus::ExecError;
  if (name == "wrong_result") return ExecStatus::WrongResult;
  throw Error("unknown status: " + name);
}

namespace {

ExecStatus status_against_golden(const DatasetRecord& record,
                                 const std::string& sql) {
  Database db = provision_database(record);
  ExecutionResult golden = execute(db, record.golden_sql);
  if (golden.error.has_value())
    throw Error("record " + record.id +
                ": golden SQL fails to execute; run ingest filtering first");
  ExecutionResult result = execute(db, sql);
  if (result.error.has_value()) return ExecStatus::ExecError;
  bool ordered = golden_is_ordered(record.golden_sql);
  return compare_results(result, golden, ordered) ? ExecStatus::Correct
                                                  : ExecStatus::WrongResult;
}

}  // namespace

std::vector<EvalOutcome> evaluate(const std::vector<CorrectionAttempt>& attempts,
                                  const std::vector<DatasetRecord>& records) {
  std::unordered_map<std::string, const DatasetRecord*> by_id;
  for (const DatasetRecord& r : records) by_id[r.id] = &r;

  std::vector<EvalOutcome> outcomes;
  outcomes.reserve(attempts.size());
  for (const CorrectionAttempt& a : attempts) {
    auto it = by_id.find(a.record_id);
    if (it == by_id.end())
      throw MissingRecord("attempt references unknown record id " + a.record_id);
    const DatasetRecord& record = *it->second;

    EvalOutcome o;
    o.record_id = a.record_id;
    o.mode = a.mode;
    o.shots = a.shots;
    o.strategy = a.strategy;
    o.pre_status = status_against_golden(record, a.original_sql);
    if (o.pre_status == ExecStatus::Correct) {
      o.post_status = ExecStatus::Correct;  // correct predictions stay as-is
    } else if (a.corrected_sql == a.original_sql) {
      o.post_status = o.pre_status;
    } else {
      o.post_status = status_against_golden(record, a.corrected_sql);
    }
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

namespace {

int method_rank(const std::string& mode, const std::string& strategy) {
  if (mode == "none") return 0;
  if (mode == "simple0shot") return 1;
  if (mode == "ragprompt") {
    if (strategy == "error") return 2;
    if (strategy == "nlq") return 3;
    if (strategy == "sql") return 4;
    if (strategy == "nlq+sql") return 5;
    if (strategy == "nlq+sql+error") return 6;
    return 7;
  }
  return 8;
}

}  // namespace

EvalReport compute_report(const std::vector<EvalOutcome>& outcomes) {
  using Key = std::tuple<int, std::string, int, std::string>;
  std::map<Key, EvalRow> rows;
  std::map<Key, size_t> post_correct;
  for (const EvalOutcome& o : outcomes) {
    Key key = std::make_tuple(method_rank(o.mode, o.strategy), o.mode, o.shots,
                              o.strategy);
    EvalRow& row = rows[key];
    row.mode = o.mode;
    row.shots = o.shots;
    row.strategy = o.strategy;
    ++row.total;
    switch (o.pre_status) {
      case ExecStatus::Correct: ++row.pre_correct; break;
      case ExecStatus::ExecError: ++row.pre_exec_error; break;
      case ExecStatus::WrongResult: ++row.pre_wrong_result; break;
    }
    if (o.post_status == ExecStatus::Correct) ++post_correct[key];
    // The fix rate only counts execution errors made correct; corrections of
    // wrong results affect accuracy but never the fix rate.
    if (o.pre_status == ExecStatus::ExecError &&
        o.post_status == ExecStatus::Correct)
      ++row.fixed;
  }

  EvalReport report;
  for (auto& [key, row] : rows) {
    row.execution_accuracy =
        row.total == 0 ? 0.0 : double(post_correct[key]) / double(row.total);
    row.fix_rate_defined = row.pre_exec_error > 0;
    row.fix_rate = row.fix_rate_defined
                       ? double(row.fixed) / double(row.pre_exec_error)
                       : 0.0;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
  return buf;
}

std::string pct_number(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", fraction * 100.0);
  return buf;
}

struct GridMethod {
  const char* label;
  const char* mode;
  const char* strategy;  // empty: any
};

constexpr GridMethod kGrid[] = {
    {"Baseline without Error Correction", "none", ""},
    {"Baseline with Simple Error Correction", "simple0shot", ""},
    {"RAG using embedding of SQL Error", "ragprompt", "error"},
    {"RAG using embedding of NLQ", "ragprompt", "nlq"},
    {"RAG using embedding of Predicted SQL", "ragprompt", "sql"},
    {"RAG using embedding of NLQ and Predicted SQL", "ragprompt", "nlq+sql"},
    {"RAG using embedding of NLQ, Predicted SQL, and SQL Error", "ragprompt",
     "nlq+sql+error"},
};

const EvalRow* find_row(const EvalReport& report, const GridMethod& method,
                        int shots) {
  for (const EvalRow& row : report.rows) {
    if (row.mode != method.mode || row.shots != shots) continue;
    if (method.strategy[0] != '\0' && row.strategy != method.strategy) continue;
    return &row;
  }
  return nullptr;
}

bool row_in_grid(const EvalRow& row) {
  for (const GridMethod& m : kGrid) {
    if (row.mode != m.mode) continue;
    if (m.strategy[0] != '\0' && row.strategy != m.strategy) continue;
    bool shots_ok = (row.mode == std::string("ragprompt"))
                        ? (row.shots == 1 || row.shots == 3)
                        : row.shots == 0;
    if (shots_ok) return true;
  }
  return false;
}

}  // namespace

std::string render_report_text(const EvalReport& report) {
  size_t width = 0;
  for (const GridMethod& m : kGrid) width = std::max(width, std::strlen(m.label));

  std::ostringstream out;
  auto pad = [&](const std::string& s, size_t w) {
    out << s;
    for (size_t i = s.size(); i < w; ++i) out << ' ';
  };

  pad("Method", width);
  out << " | Execution Accuracy      | Fix Rate\n";
  pad("", width);
  out << " | 0-shot  1-shot  3-shot  | 0-shot  1-shot  3-shot\n";
  for (size_t i = 0; i < width; ++i) out << '-';
  out << "-+-------------------------+------------------------\n";

  const int shots_columns[] = {0, 1, 3};
  for (const GridMethod& m : kGrid) {
    pad(m.label, width);
    out << " |";
    for (int shots : shots_columns) {
      const EvalRow* row = find_row(report, m, shots);
      pad(" " + (row != nullptr ? pct(row->execution_accuracy) : std::string("NA")), 8);
    }
    out << " |";
    for (int shots : shots_columns) {
      const EvalRow* row = find_row(report, m, shots);
      std::string cell = "NA";
      if (row != nullptr)
        cell = row->fix_rate_defined ? pct(row->fix_rate) : "n/a";
      pad(" " + cell, 8);
    }
    out << '\n';
  }

  bool extra_header = false;
  for (const EvalRow& row : report.rows) {
    if (row_in_grid(row)) continue;
    if (!extra_header) {
      out << "\nAdditional configurations:\n";
      extra_header = true;
    }
    out << "  mode=" << row.mode << " shots=" << row.shots
        << " strategy=" << row.strategy
        << " accuracy=" << pct(row.execution_accuracy) << " fix_rate="
        << (row.fix_rate_defined ? pct(row.fix_rate) : std::string("n/a"))
        << '\n';
  }
  return out.str();
}

std::string render_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "mode,shots,strategy,execution_accuracy_pct,fix_rate_pct,total,"
         "pre_correct,pre_exec_error,pre_wrong_result,fixed\n";
  for (const EvalRow& row : report.rows) {
    out << row.mode << ',' << row.shots << ',' << row.strategy << ','
        << pct_number(row.execution_accuracy) << ','
        << (row.fix_rate_defined ? pct_number(row.fix_rate) : std::string("n/a"))
        << ',' << row.total << ',' << row.pre_correct << ','
        << row.pre_exec_error << ',' << row.pre_wrong_result << ','
        << row.fixed << '\n';
  }
  return out.str();
}

std::string outcomes_to_jsonl(const std::vector<EvalOutcome>& outcomes) {
  std::string out;
  for (const EvalOutcome& o : outcomes) {
    ordered_json j;
    j["record_id"] = o.record_id;
    j["pre_status"] = exec_status_name(o.pre_status);
    j["post_status"] = exec_status_name(o.post_status);
    j["mode"] = o.mode;
    j["shots"] = o.shots;
    j["strategy"] = o.strategy;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<EvalOutcome> outcomes_from_jsonl(const std::string& text) {
  std::vector<EvalOutcome> outcomes;
  size_t line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("outcomes line " + std::to_string(line_no) + ": " + e.what());
    }
    EvalOutcome o;
    o.record_id = j.at("record_id").get<std::string>();
    o.pre_status = exec_status_from_name(j.at("pre_status").get<std::string>());
    o.post_status = exec_status_from_name(j.at("post_status").get<std::string>());
    o.mode = j.at("mode").get<std::string>();
    o.shots = j.at("shots").get<int>();
    o.strategy = j.at("strategy").get<std::string>();
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

}  // namespace sqlfix
