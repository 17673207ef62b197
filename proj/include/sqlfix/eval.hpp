#pragma once

#include <string>
#include <vector>

#include "sqlfix/correct.hpp"
#include "sqlfix/dataset.hpp"

namespace sqlfix {

enum class ExecStatus { Correct, ExecError, WrongResult };

const char* exec_status_name(ExecStatus s);
ExecStatus exec_status_from_name(const std::string& name);

struct EvalOutcome {
  std::string record_id;
  ExecStatus pre_status = ExecStatus::Correct;
  ExecStatus post_status = ExecStatus::Correct;
  std::string mode;
  int shots = 0;
  std::string strategy;
};

struct EvalRow {
  std::string mode;
  int shots = 0;
  std::string strategy;
  size_t total = 0;
  size_t pre_correct = 0;
  size_t pre_exec_error = 0;
  size_t pre_wrong_result = 0;
  size_t fixed = 0;  // pre exec_error -> post correct
  double execution_accuracy = 0.0;
  double fix_rate = 0.0;
  bool fix_rate_defined = false;  // false when pre_exec_error == 0
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

// Re-executes original and corrected SQL per attempt against a fresh
// provisioned database each time; correctness is execution comparison
// against the golden result. Correct predictions are never re-corrected:
// pre correct implies post correct. Throws MissingRecord when an attempt
// references an unknown record id.
std::vector<EvalOutcome> evaluate(const std::vector<CorrectionAttempt>& attempts,
                                  const std::vector<DatasetRecord>& records);

// Aggregates outcomes per (mode, shots, strategy) configuration.
EvalReport compute_report(const std::vector<EvalOutcome>& outcomes);

// Grid with the seven method rows and 0/1/3-shot columns for execution
// accuracy and fix rate; empty cells print NA, undefined fix rates n/a.
// Configurations outside the grid are listed below it.
std::string render_report_text(const EvalReport& report);
std::string render_report_csv(const EvalReport& report);

// Outcome persistence (JSON-lines).
std::string outcomes_to_jsonl(const std::vector<EvalOutcome>& outcomes);
std::vector<EvalOutcome> outcomes_from_jsonl(const std::string& text);

}  // namespace sqlfix
