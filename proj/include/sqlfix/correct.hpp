#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sqlfix/dataset.hpp"
#include "sqlfix/embed.hpp"
#include "sqlfix/exec.hpp"
#include "sqlfix/llm.hpp"
#include "sqlfix/pool.hpp"
#include "sqlfix/retrieve.hpp"

namespace sqlfix {

enum class CorrectionMode { None, Simple0Shot, RagPrompt, ApplyScript };

const char* mode_name(CorrectionMode m);
CorrectionMode mode_from_name(const std::string& name);

struct CorrectionConfig {
  CorrectionMode mode = CorrectionMode::None;
  int shots = 0;  // 1 or 3 for ragprompt, 0 for baselines
  std::string strategy = "nlq+sql+error";
  StrategyWeights weights = StrategyWeights::preset("nlq+sql+error");
  // Correction normally triggers only on captured execution errors; this
  // widens it to wrong-result attempts as well.
  bool widen_trigger = false;
  // Template texts with {{placeholder}} syntax; built-in defaults when empty.
  std::string fewshot_template;
  std::string zeroshot_template;
};

struct CorrectionAttempt {
  std::string record_id;
  std::string nlq;
  std::string original_sql;
  std::optional<SqlError> error;
  std::string mode;
  int shots = 0;
  std::string strategy;
  std::vector<std::string> examples_used;
  bool used_fallback = false;
  std::string prompt_text;
  std::string corrected_sql;
  long long latency_ms = 0;
  std::string failure;  // non-empty when correction failed and was contained
};

// Built-in prompt templates (same text ships under templates/).
const std::string& default_generation_template();
const std::string& default_fewshot_template();
const std::string& default_zeroshot_template();

// Extracts the first SQL statement from a model reply: prefer the first
// fenced code block, else the first SELECT/WITH/INSERT/UPDATE/DELETE
// substring up to a terminating semicolon or end of reply. Throws
// ExtractionFailed when nothing SQL-like is found.
std::string extract_sql_reply(const std::string& reply);

// One generation call: instantiate the generation prompt, ask the client,
// extract the SQL.
std::string generate_sql(const std::string& nlq, const std::string& schema_ddl,
                         LlmClient& client);

// Instantiates a correction template. Placeholders: {{examples}}, {{nlq}},
// {{schema}}, {{sql}}, {{error}}. Unknown placeholders raise TemplateError.
// Example blocks render in retrieval order with the stored NLQ, incorrect
// SQL, error (when present), correction steps, and golden SQL.
std::string build_correction_prompt(
    const std::string& nlq, const std::string& predicted_sql,
    const std::optional<SqlError>& error, const std::string& schema_ddl,
    const std::vector<const CorrectionExample*>& examples,
    const std::string& template_text);

// One correction pass for one record. Every client/extraction/apply failure
// is contained in the returned attempt with corrected_sql == original_sql;
// nothing from this function aborts a batch run. index may be null for the
// baseline modes (and triggers the documented empty-pool fallback for
// ragprompt/applyscript).
CorrectionAttempt correct_sql(const DatasetRecord& record,
                              const std::string& predicted_sql,
                              const std::optional<SqlError>& error,
                              LlmClient& client, const PoolIndex* index,
                              Embedder& embedder,
                              const CorrectionConfig& config);

// Attempts persist as JSON-lines.
std::string attempts_to_jsonl(const std::vector<CorrectionAttempt>& attempts);
std::vector<CorrectionAttempt> attempts_from_jsonl(const std::string& text);

}  // namespace sqlfix
