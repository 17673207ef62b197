#include "sqlfix/correct.hpp"

#include <cctype>
#include <chrono>
#include <cstring>
#include <map>
#include <sstream>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/parse.hpp"
#include "sqlfix/render.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {
using ordered_json = nlohmann::ordered_json;
}

const char* mode_name(CorrectionMode m) {
  switch (m) {
    case CorrectionMode::None: return "none";
    case CorrectionMode::Simple0Shot: return "simple0shot";
    case CorrectionMode::RagPrompt: return "ragprompt";
    case CorrectionMode::ApplyScript: return "applyscript";
  }
  return "?";
}

CorrectionMode mode_from_name(const std::string& name) {
  if (name == "none") return CorrectionMode::None;
  if (name == "simple0shot") return CorrectionMode::Simple0Shot;
  if (name == "ragprompt") return CorrectionMode::RagPrompt;
  if (name == "applyscript") return CorrectionMode::ApplyScript;
  throw Error("unknown correction mode: " + name);
}

const std::string& default_generation_template() {
  static const std::string text =
      "You are a SQL assistant. Given a database schema and a question, "
      "write one SQL query that answers the question.\n"
      "\n"
      "Schema:\n"
      "{{schema}}\n"
      "\n"
      "Question: {{nlq}}\n"
      "\n"
      "Reply with only the SQL query.\n";
  return text;
}

const std::string& default_fewshot_template() {
  static const std::string text =
      "You are a SQL correction assistant. A generated SQL query failed. "
      "Use the worked examples to fix it.\n"
      "\n"
      "{{examples}}"
      "Now correct this case.\n"
      "\n"
      "Schema:\n"
      "{{schema}}\n"
      "\n"
      "Question: {{nlq}}\n"
      "\n"
      "Incorrect SQL: {{sql}}\n"
      "Error: {{error}}\n"
      "\n"
      "Reply with only the corrected SQL query.\n";
  return text;
}

const std::string& default_zeroshot_template() {
  static const std::string text =
      "You are a SQL correction assistant. A generated SQL query failed "
      "with an execution error. Correct it.\n"
      "\n"
      "Schema:\n"
      "{{schema}}\n"
      "\n"
      "Question: {{nlq}}\n"
      "\n"
      "Incorrect SQL: {{sql}}\n"
      "Error: {{error}}\n"
      "\n"
      "Reply with only the corrected SQL query.\n";
  return text;
}

namespace {

std::string substitute(const std::string& template_text,
                       const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(template_text.size());
  size_t pos = 0;
  while (pos < template_text.size()) {
    size_t open = template_text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(template_text, pos, std::string::npos);
      break;
    }
    out.append(template_text, pos, open - pos);
    size_t close = template_text.find("}}", open + 2);
    if (close == std::string::npos)
      throw TemplateError("unterminated placeholder near offset " +
                          std::to_string(open));
    std::string name = template_text.substr(open + 2, close - open - 2);
    auto it = values.find(name);
    if (it == values.end())
      throw TemplateError("unknown placeholder {{" + name + "}}");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// First occurrence of a SQL statement keyword at a word boundary, at or
// after `from`; npos when none.
size_t find_statement_start(const std::string& text, size_t from) {
  static const char* kStarters[] = {"SELECT", "WITH", "INSERT", "UPDATE",
                                    "DELETE"};
  std::string upper = to_upper_ascii(text);
  size_t best = std::string::npos;
  for (const char* kw : kStarters) {
    size_t len = std::strlen(kw);
    size_t pos = upper.find(kw, from);
    while (pos != std::string::npos) {
      bool left_ok = pos == 0 || !is_word_char(upper[pos - 1]);
      bool right_ok = pos + len >= upper.size() || !is_word_char(upper[pos + len]);
      if (left_ok && right_ok) break;
      pos = upper.find(kw, pos + 1);
    }
    if (pos != std::string::npos && pos < best) best = pos;
  }
  return best;
}

std::string strip_statement(std::string sql) {
  sql = trim(sql);
  while (!sql.empty() && sql.back() == ';') {
    sql.pop_back();
    sql = trim(sql);
  }
  return sql;
}

}  // namespace

std::string extract_sql_reply(const std::string& reply) {
  size_t fence = reply.find("```");
  if (fence != std::string::npos) {
    size_t content_start = fence + 3;
    // Skip a language tag up to the end of the fence line.
    size_t nl = reply.find('\n', content_start);
    size_t close = reply.find("```", content_start);
    if (nl != std::string::npos && close != std::string::npos && nl < close)
      content_start = nl + 1;
    if (close != std::string::npos && close >= content_start) {
      std::string content = strip_statement(reply.substr(content_start, close - content_start));
      if (!content.empty()) return content;
    }
  }
  size_t start = find_statement_start(reply, 0);
  if (start == std::string::npos)
    throw ExtractionFailed("no SQL statement found in model reply");
  size_t semi = reply.find(';', start);
  std::string sql = semi == std::string::npos
                        ? reply.substr(start)
                        : reply.substr(start, semi - start);
  sql = strip_statement(sql);
  if (sql.empty()) throw ExtractionFailed("no SQL statement found in model reply");
  return sql;
}

std::string generate_sql(const std::string& nlq, const std::string& schema_ddl,
                         LlmClient& client) {
  LlmRequest request;
  request.user = substitute(default_generation_template(),
                            {{"schema", schema_ddl}, {"nlq", nlq}});
  std::string reply = client.complete(request);
  return extract_sql_reply(reply);
}

std::string build_correction_prompt(
    const std::string& nlq, const std::string& predicted_sql,
    const std::optional<SqlError>& error, const std::string& schema_ddl,
    const std::vector<const CorrectionExample*>& examples,
    const std::string& template_text) {
  std::ostringstream blocks;
  int n = 0;
  for (const CorrectionExample* e : examples) {
    blocks << "Example " << ++n << ":\n";
    blocks << "Question: " << e->nlq << '\n';
    blocks << "Incorrect SQL: " << e->predicted_sql << '\n';
    if (e->error.has_value())
      blocks << "Error: " << e->error->raw_message << '\n';
    blocks << "Correction steps:\n" << e->steps_text << '\n';
    blocks << "Correct SQL: " << e->golden_sql << "\n\n";
  }
  std::string error_text =
      error.has_value() ? error->raw_message
                        : "(no execution error; the query returned wrong results)";
  return substitute(template_text, {{"examples", blocks.str()},
                                    {"nlq", nlq},
                                    {"schema", schema_ddl},
                                    {"sql", predicted_sql},
                                    {"error", error_text}});
}

CorrectionAttempt correct_sql(const DatasetRecord& record,
                              const std::string& predicted_sql,
                              const std::optional<SqlError>& error,
                              LlmClient& client, const PoolIndex* index,
                              Embedder& embedder,
                              const CorrectionConfig& config) {
  CorrectionAttempt attempt;
  attempt.record_id = record.id;
  attempt.nlq = record.nlq;
  attempt.original_sql = predicted_sql;
  attempt.error = error;
  attempt.mode = mode_name(config.mode);
  attempt.shots = config.shots;
  attempt.strategy = config.strategy;
  attempt.corrected_sql = predicted_sql;

  if (config.mode == CorrectionMode::None) return attempt;
  if (!error.has_value() && !config.widen_trigger) return attempt;

  try {
    if (config.mode == CorrectionMode::ApplyScript) {
      if (index == nullptr || index->size() == 0)
        throw Error("apply-script correction requires a non-empty pool");
      RetrievalQuery query{record.nlq, predicted_sql,
                           error.has_value()
                               ? std::optional<std::string>(error->raw_message)
                               : std::nullopt};
      auto hits = find_best_match(query, *index, 1, config.weights, embedder);
      attempt.examples_used.push_back(hits.at(0).example_id);
      attempt.used_fallback = hits.at(0).used_fallback_weights;
      const CorrectionExample* example = index->find(hits.at(0).example_id);
      SqlAst ast = parse_sql(predicted_sql);
      SqlAst patched = apply_edit_script(ast, example->edit_script, true);
      attempt.corrected_sql = render_sql(patched);
      return attempt;
    }

    std::vector<const CorrectionExample*> examples;
    if (config.mode == CorrectionMode::RagPrompt) {
      if (index == nullptr || index->size() == 0) {
        attempt.used_fallback = true;  // empty pool: fall back to 0-shot
      } else {
        RetrievalQuery query{record.nlq, predicted_sql,
                             error.has_value()
                                 ? std::optional<std::string>(error->raw_message)
                                 : std::nullopt};
        auto hits = find_best_match(query, *index, size_t(config.shots),
                                    config.weights, embedder);
        for (const RetrievalHit& hit : hits) {
          attempt.examples_used.push_back(hit.example_id);
          attempt.used_fallback |= hit.used_fallback_weights;
          examples.push_back(index->find(hit.example_id));
        }
      }
    }

    const std::string& fallback_template = examples.empty()
                                               ? default_zeroshot_template()
                                               : default_fewshot_template();
    const std::string& configured = examples.empty() ? config.zeroshot_template
                                                     : config.fewshot_template;
    const std::string& template_text =
        configured.empty() ? fallback_template : configured;

    attempt.prompt_text = build_correction_prompt(
        record.nlq, predicted_sql, error, record.schema_ddl, examples,
        template_text);

    LlmRequest request;
    request.user = attempt.prompt_text;
    auto t0 = std::chrono::steady_clock::now();
    std::string reply = client.complete(request);
    auto t1 = std::chrono::steady_clock::now();
    if (!client.deterministic())
      attempt.latency_ms =
          std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    attempt.corrected_sql = extract_sql_reply(reply);
    return attempt;
  } catch (const Error& e) {
    attempt.failure = e.what();
    attempt.corrected_sql = attempt.original_sql;
    return attempt;
  }
}

std::string attempts_to_jsonl(const std::vector<CorrectionAttempt>& attempts) {
  std::string out;
  for (const CorrectionAttempt& a : attempts) {
    ordered_json j;
    j["record_id"] = a.record_id;
    j["nlq"] = a.nlq;
    j["original_sql"] = a.original_sql;
    if (a.error.has_value()) {
      ordered_json err;
      err["raw_message"] = a.error->raw_message;
      err["error_class"] = error_class_name(a.error->error_class);
      j["error"] = std::move(err);
    }
    j["mode"] = a.mode;
    j["shots"] = a.shots;
    j["strategy"] = a.strategy;
    j["examples_used"] = a.examples_used;
    j["used_fallback"] = a.used_fallback;
    j["prompt_text"] = a.prompt_text;
    j["corrected_sql"] = a.corrected_sql;
    j["latency_ms"] = a.latency_ms;
    if (!a.failure.empty()) j["failure"] = a.failure;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<CorrectionAttempt> attempts_from_jsonl(const std::string& text) {
  std::vector<CorrectionAttempt> attempts;
  size_t line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("attempts line " + std::to_string(line_no) + ": " + e.what());
    }
    CorrectionAttempt a;
    a.record_id = j.at("record_id").get<std::string>();
    a.nlq = j.at("nlq").get<std::string>();
    a.original_sql = j.at("original_sql").get<std::string>();
    if (j.contains("error")) {
      SqlError err;
      err.raw_message = j.at("error").at("raw_message").get<std::string>();
      err.error_class = error_class_from_name(
          j.at("error").at("error_class").get<std::string>());
      a.error = err;
    }
    a.mode = j.at("mode").get<std::string>();
    a.shots = j.at("shots").get<int>();
    a.strategy = j.at("strategy").get<std::string>();
    for (const auto& id : j.at("examples_used"))
      a.examples_used.push_back(id.get<std::string>());
    a.used_fallback = j.at("used_fallback").get<bool>();
    a.prompt_text = j.at("prompt_text").get<std::string>();
    a.corrected_sql = j.at("corrected_sql").get<std::string>();
    a.latency_ms = j.at("latency_ms").get<long long>();
    if (j.contains("failure")) a.failure = j.at("failure").get<std::string>();
    attempts.push_back(std::move(a));
  }
  return attempts;
}

}  // namespace sqlfix
