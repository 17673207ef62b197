#include "sqlfix/pool.hpp"

#include <cstring>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/parse.hpp"
#include "sqlfix/render.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string vector_to_b64(const EmbeddingVector& v) {
  std::vector<uint8_t> bytes;
  bytes.reserve(v.values.size() * 4);
  for (float f : v.values) {
    uint32_t u = 0;
    std::memcpy(&u, &f, 4);
    bytes.push_back(uint8_t(u & 0xff));
    bytes.push_back(uint8_t((u >> 8) & 0xff));
    bytes.push_back(uint8_t((u >> 16) & 0xff));
    bytes.push_back(uint8_t((u >> 24) & 0xff));
  }
  return base64_encode(bytes.data(), bytes.size());
}

EmbeddingVector vector_from_b64(const std::string& text) {
  std::vector<uint8_t> bytes = base64_decode(text);
  if (bytes.size() % 4 != 0) throw IoError("corrupt embedding payload");
  EmbeddingVector v;
  v.values.resize(bytes.size() / 4);
  for (size_t i = 0; i < v.values.size(); ++i) {
    uint32_t u = uint32_t(bytes[4 * i]) | (uint32_t(bytes[4 * i + 1]) << 8) |
                 (uint32_t(bytes[4 * i + 2]) << 16) |
                 (uint32_t(bytes[4 * i + 3]) << 24);
    float f = 0.0f;
    std::memcpy(&f, &u, 4);
    v.values[i] = f;
  }
  return v;
}

ordered_json manifest_to_json(const PoolManifest& m) {
  ordered_json j;
  j["embedder_id"] = m.embedder_id;
  j["example_count"] = m.example_count;
  ordered_json stats;
  stats["correct_skipped"] = m.build_stats.correct_skipped;
  stats["unparseable_discarded"] = m.build_stats.unparseable_discarded;
  stats["diff_failed_discarded"] = m.build_stats.diff_failed_discarded;
  stats["stored"] = m.build_stats.stored;
  j["build_stats"] = std::move(stats);
  return j;
}

PoolManifest manifest_from_json(const ordered_json& j) {
  PoolManifest m;
  m.embedder_id = j.at("embedder_id").get<std::string>();
  m.example_count = j.at("example_count").get<size_t>();
  const auto& stats = j.at("build_stats");
  m.build_stats.correct_skipped = stats.at("correct_skipped").get<size_t>();
  m.build_stats.unparseable_discarded =
      stats.at("unparseable_discarded").get<size_t>();
  m.build_stats.diff_failed_discarded =
      stats.at("diff_failed_discarded").get<size_t>();
  m.build_stats.stored = stats.at("stored").get<size_t>();
  return m;
}

ordered_json example_to_json(const CorrectionExample& e) {
  ordered_json j;
  j["id"] = e.id;
  j["nlq"] = e.nlq;
  j["predicted_sql"] = e.predicted_sql;
  j["golden_sql"] = e.golden_sql;
  if (e.error.has_value()) {
    ordered_json err;
    err["raw_message"] = e.error->raw_message;
    err["error_class"] = error_class_name(e.error->error_class);
    j["error"] = std::move(err);
  }
  j["edit_script"] = ordered_json::parse(script_to_json(e.edit_script));
  j["steps_text"] = e.steps_text;
  ordered_json emb;
  for (const auto& [field, vec] : e.embeddings) emb[field] = vector_to_b64(vec);
  j["embeddings"] = std::move(emb);
  return j;
}

CorrectionExample example_from_json(const ordered_json& j) {
  CorrectionExample e;
  e.id = j.at("id").get<std::string>();
  e.nlq = j.at("nlq").get<std::string>();
  e.predicted_sql = j.at("predicted_sql").get<std::string>();
  e.golden_sql = j.at("golden_sql").get<std::string>();
  if (j.contains("error")) {
    SqlError err;
    err.raw_message = j.at("error").at("raw_message").get<std::string>();
    err.error_class =
        error_class_from_name(j.at("error").at("error_class").get<std::string>());
    e.error = err;
  }
  e.edit_script = script_from_json(j.at("edit_script").dump());
  e.steps_text = j.at("steps_text").get<std::string>();
  for (const auto& [field, b64] : j.at("embeddings").items())
    e.embeddings[field] = vector_from_b64(b64.get<std::string>());
  return e;
}

}  // namespace

Pool build_pool(const std::vector<DatasetRecord>& records,
                SqlGenerator& generator, Embedder& embedder,
                const PoolBuildOptions& opts) {
  Pool pool;
  pool.manifest.embedder_id = embedder.id();

  auto checkpoint = [&]() {
    if (opts.checkpoint_path.empty()) return;
    pool.manifest.example_count = pool.examples.size();
    save_pool(pool, opts.checkpoint_path);
  };

  for (const DatasetRecord& record : records) {
    std::string predicted;
    try {
      predicted = generator.generate(record);
    } catch (const ExtractionFailed&) {
      ++pool.manifest.build_stats.unparseable_discarded;
      continue;
    } catch (const LlmUnavailable&) {
      checkpoint();
      throw;
    } catch (const IoError&) {
      checkpoint();
      throw;
    }

    Database db = provision_database(record);
    ExecutionResult golden_result = execute(db, record.golden_sql);
    if (golden_result.error.has_value())
      throw Error("record " + record.id +
                  ": golden SQL fails to execute; run ingest filtering first");

    ExecutionResult predicted_result = execute(db, predicted);
    bool ordered = golden_is_ordered(record.golden_sql);
    if (!predicted_result.error.has_value() &&
        compare_results(predicted_result, golden_result, ordered)) {
      ++pool.manifest.build_stats.correct_skipped;
      continue;
    }

    SqlAst pred_ast, gold_ast;
    try {
      pred_ast = parse_sql(predicted);
      gold_ast = parse_sql(record.golden_sql);
    } catch (const ParseError&) {
      ++pool.manifest.build_stats.unparseable_discarded;
      continue;
    }

    EditScript script = generate_edit_script(pred_ast, gold_ast);
    bool diff_ok = false;
    try {
      SqlAst patched = apply_edit_script(pred_ast, script);
      diff_ok = structurally_equal(patched, gold_ast);
    } catch (const Error&) {
      diff_ok = false;
    }
    if (!diff_ok) {
      ++pool.manifest.build_stats.diff_failed_discarded;
      continue;
    }

    CorrectionExample example;
    example.id = record.id;
    example.nlq = record.nlq;
    example.predicted_sql = predicted;
    example.golden_sql = record.golden_sql;
    example.error = predicted_result.error;
    example.edit_script = std::move(script);
    example.steps_text = describe_edit_script(example.edit_script);

    example.embeddings["nlq"] = embedder.embed(example.nlq);
    example.embeddings["predicted_sql"] = embedder.embed(example.predicted_sql);
    example.embeddings["golden_sql"] = embedder.embed(example.golden_sql);
    example.embeddings["diff"] = embedder.embed(example.steps_text);
    if (example.error.has_value()) {
      std::string error_text =
          opts.embed_error_with_class
              ? std::string(error_class_name(example.error->error_class)) +
                    ": " + example.error->raw_message
              : example.error->raw_message;
      example.embeddings["error"] = embedder.embed(error_text);
    }

    pool.examples.push_back(std::move(example));
    ++pool.manifest.build_stats.stored;
  }

  pool.manifest.example_count = pool.examples.size();
  return pool;
}

void save_pool(const Pool& pool, const std::string& path) {
  PoolManifest manifest = pool.manifest;
  manifest.example_count = pool.examples.size();
  std::string out = manifest_to_json(manifest).dump();
  out += '\n';
  for (const CorrectionExample& e : pool.examples) {
    out += example_to_json(e).dump();
    out += '\n';
  }
  write_file(path, out);
}

Pool load_pool(const std::string& path,
               const std::string& expected_embedder_id) {
  std::string text = read_file(path);
  std::vector<std::string> lines = split_lines(text);
  if (lines.empty()) throw IoError("pool file is empty: " + path);

  Pool pool;
  try {
    pool.manifest = manifest_from_json(ordered_json::parse(lines[0]));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("corrupt pool manifest: ") + e.what());
  }
  if (!expected_embedder_id.empty() &&
      pool.manifest.embedder_id != expected_embedder_id)
    throw VersionMismatch("pool built with embedder '" +
                          pool.manifest.embedder_id +
                          "' but configured embedder is '" +
                          expected_embedder_id + "'");

  for (size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    try {
      pool.examples.push_back(example_from_json(ordered_json::parse(lines[i])));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("corrupt pool example on line " + std::to_string(i + 1) +
                    ": " + e.what());
    }
  }
  if (pool.examples.size() != pool.manifest.example_count)
    throw IoError("pool example count mismatch: manifest says " +
                  std::to_string(pool.manifest.example_count) + ", file has " +
                  std::to_string(pool.examples.size()));
  return pool;
}

}  // namespace sqlfix
