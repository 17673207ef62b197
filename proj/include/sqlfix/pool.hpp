#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlfix/dataset.hpp"
#include "sqlfix/diff.hpp"
#include "sqlfix/embed.hpp"
#include "sqlfix/exec.hpp"

namespace sqlfix {

// One stored correction case. The edit script transforms the parsed
// predicted SQL into the parsed golden SQL (verified at build time), and the
// error key is absent when execution succeeded with wrong results.
struct CorrectionExample {
  std::string id;
  std::string nlq;
  std::string predicted_sql;
  std::string golden_sql;
  std::optional<SqlError> error;
  EditScript edit_script;
  std::string steps_text;
  // Field name -> vector, for "nlq", "predicted_sql", "golden_sql", "diff"
  // and, when an error was captured, "error".
  std::map<std::string, EmbeddingVector> embeddings;
};

struct PoolBuildStats {
  size_t correct_skipped = 0;
  size_t unparseable_discarded = 0;
  size_t diff_failed_discarded = 0;
  size_t stored = 0;
};

struct PoolManifest {
  std::string embedder_id;
  size_t example_count = 0;
  PoolBuildStats build_stats;
};

struct Pool {
  PoolManifest manifest;
  std::vector<CorrectionExample> examples;
};

// Seam for the SQL generator whose predictions seed the pool.
class SqlGenerator {
 public:
  virtual ~SqlGenerator() = default;
  virtual std::string generate(const DatasetRecord& record) = 0;
};

struct PoolBuildOptions {
  // Embed "<ErrorClass>: <raw message>" instead of the raw message alone.
  bool embed_error_with_class = false;
  // When set, generator/backend infrastructure failures write the partial
  // pool here before the error propagates.
  std::string checkpoint_path;
};

// Builds the correction-example pool from filtered records: generate a
// prediction per record, skip execution-accurate ones, discard unparseable
// or undiffable pairs, embed the stored fields, append the rest.
Pool build_pool(const std::vector<DatasetRecord>& records,
                SqlGenerator& generator, Embedder& embedder,
                const PoolBuildOptions& opts = {});

// JSON-lines pool file: manifest on line 1, one example per line, vectors as
// base64-encoded little-endian float32. save/load round-trips bit-exactly.
void save_pool(const Pool& pool, const std::string& path);

// expected_embedder_id, when non-empty, must equal the manifest's id
// (VersionMismatch otherwise).
Pool load_pool(const std::string& path,
               const std::string& expected_embedder_id = {});

}  // namespace sqlfix
