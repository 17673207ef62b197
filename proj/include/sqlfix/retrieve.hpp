#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlfix/embed.hpp"
#include "sqlfix/pool.hpp"

namespace sqlfix {

// Non-negative weights over the three query-side similarity fields. The five
// shipped presets are the retrieval strategies: error, nlq, sql, nlq+sql,
// nlq+sql+error.
struct StrategyWeights {
  double w_nlq = 0.0;
  double w_sql = 0.0;
  double w_error = 0.0;

  static StrategyWeights preset(const std::string& name);  // throws Error
  static const std::vector<std::string>& preset_names();
};

struct RetrievalQuery {
  std::string nlq;
  std::string predicted_sql;
  std::optional<std::string> error;  // raw message
};

// Pre-embedded query fields; the text path wraps this.
struct QueryEmbeddings {
  EmbeddingVector nlq;
  EmbeddingVector predicted_sql;
  std::optional<EmbeddingVector> error;
};

struct RetrievalHit {
  std::string example_id;
  double score = 0.0;  // combined similarity in [-1, 1]
  std::map<std::string, double> per_field_scores;
  // True when the query had no field with positive weight (error-only
  // strategy on an error-free query) and scoring fell back to nlq+sql.
  bool used_fallback_weights = false;
};

// Exact cosine top-k index over the pool's stored per-field vectors.
// Immutable after construction; concurrent queries are safe.
class PoolIndex {
 public:
  // Throws VersionMismatch when the pool's embedder id differs from
  // expected_embedder_id (when non-empty).
  PoolIndex(Pool pool, const std::string& expected_embedder_id = {});

  size_t size() const { return pool_.examples.size(); }
  const Pool& pool() const { return pool_; }
  const CorrectionExample* find(const std::string& example_id) const;

  // score(example) = sum_f w_f * cos(query_f, example_f) / sum_f w_f over
  // fields present on both sides; a pair with no present field scores 0.
  // Hits come back in non-increasing score order, ties broken by ascending
  // example id; at most k of them (fewer when the pool is smaller). An empty
  // pool yields an empty list.
  std::vector<RetrievalHit> find_best_match(const QueryEmbeddings& query,
                                            size_t k,
                                            const StrategyWeights& weights) const;

 private:
  Pool pool_;
  size_t dim_ = 0;
  std::vector<float> nlq_matrix_;
  std::vector<float> sql_matrix_;
  std::vector<float> error_matrix_;
  std::vector<char> has_error_;
};

std::vector<RetrievalHit> find_best_match(const RetrievalQuery& query,
                                          const PoolIndex& index, size_t k,
                                          const StrategyWeights& weights,
                                          Embedder& embedder);

}  // namespace sqlfix
