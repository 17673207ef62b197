#include "sqlfix/retrieve.hpp"

#include <algorithm>
#include <cmath>

#include "sqlfix/errors.hpp"
#include "sqlfix/simd/kernels.hpp"

namespace sqlfix {

StrategyWeights StrategyWeights::preset(const std::string& name) {
  if (name == "error") return {0.0, 0.0, 1.0};
  if (name == "nlq") return {1.0, 0.0, 0.0};
  if (name == "sql") return {0.0, 1.0, 0.0};
  if (name == "nlq+sql") return {0.5, 0.5, 0.0};
  if (name == "nlq+sql+error") return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  throw Error("unknown strategy preset: " + name);
}

const std::vector<std::string>& StrategyWeights::preset_names() {
  static const std::vector<std::string> names = {"error", "nlq", "sql",
                                                 "nlq+sql", "nlq+sql+error"};
  return names;
}

namespace {

void append_vector(std::vector<float>& matrix, const EmbeddingVector& v,
                   size_t dim) {
  if (v.values.size() != dim)
    throw VersionMismatch("stored vector dimension " +
                          std::to_string(v.values.size()) +
                          " does not match index dimension " +
                          std::to_string(dim));
  matrix.insert(matrix.end(), v.values.begin(), v.values.end());
}

const EmbeddingVector& field_of(const CorrectionExample& e, const char* name) {
  auto it = e.embeddings.find(name);
  if (it == e.embeddings.end())
    throw Error(std::string("pool example ") + e.id + " lacks the '" + name +
                "' embedding");
  return it->second;
}

}  // namespace

PoolIndex::PoolIndex(Pool pool, const std::string& expected_embedder_id)
    : pool_(std::move(pool)) {
  if (!expected_embedder_id.empty() &&
      pool_.manifest.embedder_id != expected_embedder_id)
    throw VersionMismatch("pool built with embedder '" +
                          pool_.manifest.embedder_id +
                          "' but configured embedder is '" +
                          expected_embedder_id + "'");
  if (pool_.examples.empty()) return;

  dim_ = field_of(pool_.examples[0], "nlq").values.size();
  size_t n = pool_.examples.size();
  nlq_matrix_.reserve(n * dim_);
  sql_matrix_.reserve(n * dim_);
  error_matrix_.reserve(n * dim_);
  has_error_.reserve(n);
  for (const CorrectionExample& e : pool_.examples) {
    append_vector(nlq_matrix_, field_of(e, "nlq"), dim_);
    append_vector(sql_matrix_, field_of(e, "predicted_sql"), dim_);
    auto it = e.embeddings.find("error");
    if (it != e.embeddings.end()) {
      append_vector(error_matrix_, it->second, dim_);
      has_error_.push_back(1);
    } else {
      error_matrix_.insert(error_matrix_.end(), dim_, 0.0f);
      has_error_.push_back(0);
    }
  }
}

const CorrectionExample* PoolIndex::find(const std::string& example_id) const {
  for (const CorrectionExample& e : pool_.examples)
    if (e.id == example_id) return &e;
  return nullptr;
}

std::vector<RetrievalHit> PoolIndex::find_best_match(
    const QueryEmbeddings& query, size_t k,
    const StrategyWeights& weights) const {
  std::vector<RetrievalHit> hits;
  if (pool_.examples.empty() || k == 0) return hits;
  if (weights.w_nlq < 0 || weights.w_sql < 0 || weights.w_error < 0)
    throw Error("strategy weights must be non-negative");
  if (weights.w_nlq + weights.w_sql + weights.w_error <= 0)
    throw Error("at least one strategy weight must be positive");

  // Fields present on the query side. If none of the positively weighted
  // fields is present (error-only strategy, error-free query), fall back to
  // the nlq+sql preset and note it on the hits.
  StrategyWeights w = weights;
  bool fallback = false;
  bool query_has_error = query.error.has_value();
  bool any_present = (w.w_nlq > 0) || (w.w_sql > 0) ||
                     (w.w_error > 0 && query_has_error);
  if (!any_present) {
    w = StrategyWeights::preset("nlq+sql");
    fallback = true;
  }

  size_t n = pool_.examples.size();
  std::vector<float> nlq_scores(n, 0.0f), sql_scores(n, 0.0f),
      error_scores(n, 0.0f);
  if (w.w_nlq > 0)
    simd::dot_batch(query.nlq.values.data(), nlq_matrix_.data(), n, dim_,
                    nlq_scores.data());
  if (w.w_sql > 0)
    simd::dot_batch(query.predicted_sql.values.data(), sql_matrix_.data(), n,
                    dim_, sql_scores.data());
  if (w.w_error > 0 && query_has_error)
    simd::dot_batch(query.error->values.data(), error_matrix_.data(), n, dim_,
                    error_scores.data());

  std::vector<size_t> order(n);
  std::vector<RetrievalHit> all(n);
  for (size_t i = 0; i < n; ++i) {
    order[i] = i;
    RetrievalHit& hit = all[i];
    hit.example_id = pool_.examples[i].id;
    hit.used_fallback_weights = fallback;
    double sum = 0.0, wsum = 0.0;
    if (w.w_nlq > 0) {
      hit.per_field_scores["nlq"] = nlq_scores[i];
      sum += w.w_nlq * nlq_scores[i];
      wsum += w.w_nlq;
    }
    if (w.w_sql > 0) {
      hit.per_field_scores["predicted_sql"] = sql_scores[i];
      sum += w.w_sql * sql_scores[i];
      wsum += w.w_sql;
    }
    if (w.w_error > 0 && query_has_error && has_error_[i]) {
      hit.per_field_scores["error"] = error_scores[i];
      sum += w.w_error * error_scores[i];
      wsum += w.w_error;
    }
    hit.score = wsum > 0 ? sum / wsum : 0.0;
  }

  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (all[a].score != all[b].score) return all[a].score > all[b].score;
    return all[a].example_id < all[b].example_id;
  });
  size_t take = std::min(k, n);
  hits.reserve(take);
  for (size_t i = 0; i < take; ++i) hits.push_back(std::move(all[order[i]]));
  return hits;
}

std::vector<RetrievalHit> find_best_match(const RetrievalQuery& query,
                                          const PoolIndex& index, size_t k,
                                          const StrategyWeights& weights,
                                          Embedder& embedder) {
  if (query.nlq.empty() || query.predicted_sql.empty())
    throw ContractViolation("retrieval query requires nlq and predicted_sql");
  QueryEmbeddings q;
  q.nlq = embedder.embed(query.nlq);
  q.predicted_sql = embedder.embed(query.predicted_sql);
  if (query.error.has_value()) q.error = embedder.embed(*query.error);
  return index.find_best_match(q, k, weights);
}

}  // namespace sqlfix
