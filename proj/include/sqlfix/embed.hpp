#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace sqlfix {

// Fixed-length embedding; unit L2 norm, except that empty or too-short text
// maps to the all-zero vector.
struct EmbeddingVector {
  std::vector<float> values;

  bool is_zero() const;
};

// Cosine similarity; zero vectors score 0 against everything.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
 public:
  virtual ~Embedder() = default;

  // Names the embedder and its dimension, e.g. "hash3gram-512". Pool files
  // record this id; loading with a different embedder configured fails.
  virtual std::string id() const = 0;
  virtual size_t dimension() const = 0;
  virtual EmbeddingVector embed(std::string_view text) = 0;
};

// Default embedder: lowercase the text, extract character 3-grams, hash each
// to one of `dimension` buckets with a fixed seed, weight buckets by
// log(1 + count), L2-normalize. Deterministic across platforms.
class HashedTrigramEmbedder : public Embedder {
 public:
  explicit HashedTrigramEmbedder(size_t dimension = 512);

  std::string id() const override;
  size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) override;

 private:
  size_t dimension_;
};

// Bridges to an external embedding model over a child process's standard
// streams, one JSON object per line:
//   request  {"id": <n>, "text": <string>}
//   response {"id": <n>, "vector": [<float>, ...]}
// The configured id must change whenever the external model changes.
class ProcessEmbedder : public Embedder {
 public:
  ProcessEmbedder(std::string command, std::string id, size_t dimension);
  ~ProcessEmbedder() override;

  std::string id() const override { return id_; }
  size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) override;

 private:
  void start();

  std::string command_;
  std::string id_;
  size_t dimension_;
  int child_pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  long long next_request_ = 0;
};

std::unique_ptr<Embedder> make_default_embedder();

}  // namespace sqlfix
