#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <random>
#include <string>

#include "sqlfix/embed.hpp"
#include "sqlfix/errors.hpp"
#include "sqlfix/simd/kernels.hpp"
#include "sqlfix/util.hpp"

using namespace sqlfix;

namespace {

// Straight-line reimplementation of the default embedder used as an oracle:
// lowercase, 3-gram counts, fixed-seed hash buckets, log(1+count) weights,
// L2 normalization.
std::vector<float> embed_oracle(const std::string& text, size_t dim) {
  std::string lower = to_lower_ascii(text);
  std::map<std::string, int> counts;
  for (size_t i = 0; i + 3 <= lower.size(); ++i) counts[lower.substr(i, 3)]++;
  std::vector<double> acc(dim, 0.0);
  for (auto& [gram, count] : counts)
    acc[size_t(fnv1a(gram, 0x9e3779b97f4a7c15ull) % dim)] +=
        std::log1p(double(count));
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  std::vector<float> out(dim, 0.0f);
  if (norm == 0.0) return out;
  for (size_t i = 0; i < dim; ++i) out[i] = float(acc[i] / norm);
  return out;
}

EmbeddingVector random_unit(std::mt19937_64& rng, size_t dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  EmbeddingVector v;
  v.values.resize(dim);
  double norm = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    double x = normal(rng);
    v.values[i] = float(x);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (float& f : v.values) f = float(double(f) / norm);
  return v;
}

}  // namespace

TEST_CASE("default embedder id names model and dimension") {
  HashedTrigramEmbedder e;
  CHECK(e.id() == "hash3gram-512");
  CHECK(e.dimension() == 512);
  HashedTrigramEmbedder small(64);
  CHECK(small.id() == "hash3gram-64");
}

TEST_CASE("embedding is deterministic and unit-norm") {
  HashedTrigramEmbedder e;
  EmbeddingVector a = e.embed("SELECT a FROM t WHERE x = 1");
  EmbeddingVector b = e.embed("SELECT a FROM t WHERE x = 1");
  REQUIRE(a.values.size() == 512);
  CHECK(a.values == b.values);

  double norm = 0.0;
  for (float v : a.values) norm += double(v) * double(v);
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(cosine(a, b) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("short and empty text map to the zero vector") {
  HashedTrigramEmbedder e;
  CHECK(e.embed("").is_zero());
  CHECK(e.embed("ab").is_zero());
  CHECK_FALSE(e.embed("abc").is_zero());
  CHECK(cosine(e.embed(""), e.embed("SELECT a FROM t")) == 0.0);
}

TEST_CASE("embedder matches the reference construction") {
  HashedTrigramEmbedder e(128);
  for (const char* text :
       {"SELECT a FROM t", "no such column: z", "List all customers",
        "SELECT name, COUNT(*) FROM orders GROUP BY name"}) {
    CAPTURE(text);
    EmbeddingVector got = e.embed(text);
    std::vector<float> want = embed_oracle(text, 128);
    REQUIRE(got.values.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i)
      CHECK(got.values[i] == doctest::Approx(want[i]).epsilon(1e-7));
  }
}

TEST_CASE("similar SQL is closer than an unrelated error message") {
  HashedTrigramEmbedder e;
  EmbeddingVector base = e.embed("SELECT a FROM t");
  double near = cosine(base, e.embed("SELECT a FROM t WHERE x=1"));
  double far = cosine(base, e.embed("no such column: z"));
  CHECK(near > far);
}

TEST_CASE("case folding makes embedding case-insensitive") {
  HashedTrigramEmbedder e;
  CHECK(cosine(e.embed("SELECT Name FROM T"), e.embed("select name from t")) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("scalar and vector kernels agree") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 200; ++trial) {
    size_t dim = trial % 3 == 0 ? 512 : 1 + size_t(rng() % 130);
    EmbeddingVector a = random_unit(rng, dim);
    EmbeddingVector b = random_unit(rng, dim);

    float reference = simd::dot_scalar(a.values.data(), b.values.data(), dim);
    float dispatched = simd::dot(a.values.data(), b.values.data(), dim);
    CHECK(std::fabs(double(reference) - double(dispatched)) <= 1e-5);

    float norm_ref = simd::norm2_scalar(a.values.data(), dim);
    float norm_disp = simd::norm2(a.values.data(), dim);
    CHECK(std::fabs(double(norm_ref) - double(norm_disp)) <= 1e-5);
  }
}

TEST_CASE("forcing the scalar path is exact") {
  simd::Isa before = simd::active_isa();
  simd::force_isa(simd::Isa::Scalar);
  std::mt19937_64 rng(5);
  EmbeddingVector a = random_unit(rng, 512);
  EmbeddingVector b = random_unit(rng, 512);
  CHECK(simd::dot(a.values.data(), b.values.data(), 512) ==
        simd::dot_scalar(a.values.data(), b.values.data(), 512));
  simd::force_isa(before);
}

TEST_CASE("batched dot equals per-row dot") {
  std::mt19937_64 rng(77);
  size_t dim = 64, count = 33;
  EmbeddingVector q = random_unit(rng, dim);
  std::vector<float> rows;
  for (size_t i = 0; i < count; ++i) {
    EmbeddingVector v = random_unit(rng, dim);
    rows.insert(rows.end(), v.values.begin(), v.values.end());
  }
  std::vector<float> scores(count);
  simd::dot_batch(q.values.data(), rows.data(), count, dim, scores.data());
  for (size_t i = 0; i < count; ++i)
    CHECK(scores[i] == simd::dot(q.values.data(), rows.data() + i * dim, dim));
}

TEST_CASE("process embedder speaks the line protocol") {
  std::string cmd = std::string(MOCK_EMBEDDER_PATH) + " 4";
  ProcessEmbedder e(cmd, "mock-embed-4", 4);
  CHECK(e.id() == "mock-embed-4");
  EmbeddingVector a = e.embed("hello world");
  EmbeddingVector b = e.embed("hello world");
  REQUIRE(a.values.size() == 4);
  CHECK(a.values == b.values);
  double norm = 0.0;
  for (float v : a.values) norm += double(v) * double(v);
  CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-5));

  EmbeddingVector c = e.embed("another text");
  CHECK(a.values != c.values);
}

TEST_CASE("process embedder dimension mismatch is a version error") {
  std::string cmd = std::string(MOCK_EMBEDDER_PATH) + " 4";
  ProcessEmbedder e(cmd, "mock-embed-wrong", 8);
  CHECK_THROWS_AS(e.embed("some text"), VersionMismatch);
}
