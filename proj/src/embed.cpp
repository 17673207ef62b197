#include "sqlfix/embed.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <csignal>
#include <unordered_map>

#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/simd/kernels.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

bool EmbeddingVector::is_zero() const {
  for (float v : values)
    if (v != 0.0f) return false;
  return true;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.values.size() != b.values.size())
    throw Error("cosine over mismatched dimensions");
  if (a.values.empty()) return 0.0;
  float dot = simd::dot(a.values.data(), b.values.data(), a.values.size());
  float na = simd::norm2(a.values.data(), a.values.size());
  float nb = simd::norm2(b.values.data(), b.values.size());
  if (na == 0.0f || nb == 0.0f) return 0.0;
  return double(dot) / (double(na) * double(nb));
}

HashedTrigramEmbedder::HashedTrigramEmbedder(size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) throw Error("embedder dimension must be positive");
}

std::string HashedTrigramEmbedder::id() const {
  return "hash3gram-" + std::to_string(dimension_);
}

EmbeddingVector HashedTrigramEmbedder::embed(std::string_view text) {
  EmbeddingVector out;
  out.values.assign(dimension_, 0.0f);
  std::string lower = to_lower_ascii(text);
  if (lower.size() < 3) return out;

  std::unordered_map<std::string, int> counts;
  for (size_t i = 0; i + 3 <= lower.size(); ++i)
    counts[lower.substr(i, 3)] += 1;

  // Accumulate in double so the stored floats do not depend on the host's
  // float rounding during summation.
  std::vector<double> acc(dimension_, 0.0);
  constexpr uint64_t kSeed = 0x9e3779b97f4a7c15ull;
  for (const auto& [gram, count] : counts) {
    size_t bucket = size_t(fnv1a(gram, kSeed) % dimension_);
    acc[bucket] += std::log1p(double(count));
  }
  double norm = 0.0;
  for (double v : acc) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0.0) return out;
  for (size_t i = 0; i < dimension_; ++i)
    out.values[i] = float(acc[i] / norm);
  return out;
}

ProcessEmbedder::ProcessEmbedder(std::string command, std::string id,
                                 size_t dimension)
    : command_(std::move(command)), id_(std::move(id)), dimension_(dimension) {
  if (dimension_ == 0) throw Error("embedder dimension must be positive");
  start();
}

void ProcessEmbedder::start() {
  int in_pipe[2];   // parent -> child
  int out_pipe[2];  // child -> parent
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw IoError("cannot create embedder pipes");
  pid_t pid = fork();
  if (pid < 0) throw IoError("cannot fork embedder process");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command_.c_str(), (char*)nullptr);
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  child_pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ProcessEmbedder::~ProcessEmbedder() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  if (child_pid_ > 0) {
    int status = 0;
    waitpid(child_pid_, &status, 0);
  }
}

EmbeddingVector ProcessEmbedder::embed(std::string_view text) {
  nlohmann::ordered_json req;
  long long req_id = next_request_++;
  req["id"] = req_id;
  req["text"] = std::string(text);
  std::string line = req.dump();
  line += '\n';
  size_t written = 0;
  while (written < line.size()) {
    ssize_t n = write(to_child_, line.data() + written, line.size() - written);
    if (n <= 0) throw IoError("embedder process pipe closed");
    written += size_t(n);
  }

  // Read one full response line.
  std::string response;
  while (true) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      response = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      break;
    }
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof(chunk));
    if (n <= 0) throw IoError("embedder process ended unexpectedly");
    buffer_.append(chunk, size_t(n));
  }

  nlohmann::ordered_json resp;
  try {
    resp = nlohmann::ordered_json::parse(response);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad embedder response: ") + e.what());
  }
  if (resp.at("id").get<long long>() != req_id)
    throw IoError("embedder response id mismatch");
  EmbeddingVector out;
  for (const auto& v : resp.at("vector")) out.values.push_back(v.get<float>());
  if (out.values.size() != dimension_)
    throw VersionMismatch("embedder returned dimension " +
                          std::to_string(out.values.size()) + ", expected " +
                          std::to_string(dimension_));
  // Enforce the unit-norm invariant on behalf of the external model.
  float norm = simd::norm2_scalar(out.values.data(), out.values.size());
  if (norm > 0.0f)
    for (float& v : out.values) v = float(double(v) / double(norm));
  return out;
}

std::unique_ptr<Embedder> make_default_embedder() {
  return std::make_unique<HashedTrigramEmbedder>(512);
}

}  // namespace sqlfix
