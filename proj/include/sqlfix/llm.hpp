#pragma once

#include <memory>
#include <string>
#include <vector>

namespace sqlfix {

struct LlmRequest {
  std::string model;
  std::string system;
  std::string user;
  double temperature = 0.0;
};

// FNV-1a hex digest over the request texts; mock scripts can key replies on
// it.
std::string request_fingerprint(const LlmRequest& request);

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  // Returns the assistant reply text; throws LlmUnavailable on failure.
  virtual std::string complete(const LlmRequest& request) = 0;
  // Deterministic clients (the mock) always reply identically to identical
  // request sequences; recorded latencies stay 0 so output files are
  // byte-stable.
  virtual bool deterministic() const { return false; }
};

struct HttpLlmConfig {
  std::string base_url;  // e.g. http://localhost:8000/v1
  std::string api_key;
  std::string model;
  int max_retries = 2;
  int timeout_seconds = 120;

  // Reads LLM_API_BASE, LLM_API_KEY, LLM_MODEL.
  static HttpLlmConfig from_env();
};

// Chat-completion HTTP client (POST {base}/chat/completions).
class HttpLlmClient : public LlmClient {
 public:
  explicit HttpLlmClient(HttpLlmConfig config);
  std::string complete(const LlmRequest& request) override;

 private:
  HttpLlmConfig config_;
};

// Scripted responder for tests and offline runs. Rules come from a
// JSON-lines file; each line carries "reply" plus one matcher:
//   {"index": <n>, ...}        matches the n-th call (0-based)
//   {"fingerprint": "...", ...} matches request_fingerprint(request)
//   {"contains": "...", ...}    matches a substring of the user prompt
// The first matching rule wins; an unmatched request raises LlmUnavailable.
class MockLlmClient : public LlmClient {
 public:
  explicit MockLlmClient(const std::string& script_path);
  std::string complete(const LlmRequest& request) override;
  bool deterministic() const override { return true; }

 private:
  struct Rule {
    long long index = -1;
    std::string fingerprint;
    std::string contains;
    std::string reply;
  };
  std::vector<Rule> rules_;
  long long calls_ = 0;
};

// spec is "live" or "mock:<script path>".
std::unique_ptr<LlmClient> make_llm_client(const std::string& spec);

}  // namespace sqlfix
