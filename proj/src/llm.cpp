#include "sqlfix/llm.hpp"

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"

#include "sqlfix/errors.hpp"
#include "sqlfix/util.hpp"

namespace sqlfix {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::string request_fingerprint(const LlmRequest& request) {
  std::string blob = request.model;
  blob += '\x1f';
  blob += request.system;
  blob += '\x1f';
  blob += request.user;
  return fnv1a_hex(blob);
}

HttpLlmConfig HttpLlmConfig::from_env() {
  HttpLlmConfig cfg;
  if (const char* v = std::getenv("LLM_API_BASE")) cfg.base_url = v;
  if (const char* v = std::getenv("LLM_API_KEY")) cfg.api_key = v;
  if (const char* v = std::getenv("LLM_MODEL")) cfg.model = v;
  return cfg;
}

HttpLlmClient::HttpLlmClient(HttpLlmConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty())
    throw LlmUnavailable("live client requires LLM_API_BASE");
}

std::string HttpLlmClient::complete(const LlmRequest& request) {
  // Split base_url into host part and path prefix.
  std::string url = config_.base_url;
  std::string scheme_host = url;
  std::string path_prefix;
  size_t scheme = url.find("://");
  size_t path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start != std::string::npos) {
    scheme_host = url.substr(0, path_start);
    path_prefix = url.substr(path_start);
  }
  while (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();

  ordered_json body;
  body["model"] = request.model.empty() ? config_.model : request.model;
  ordered_json messages = ordered_json::array();
  if (!request.system.empty())
    messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", request.user}});
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  std::string payload = body.dump();

  httplib::Headers headers;
  if (!config_.api_key.empty())
    headers.emplace("Authorization", "Bearer " + config_.api_key);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    httplib::Client client(scheme_host);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    auto res = client.Post(path_prefix + "/chat/completions", headers, payload,
                           "application/json");
    if (!res) {
      last_error = "transport error " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body;
      continue;
    }
    try {
      ordered_json reply = ordered_json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("malformed completion response: ") + e.what();
    }
  }
  throw LlmUnavailable("chat completion failed after " +
                       std::to_string(config_.max_retries + 1) +
                       " attempts: " + last_error);
}

MockLlmClient::MockLlmClient(const std::string& script_path) {
  std::string text = read_file(script_path);
  size_t line_no = 0;
  for (const std::string& line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IoError("mock script line " + std::to_string(line_no) + ": " +
                    e.what());
    }
    Rule rule;
    if (j.contains("index")) rule.index = j.at("index").get<long long>();
    if (j.contains("fingerprint"))
      rule.fingerprint = j.at("fingerprint").get<std::string>();
    if (j.contains("contains")) rule.contains = j.at("contains").get<std::string>();
    rule.reply = j.at("reply").get<std::string>();
    rules_.push_back(std::move(rule));
  }
}

std::string MockLlmClient::complete(const LlmRequest& request) {
  long long call = calls_++;
  std::string fp = request_fingerprint(request);
  for (const Rule& rule : rules_) {
    if (rule.index >= 0 && rule.index == call) return rule.reply;
    if (!rule.fingerprint.empty() && rule.fingerprint == fp) return rule.reply;
    if (!rule.contains.empty() &&
        request.user.find(rule.contains) != std::string::npos)
      return rule.reply;
  }
  throw LlmUnavailable("no mock rule matched call " + std::to_string(call) +
                       " (fingerprint " + fp + ")");
}

std::unique_ptr<LlmClient> make_llm_client(const std::string& spec) {
  if (spec == "live")
    return std::make_unique<HttpLlmClient>(HttpLlmConfig::from_env());
  if (spec.rfind("mock:", 0) == 0)
    return std::make_unique<MockLlmClient>(spec.substr(5));
  throw Error("unknown client spec '" + spec + "' (want live or mock:<path>)");
}

}  // namespace sqlfix
