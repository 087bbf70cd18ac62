#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "audit/backends.hpp"
#include "audit/errors.hpp"

namespace audit {

namespace {

// Splits "scheme://host[:port][/prefix]" into client base and path prefix.
void split_url(const std::string& url, std::string& host_base, std::string& path_prefix) {
  std::size_t scheme_end = url.find("://");
  std::size_t path_start =
      url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  if (path_start == std::string::npos) {
    host_base = url;
    path_prefix.clear();
  } else {
    host_base = url.substr(0, path_start);
    path_prefix = url.substr(path_start);
    while (!path_prefix.empty() && path_prefix.back() == '/') path_prefix.pop_back();
  }
}

bool transient_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

LiveBackend::LiveBackend(LiveBackendOptions options) : options_(std::move(options)) {
  split_url(options_.base_url, host_base_, path_prefix_);
}

RawResponse LiveBackend::complete(const PromptInstance& prompt, const DecodingParams& params) {
  const std::string fingerprint = response_fingerprint(prompt.text, id(), params);

  nlohmann::json body = {
      {"model", options_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt.text}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };
  if (options_.forward_seed) body["seed"] = params.seed;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (const char* key = std::getenv("AUDIT_API_KEY")) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  const auto start = std::chrono::steady_clock::now();
  std::string last_failure = "no request issued";
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = std::chrono::milliseconds(
          static_cast<long long>(options_.backoff_base_ms * (1LL << (attempt - 1))));
      std::this_thread::sleep_for(std::min(delay, std::chrono::milliseconds(30000)));
    }
    // httplib clients are not thread-safe; one per request
    httplib::Client client(host_base_);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);

    auto result = client.Post(path_prefix_ + "/v1/chat/completions", headers, payload,
                              "application/json");
    if (!result) {
      last_failure = "connection failure: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status == 401 || result->status == 403) {
      throw Error(Errc::auth_failure, "endpoint returned HTTP " + std::to_string(result->status));
    }
    if (transient_status(result->status)) {
      last_failure = "HTTP " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw Error(Errc::endpoint_unreachable,
                  "endpoint returned HTTP " + std::to_string(result->status));
    }

    nlohmann::json doc = nlohmann::json::parse(result->body, nullptr, false);
    std::string text;
    if (!doc.is_discarded() && doc.contains("choices") && !doc["choices"].empty()) {
      text = doc["choices"][0].value("message", nlohmann::json::object())
                 .value("content", std::string{});
    }
    RawResponse response;
    response.prompt_fingerprint = fingerprint;
    response.backend_id = id();
    response.text = std::move(text);
    response.latency_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start)
                              .count();
    return response;
  }
  if (last_failure.rfind("connection failure", 0) == 0) {
    throw Error(Errc::endpoint_unreachable,
                last_failure + " after " + std::to_string(options_.max_retries + 1) + " attempts");
  }
  throw Error(Errc::retries_exhausted,
              last_failure + " after " + std::to_string(options_.max_retries + 1) + " attempts");
}

}  // namespace audit
