#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "kgpipe/error.hpp"
#include "kgpipe/json_io.hpp"

namespace kgpipe::llm {

// Sampling defaults used for every stage that talks to the model.
inline constexpr double kDefaultTemperature = 1e-5;
inline constexpr int kDefaultMaxTokens = 25000;

struct GenerationParams {
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
  std::string model_name;

  // Throws ConfigError when temperature is negative/non-finite or max_tokens < 1.
  void validate() const;

  friend bool operator==(const GenerationParams&, const GenerationParams&) = default;
};

// Defaults, with any field present in `overrides` (keys temperature,
// max_tokens, model) taking precedence. Validates the result.
GenerationParams default_params(const json& overrides = json::object());

enum class Stage {
  kCqGen,
  kConceptExtract,
  kOntologyBuild,
  kCqAnswer,
  kKgBuild,
  kJudgeAnswer,
  kJudgeKg,
};

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view tag);

struct ChatRequest {
  std::optional<std::string> system_text;
  std::string user_text;
  GenerationParams params;
  Stage stage = Stage::kCqGen;
};

struct ChatResponse {
  std::string text;
  std::string backend_id;
  std::string fingerprint;
};

// Canonical byte serialization of the fingerprinted request fields.
std::string canonical_request(const ChatRequest& request);

// SHA-256 (hex) over canonical_request(); independent of the stage tag.
std::string fingerprint(const ChatRequest& request);

// OpenAI-compatible chat-completions body for `request`.
json wire_payload(const ChatRequest& request);

// Inverse of the parameter part of wire_payload().
GenerationParams params_from_wire(const json& payload);

class BackendError : public Error {
 public:
  BackendError(const std::string& what, bool retryable, int http_status = 0)
      : Error(what, ErrorKind::kBackend), retryable_(retryable), http_status_(http_status) {}

  bool retryable() const noexcept { return retryable_; }
  int http_status() const noexcept { return http_status_; }

 private:
  bool retryable_;
  int http_status_;
};

class FixtureMissingError : public BackendError {
 public:
  explicit FixtureMissingError(const std::string& fp)
      : BackendError("no replay fixture for request fingerprint " + fp, false), fingerprint_(fp) {}

  const std::string& fingerprint() const noexcept { return fingerprint_; }

 private:
  std::string fingerprint_;
};

class FixtureImmutableError : public Error {
 public:
  explicit FixtureImmutableError(const std::string& fp)
      : Error("fixture " + fp + " already recorded with different text") {}
};

class Backend {
 public:
  virtual ~Backend() = default;

  // Returns the model text verbatim. Throws PreconditionError on an empty
  // user_text before any I/O.
  virtual ChatResponse complete(const ChatRequest& request) = 0;
  virtual std::string id() const = 0;
};

// HTTP plumbing behind the live backend; swapped for a stub in tests.
struct HttpReply {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  // Throws BackendError(retryable=true) on connection-level failures.
  virtual HttpReply post_json(const std::string& url, const std::map<std::string, std::string>& headers,
                              const std::string& body) = 0;
};

std::unique_ptr<HttpTransport> make_http_transport(std::chrono::seconds timeout);

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{500};
};

class OpenAiCompatibleBackend : public Backend {
 public:
  OpenAiCompatibleBackend(std::string base_url, std::optional<std::string> api_key,
                          std::unique_ptr<HttpTransport> transport, RetryPolicy retry = {});

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override;

 private:
  std::string base_url_;
  std::optional<std::string> api_key_;
  std::unique_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
};

// One JSON file per fingerprint: {fingerprint, stage, request, response}.
class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path dir);

  std::optional<std::string> lookup(const std::string& fp) const;

  // Idempotent for identical text; FixtureImmutableError otherwise.
  void record(const ChatRequest& request, const std::string& response_text);

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& fp) const;

  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::shared_ptr<ReplayStore> store);

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override { return "replay"; }

 private:
  std::shared_ptr<ReplayStore> store_;
};

// Delegates to `inner` and stores every response in `store`; requests
// already present in the store are answered from it.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ReplayStore> store);

  ChatResponse complete(const ChatRequest& request) override;
  std::string id() const override;

 private:
  std::shared_ptr<Backend> inner_;
  std::shared_ptr<ReplayStore> store_;
};

// Convenience: records `response_text` for `request` in `store`.
void record_fixture(ReplayStore& store, const ChatRequest& request, const std::string& response_text);

}  // namespace kgpipe::llm
