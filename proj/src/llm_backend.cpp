#include "kgpipe/llm_backend.hpp"

#include <array>
#include <cmath>
#include <thread>

namespace kgpipe::llm {

namespace fs = std::filesystem;

void GenerationParams::validate() const {
  if (!std::isfinite(temperature) || temperature < 0.0) {
    throw ConfigError("temperature must be finite and >= 0");
  }
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
}

GenerationParams default_params(const json& overrides) {
  GenerationParams params;
  try {
    if (overrides.contains("temperature")) params.temperature = overrides.at("temperature").get<double>();
    if (overrides.contains("max_tokens")) params.max_tokens = overrides.at("max_tokens").get<int>();
    if (overrides.contains("model")) params.model_name = overrides.at("model").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid generation parameter: ") + e.what());
  }
  params.validate();
  return params;
}

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 7> kStageNames{{
    {Stage::kCqGen, "cq_gen"},
    {Stage::kConceptExtract, "concept_extract"},
    {Stage::kOntologyBuild, "ontology_build"},
    {Stage::kCqAnswer, "cq_answer"},
    {Stage::kKgBuild, "kg_build"},
    {Stage::kJudgeAnswer, "judge_answer"},
    {Stage::kJudgeKg, "judge_kg"},
}};

void check_request(const ChatRequest& request) {
  if (request.user_text.empty()) throw PreconditionError("chat request has empty user_text");
  request.params.validate();
}

}  // namespace

std::string_view to_string(Stage stage) {
  for (const auto& [s, name] : kStageNames) {
    if (s == stage) return name;
  }
  return "unknown";
}

Stage stage_from_string(std::string_view tag) {
  for (const auto& [s, name] : kStageNames) {
    if (name == tag) return s;
  }
  throw ParseError("unknown stage tag: " + std::string(tag));
}

std::string canonical_request(const ChatRequest& request) {
  json j = {
      {"max_tokens", request.params.max_tokens},
      {"model", request.params.model_name},
      {"system", request.system_text ? json(*request.system_text) : json(nullptr)},
      {"temperature", request.params.temperature},
      {"user", request.user_text},
  };
  return j.dump();
}

std::string fingerprint(const ChatRequest& request) { return sha256_hex(canonical_request(request)); }

json wire_payload(const ChatRequest& request) {
  json messages = json::array();
  if (request.system_text) messages.push_back({{"role", "system"}, {"content", *request.system_text}});
  messages.push_back({{"role", "user"}, {"content", request.user_text}});
  return {
      {"model", request.params.model_name},
      {"messages", std::move(messages)},
      {"temperature", request.params.temperature},
      {"max_tokens", request.params.max_tokens},
  };
}

GenerationParams params_from_wire(const json& payload) {
  GenerationParams params;
  params.model_name = payload.at("model").get<std::string>();
  params.temperature = payload.at("temperature").get<double>();
  params.max_tokens = payload.at("max_tokens").get<int>();
  return params;
}

OpenAiCompatibleBackend::OpenAiCompatibleBackend(std::string base_url, std::optional<std::string> api_key,
                                                 std::unique_ptr<HttpTransport> transport, RetryPolicy retry)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), transport_(std::move(transport)), retry_(retry) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string OpenAiCompatibleBackend::id() const { return "openai-compatible:" + base_url_; }

ChatResponse OpenAiCompatibleBackend::complete(const ChatRequest& request) {
  check_request(request);
  const std::string body = wire_payload(request).dump();
  std::map<std::string, std::string> headers{{"Content-Type", "application/json"}};
  if (api_key_) headers["Authorization"] = "Bearer " + *api_key_;
  const std::string url = base_url_ + "/chat/completions";

  HttpReply reply;
  for (int attempt = 0;; ++attempt) {
    try {
      reply = transport_->post_json(url, headers, body);
      break;
    } catch (const BackendError& e) {
      if (!e.retryable() || attempt >= retry_.max_retries) throw;
      std::this_thread::sleep_for(retry_.base_delay * (1 << attempt));
    }
  }
  if (reply.status < 200 || reply.status >= 300) {
    throw BackendError("backend returned HTTP " + std::to_string(reply.status) + ": " + reply.body.substr(0, 500),
                       false, reply.status);
  }
  std::string text;
  try {
    const json parsed = json::parse(reply.body);
    text = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed chat-completions response: ") + e.what(), false, reply.status);
  }
  return {std::move(text), id(), fingerprint(request)};
}

ReplayStore::ReplayStore(fs::path dir) : dir_(std::move(dir)) {}

fs::path ReplayStore::path_for(const std::string& fp) const { return dir_ / (fp + ".json"); }

std::optional<std::string> ReplayStore::lookup(const std::string& fp) const {
  const fs::path path = path_for(fp);
  std::lock_guard lock(mutex_);
  if (!fs::exists(path)) return std::nullopt;
  const json j = read_json_file(path);
  return j.at("response").get<std::string>();
}

void ReplayStore::record(const ChatRequest& request, const std::string& response_text) {
  check_request(request);
  const std::string fp = fingerprint(request);
  const fs::path path = path_for(fp);
  std::lock_guard lock(mutex_);
  if (fs::exists(path)) {
    const json existing = read_json_file(path);
    if (existing.at("response").get<std::string>() != response_text) throw FixtureImmutableError(fp);
    return;
  }
  const json entry = {
      {"fingerprint", fp},
      {"stage", std::string(to_string(request.stage))},
      {"request", json::parse(canonical_request(request))},
      {"response", response_text},
  };
  write_json_atomic(path, entry);
}

void record_fixture(ReplayStore& store, const ChatRequest& request, const std::string& response_text) {
  store.record(request, response_text);
}

ReplayBackend::ReplayBackend(std::shared_ptr<ReplayStore> store) : store_(std::move(store)) {}

ChatResponse ReplayBackend::complete(const ChatRequest& request) {
  check_request(request);
  const std::string fp = fingerprint(request);
  auto text = store_->lookup(fp);
  if (!text) throw FixtureMissingError(fp);
  return {std::move(*text), id(), fp};
}

RecordingBackend::RecordingBackend(std::shared_ptr<Backend> inner, std::shared_ptr<ReplayStore> store)
    : inner_(std::move(inner)), store_(std::move(store)) {}

std::string RecordingBackend::id() const { return "recording:" + inner_->id(); }

ChatResponse RecordingBackend::complete(const ChatRequest& request) {
  check_request(request);
  const std::string fp = fingerprint(request);
  if (auto cached = store_->lookup(fp)) return {std::move(*cached), id(), fp};
  ChatResponse response = inner_->complete(request);
  store_->record(request, response.text);
  response.backend_id = id();
  response.fingerprint = fp;
  return response;
}

}  // namespace kgpipe::llm
