#include "kgpipe/config.hpp"

#include <set>

#include "kgpipe/answering.hpp"
#include "kgpipe/prompts.hpp"

namespace kgpipe {

std::string_view to_string(BackendMode mode) {
  switch (mode) {
    case BackendMode::kLive: return "live";
    case BackendMode::kReplay: return "replay";
    case BackendMode::kRecord: return "record";
  }
  return "live";
}

BackendMode backend_mode_from_string(std::string_view s) {
  if (s == "live") return BackendMode::kLive;
  if (s == "replay") return BackendMode::kReplay;
  if (s == "record") return BackendMode::kRecord;
  throw ConfigError("backend.mode must be live, replay or record (got '" + std::string(s) + "')");
}

void PipelineConfig::validate() const {
  backend.params.validate();
  if (backend.base_url.empty() && backend.mode != BackendMode::kReplay) {
    throw ConfigError("backend.base_url is required for live and record modes");
  }
  if (backend.mode != BackendMode::kLive && backend.fixture_dir.empty()) {
    throw ConfigError("backend.fixture_dir is required for replay and record modes");
  }
  if (backend.timeout_seconds < 1) throw ConfigError("backend.timeout_seconds must be >= 1");
  if (chunk_size < 1) throw ConfigError("chunking.size must be >= 1");
  if (chunk_overlap < 0 || chunk_overlap >= chunk_size) {
    throw ConfigError("chunking.overlap must satisfy 0 <= overlap < size");
  }
  if (retrieval_k < 1) throw ConfigError("retrieval_k must be >= 1");
  if (concurrency < 1) throw ConfigError("concurrency must be >= 1");
  if (base_iri.empty() || (base_iri.back() != '/' && base_iri.back() != '#')) {
    throw ConfigError("base_iri must end in '/' or '#'");
  }
  if (base_prefix.empty()) throw ConfigError("base_prefix must not be empty");
  prompts::check_version(prompt_version);
  prompts::check_version(answer_version);
  if (!dont_know_patterns.empty()) answer::DontKnowDetector check(dont_know_patterns);
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  reject_unknown(j,
                 {"backend", "corpus_dir", "chunking", "retrieval_k", "base_iri", "base_prefix", "foundation_path",
                  "prompt_version", "answer_version", "concurrency", "ground_truth", "dont_know_patterns",
                  "exclude_unlinked_individuals", "cq_domain_prompt"},
                 "config");
  PipelineConfig c;
  if (j.contains("backend")) {
    const json& b = j.at("backend");
    reject_unknown(b,
                   {"mode", "base_url", "model", "temperature", "max_tokens", "api_key_env", "timeout_seconds",
                    "fixture_dir"},
                   "backend");
    std::string mode = std::string(to_string(c.backend.mode));
    read(b, "mode", mode, "backend");
    c.backend.mode = backend_mode_from_string(mode);
    read(b, "base_url", c.backend.base_url, "backend");
    read(b, "model", c.backend.params.model_name, "backend");
    read(b, "temperature", c.backend.params.temperature, "backend");
    read(b, "max_tokens", c.backend.params.max_tokens, "backend");
    read(b, "api_key_env", c.backend.api_key_env, "backend");
    read(b, "timeout_seconds", c.backend.timeout_seconds, "backend");
    read(b, "fixture_dir", c.backend.fixture_dir, "backend");
  }
  if (j.contains("chunking")) {
    const json& ch = j.at("chunking");
    reject_unknown(ch, {"size", "overlap"}, "chunking");
    read(ch, "size", c.chunk_size, "chunking");
    read(ch, "overlap", c.chunk_overlap, "chunking");
  }
  read(j, "corpus_dir", c.corpus_dir, "config");
  read(j, "retrieval_k", c.retrieval_k, "config");
  read(j, "base_iri", c.base_iri, "config");
  read(j, "base_prefix", c.base_prefix, "config");
  read(j, "foundation_path", c.foundation_path, "config");
  read(j, "prompt_version", c.prompt_version, "config");
  read(j, "answer_version", c.answer_version, "config");
  read(j, "concurrency", c.concurrency, "config");
  read(j, "ground_truth", c.ground_truth, "config");
  read(j, "dont_know_patterns", c.dont_know_patterns, "config");
  read(j, "exclude_unlinked_individuals", c.exclude_unlinked_individuals, "config");
  read(j, "cq_domain_prompt", c.cq_domain_prompt, "config");
  c.validate();
  return c;
}

json to_json(const PipelineConfig& c) {
  return {{"backend",
           {{"mode", std::string(to_string(c.backend.mode))},
            {"base_url", c.backend.base_url},
            {"model", c.backend.params.model_name},
            {"temperature", c.backend.params.temperature},
            {"max_tokens", c.backend.params.max_tokens},
            {"api_key_env", c.backend.api_key_env},
            {"timeout_seconds", c.backend.timeout_seconds},
            {"fixture_dir", c.backend.fixture_dir}}},
          {"corpus_dir", c.corpus_dir},
          {"chunking", {{"size", c.chunk_size}, {"overlap", c.chunk_overlap}}},
          {"retrieval_k", c.retrieval_k},
          {"base_iri", c.base_iri},
          {"base_prefix", c.base_prefix},
          {"foundation_path", c.foundation_path},
          {"prompt_version", c.prompt_version},
          {"answer_version", c.answer_version},
          {"concurrency", c.concurrency},
          {"ground_truth", c.ground_truth},
          {"dont_know_patterns", c.dont_know_patterns},
          {"exclude_unlinked_individuals", c.exclude_unlinked_individuals},
          {"cq_domain_prompt", c.cq_domain_prompt}};
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
  PipelineConfig c = config_from_json(j);
  const auto base = std::filesystem::absolute(path).parent_path();
  for (std::string* p : {&c.corpus_dir, &c.backend.fixture_dir, &c.foundation_path, &c.ground_truth}) {
    if (!p->empty() && std::filesystem::path(*p).is_relative()) *p = (base / *p).lexically_normal().string();
  }
  return c;
}

}  // namespace kgpipe
