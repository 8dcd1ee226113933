#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"

namespace kgpipe {

enum class BackendMode { kLive, kReplay, kRecord };

std::string_view to_string(BackendMode mode);
BackendMode backend_mode_from_string(std::string_view s);

struct BackendConfig {
  BackendMode mode = BackendMode::kLive;
  std::string base_url = "http://localhost:8000/v1";
  std::string api_key_env = "KGPIPE_API_KEY";
  int timeout_seconds = 600;
  std::string fixture_dir;  // replay/record store; relative to the config file
  llm::GenerationParams params;
};

struct PipelineConfig {
  BackendConfig backend;
  std::string corpus_dir;
  int chunk_size = 2500;
  int chunk_overlap = 100;
  int retrieval_k = 4;
  std::string base_iri = "https://w3id.org/dlprov/";
  std::string base_prefix = "dlprov";
  std::string foundation_path;  // empty: bundled PROV-O subset
  std::string prompt_version = "v1";
  std::string answer_version = "v1";
  int concurrency = 2;
  std::string ground_truth;  // empty: runs/<id>/ground_truth.tsv
  std::vector<std::string> dont_know_patterns;  // empty: built-in patterns
  bool exclude_unlinked_individuals = false;
  std::string cq_domain_prompt;  // empty: built-in prompt

  // Throws ConfigError naming the first invalid field.
  void validate() const;
};

// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
PipelineConfig config_from_json(const json& j);
json to_json(const PipelineConfig& config);

// Reads and validates a config file. Relative paths inside it are resolved
// against the file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace kgpipe
