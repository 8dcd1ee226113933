#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgpipe/config.hpp"
#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"

namespace kgpipe::pipeline {

enum class StageName { kIngest, kGenCq, kOntology, kAnswer, kBuildKg, kEvaluate };

inline constexpr std::array<StageName, 6> kStages = {StageName::kIngest,  StageName::kGenCq,   StageName::kOntology,
                                                     StageName::kAnswer,  StageName::kBuildKg, StageName::kEvaluate};

std::string_view to_string(StageName stage);
StageName stage_from_string(std::string_view s);

enum class StageStatus { kPending, kDone, kFailed, kAwaitingReview };

std::string_view to_string(StageStatus status);
StageStatus stage_status_from_string(std::string_view s);

struct StageRecord {
  StageStatus status = StageStatus::kPending;
  std::vector<std::string> artifacts;  // relative to the run directory
  std::string diagnostic;
  std::string updated_at;
};

struct RunManifest {
  std::string run_id;
  std::string created_at;
  json config;  // snapshot taken at creation; never rewritten
  std::string prompt_version;
  std::string answer_version;
  std::map<StageName, StageRecord> stages;

  const StageRecord& stage(StageName s) const;
  StageRecord& stage(StageName s);
  // First stage that is not done, if it may run now (every earlier stage is
  // done). A stage waiting on review is not runnable.
  std::optional<StageName> next_runnable() const;
  bool complete() const;
};

json to_json(const RunManifest& m);
RunManifest manifest_from_json(const json& j);

// Fixed file names inside runs/<run_id>/.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kConfigFile = "config.json";
inline constexpr const char* kGroundTruthFile = "ground_truth.tsv";
inline constexpr const char* kReviewFile = "review/cqs.review.tsv";

std::filesystem::path run_dir(const std::filesystem::path& runs_dir, const std::string& run_id);

// Creates runs/<run_id>/ with a config snapshot. With `share_from`, the
// corpus, CQ, review and ontology artifacts of that run are copied so that
// several prompt/answer combinations build on the same upstream stages.
RunManifest create_run(const std::filesystem::path& runs_dir, const std::string& run_id, const PipelineConfig& config,
                       const std::optional<std::string>& share_from = std::nullopt);

// Throws ParseError naming the file when the manifest is unreadable.
RunManifest load_manifest(const std::filesystem::path& dir);
void save_manifest(const std::filesystem::path& dir, const RunManifest& m);

PipelineConfig run_config(const RunManifest& m);

// Builds the backend described by the config (live, replay or record).
std::shared_ptr<llm::Backend> make_backend(const PipelineConfig& config);

// Runs `fn(i)` for i in [0, n) on at most `workers` threads. The exception of
// the lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

// Executes one stage. Earlier stages must be done (OrderingError), and a
// pending review blocks everything after gencq (CheckpointError). Re-running
// a stage discards the artifacts of every later stage. On failure the stage
// is marked failed with a diagnostic and the error is rethrown.
RunManifest run_stage(const std::filesystem::path& dir, RunManifest m, StageName stage, llm::Backend& backend);

// Writes the current CQ set to review/cqs.review.tsv and returns its path.
std::filesystem::path export_review(const std::filesystem::path& dir, const RunManifest& m);

// Imports a reviewed CQ file, writes the next CQ round and marks gencq done.
RunManifest import_review(const std::filesystem::path& dir, RunManifest m, const std::filesystem::path& reviewed);

// Rebuilds stage statuses from the artifacts on disk. The config snapshot
// and timestamps of unchanged stages are kept. Pure: nothing is written.
RunManifest reconstruct_manifest(const std::filesystem::path& dir);

// reconstruct_manifest(), saved, then every runnable stage in order until
// the run completes or reaches a human checkpoint. Idempotent.
RunManifest resume(const std::filesystem::path& dir, llm::Backend& backend);

// Stops at checkpoints: returns the manifest as left by the last stage.
RunManifest run_all(const std::filesystem::path& dir, RunManifest m, llm::Backend& backend);

}  // namespace kgpipe::pipeline
