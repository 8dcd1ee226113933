#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"

namespace kgpipe::cq {

enum class CqStatus { kGenerated, kEdited, kAdded, kApproved };
enum class Provenance { kLlm, kHuman };

std::string_view to_string(CqStatus status);
std::string_view to_string(Provenance provenance);
CqStatus status_from_string(std::string_view s);

struct CompetencyQuestion {
  std::string cq_id;
  std::string text;
  CqStatus status = CqStatus::kGenerated;
  Provenance provenance = Provenance::kLlm;

  friend bool operator==(const CompetencyQuestion&, const CompetencyQuestion&) = default;
};

struct CqSet {
  std::vector<CompetencyQuestion> questions;
  int review_round = 0;

  friend bool operator==(const CqSet&, const CqSet&) = default;
};

json to_json(const CqSet& set);
CqSet cq_set_from_json(const json& j);

// Question lines from a numbered or bulleted list: markers are stripped and
// every line ending in '?' is kept; case-folded duplicates are dropped.
// Throws ResponseParseError when nothing is found.
CqSet parse_question_list(const std::string& response);

CqSet generate_cqs(llm::Backend& backend, const std::string& domain_prompt, const llm::GenerationParams& params);

inline constexpr std::string_view kReviewHeader = "# cq_id\tstatus\ttext";

std::string review_file_text(const CqSet& set);
void export_for_review(const CqSet& set, const std::filesystem::path& path);

// Reconciles a reviewed file against the set that was exported. Unchanged
// generated questions become approved; changed text becomes edited/human;
// lines marked `added` (or carrying an unknown id) become added/human.
// Ids are re-densified in file order and review_round is incremented.
CqSet import_reviewed_text(std::string_view content, const CqSet& exported);
CqSet import_reviewed(const std::filesystem::path& path, const CqSet& exported);

// Throws CheckpointError unless the set has been through review.
void require_reviewed(const CqSet& set);

// Questions that may flow downstream.
std::vector<CompetencyQuestion> approved_questions(const CqSet& set);

}  // namespace kgpipe::cq
