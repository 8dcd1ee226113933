#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kgpipe::prompts {

// Prompt wording is part of the fixture key: any edit here changes request
// fingerprints and invalidates recorded replay fixtures.
inline constexpr std::string_view kTemplateVersion = "2026-10-1";

std::string default_domain_prompt();

std::string cq_generation(std::string_view domain_prompt);

std::string concept_extraction(const std::vector<std::string>& questions);

std::string ontology_draft(const std::vector<std::string>& concepts, const std::vector<std::string>& relations,
                           std::string_view base_iri, std::string_view foundation_summary);

struct ContextPassage {
  std::string label;  // e.g. "doc-id#3"
  std::string text;
};

// Context first, then instructions, then the query. `version` selects the
// instruction wording ("v1" or "v2").
std::string cq_answer(std::string_view version, const std::vector<ContextPassage>& context,
                      std::string_view question);

struct QuestionAnswer {
  std::string cq_id;
  std::string question;
  std::string answer;
};

// Questions and answers first, then the ontology. `version` is "v1" or "v2".
std::string kg_population(std::string_view version, const std::vector<QuestionAnswer>& qa,
                          std::string_view ontology_turtle, std::string_view base_iri);

std::string judge_answer(std::string_view ground_truth, std::string_view prediction, std::string_view question);

std::string judge_individual(std::string_view strings, std::string_view match_text);

// Throws ConfigError for versions other than v1/v2.
void check_version(std::string_view version);

}  // namespace kgpipe::prompts
