#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgpipe/corpus.hpp"
#include "kgpipe/cq.hpp"
#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"

namespace kgpipe::answer {

struct ChunkRef {
  std::string doc_id;
  std::size_t index = 0;

  friend bool operator==(const ChunkRef&, const ChunkRef&) = default;
};

struct CQAnswer {
  std::string cq_id;
  std::string doc_id;
  std::string raw_text;
  std::string clean_text;
  std::vector<ChunkRef> context_chunks;
  bool answered = false;
  std::string error;  // non-empty when the backend call failed

  friend bool operator==(const CQAnswer&, const CQAnswer&) = default;
};

json to_json(const CQAnswer& a);
CQAnswer answer_from_json(const json& j);

// Case-insensitive patterns that mark a "don't know" answer.
std::vector<std::string> default_dont_know_patterns();

class DontKnowDetector {
 public:
  explicit DontKnowDetector(const std::vector<std::string>& patterns = default_dont_know_patterns());
  bool matches(std::string_view text) const;

 private:
  std::vector<std::regex> patterns_;
};

// Sentence units: text up to . ? ! followed by whitespace, or a line end.
std::vector<std::string> sentences(std::string_view text);

// Drops leading assistant boilerplate lines, removes repeated sentences
// (case/whitespace-insensitive, first occurrence kept) and collapses blank
// line runs. Idempotent; surviving sentences keep their order.
std::string postprocess_answer(std::string_view raw);

struct AnswerSettings {
  std::string version = "v1";
  std::size_t k = corpus::kDefaultRetrievalDepth;
  llm::GenerationParams params;
};

// Builds the retrieval-augmented prompt, calls the backend and
// post-processes. Backend failures are captured in CQAnswer::error.
CQAnswer answer_cq(llm::Backend& backend, const corpus::RetrievalIndex& index, const cq::CompetencyQuestion& cq,
                   const std::string& doc_id, const AnswerSettings& settings, const DontKnowDetector& detector);

}  // namespace kgpipe::answer
