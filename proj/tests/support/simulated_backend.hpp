#pragma once

#include <atomic>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/llm_backend.hpp"

namespace kgpipe::testing {

// Deterministic stand-in for a chat model. Each stage gets a plausible,
// imperfect response derived only from the prompt text: numbered CQ lists
// with a duplicate, fenced Turtle with missing prefixes, boilerplate-wrapped
// answers, prose-only KG replies for some inputs, and rubric-style judge
// replies. Used to record the bundled replay fixtures.
class SimulatedBackend : public llm::Backend {
 public:
  llm::ChatResponse complete(const llm::ChatRequest& request) override;
  std::string id() const override { return "simulated"; }

  std::size_t calls() const { return calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
};

std::uint64_t fnv1a(std::string_view s);

// Lowercase alphanumeric words of length >= 3 that are not stop words.
std::set<std::string> content_words(std::string_view text);

// The `n` sentences of `text` sharing the most content words with
// `question`, in text order; empty when the best overlap is below 2.
std::vector<std::string> best_sentences(std::string_view text, std::string_view question, std::size_t n);

// The simulated judge's 0-10 agreement score.
int simulated_score(std::string_view ground_truth, std::string_view prediction);

// The 40 competency questions the simulated model proposes.
const std::vector<std::string>& simulated_questions();

}  // namespace kgpipe::testing
