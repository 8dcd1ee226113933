#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/answering.hpp"
#include "kgpipe/json_io.hpp"
#include "kgpipe/kg.hpp"
#include "kgpipe/llm_backend.hpp"

namespace kgpipe::judge {

// Ordered from worst to best.
enum class Label { kWrong = 0, kPartial = 1, kRight = 2 };

std::string_view to_string(Label label);
Label label_from_string(std::string_view s);

inline constexpr int kMinScore = 0;
inline constexpr int kMaxScore = 10;
inline constexpr int kRightThreshold = 6;  // score >= 6
inline constexpr int kWrongThreshold = 3;  // score < 3

// >= 6 Right, < 3 Wrong, otherwise Partial. Throws PreconditionError
// outside [0, 10].
Label classify(int score);

struct GroundTruth {
  std::string cq_id;
  std::string doc_id;
  std::string text;
  Label human_label = Label::kWrong;
};

// Tab-separated `cq_id doc_id label text`, one record per (cq_id, doc_id);
// '#' lines and blank lines are ignored.
std::vector<GroundTruth> parse_ground_truth(std::string_view content);
std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path);
std::string ground_truth_text(const std::vector<GroundTruth>& records);

struct JudgeVerdict {
  int score = 0;
  std::string explanation;
  Label label = Label::kWrong;
};

// Reads `score: <int>` and `Explanation:` lines.
JudgeVerdict parse_verdict(const std::string& response);

// True/False from a `Response:` line.
bool parse_verification(const std::string& response);

JudgeVerdict judge_answer(llm::Backend& backend, const GroundTruth& ground_truth, const answer::CQAnswer& answer,
                          std::string_view question, const llm::GenerationParams& params);

// The strings checked for an individual: its label, or its decamelized
// class name when unlabeled.
std::string individual_strings(const kg::KgIndividual& individual);

bool verify_individual(llm::Backend& backend, const kg::KgIndividual& individual, const answer::CQAnswer& answer,
                       const llm::GenerationParams& params);

struct KeyedVerdict {
  std::string cq_id;
  std::string doc_id;
  std::optional<JudgeVerdict> verdict;  // empty when the pair could not be evaluated
  std::string error;
};

json to_json(const KeyedVerdict& v);
KeyedVerdict keyed_verdict_from_json(const json& j);

struct DisagreementReport {
  std::size_t count = 0;
  std::size_t total = 0;
  std::size_t unevaluated = 0;
  // confusion[human][judge], indexed by Label.
  std::array<std::array<std::size_t, 3>, 3> confusion{};
};

json to_json(const DisagreementReport& r);

class AlignmentError : public Error {
 public:
  explicit AlignmentError(const std::string& what) : Error(what, ErrorKind::kPrecondition) {}
};

DisagreementReport disagreement_report(const std::vector<GroundTruth>& ground, const std::vector<KeyedVerdict>& verdicts);

// Percentage with two decimals, stored exactly as hundredths of a percent.
struct Percent {
  std::int64_t hundredths = 0;

  std::string str() const;
  double value() const { return static_cast<double>(hundredths) / 100.0; }
  friend bool operator==(const Percent&, const Percent&) = default;
};

// matched / total * 100 rounded half-up to two decimals. Requires
// 0 <= matched <= total and total >= 1.
Percent alignment_percentage(std::int64_t matched, std::int64_t total);

struct DocumentAlignment {
  std::string doc_id;
  kg::KgStatus status = kg::KgStatus::kOk;
  std::size_t matched = 0;
  std::size_t total = 0;
  std::size_t unevaluated = 0;

  // "x" for no-meaningful-KG or empty denominators, else the percentage.
  std::string cell() const;
};

json to_json(const DocumentAlignment& a);
DocumentAlignment document_alignment_from_json(const json& j);

}  // namespace kgpipe::judge
