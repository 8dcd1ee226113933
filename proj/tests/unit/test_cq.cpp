#include <doctest.h>

#include "generators.hpp"
#include "kgpipe/cq.hpp"
#include "kgpipe/text_util.hpp"

using namespace kgpipe;
using namespace kgpipe::cq;

namespace {

std::string numbered(int n) {
  std::string out = "Here are the questions:\n";
  for (int i = 1; i <= n; ++i) out += std::to_string(i) + ". What is property " + std::to_string(i) + " of the pipeline?\n";
  return out;
}

class FixedBackend : public llm::Backend {
 public:
  explicit FixedBackend(std::string text) : text_(std::move(text)) {}
  llm::ChatResponse complete(const llm::ChatRequest& r) override {
    last = r;
    return {text_, "fixed", ""};
  }
  std::string id() const override { return "fixed"; }
  llm::ChatRequest last;

 private:
  std::string text_;
};

}  // namespace

TEST_CASE("numbered list parses to dense ids") {
  const auto set = parse_question_list(numbered(40));
  REQUIRE(set.questions.size() == 40);
  CHECK(set.questions.front().cq_id == "CQ1");
  CHECK(set.questions.back().cq_id == "CQ40");
  CHECK(set.review_round == 0);
  for (const auto& q : set.questions) CHECK(q.status == CqStatus::kGenerated);
}

TEST_CASE("duplicates are removed case-insensitively") {
  const auto set = parse_question_list("- Which data is used?\n* which data is USED?\n");
  REQUIRE(set.questions.size() == 1);
  CHECK(set.questions[0].text == "Which data is used?");
}

TEST_CASE("prose without questions is a parse error carrying the raw text") {
  try {
    parse_question_list("I cannot help with that.");
    FAIL("expected a parse error");
  } catch (const ResponseParseError& e) {
    CHECK(e.raw() == "I cannot help with that.");
  }
}

TEST_CASE("generate_cqs tags the request stage") {
  FixedBackend backend(numbered(3));
  const auto set = generate_cqs(backend, "deep learning provenance", llm::default_params());
  CHECK(set.questions.size() == 3);
  CHECK(backend.last.stage == llm::Stage::kCqGen);
  CHECK(backend.last.user_text.find("deep learning provenance") != std::string::npos);
}

TEST_CASE("review export format") {
  const auto set = parse_question_list(numbered(40));
  const auto text = review_file_text(set);
  const auto lines = text::split_lines(text);
  CHECK(lines.at(0) == std::string(kReviewHeader));
  CHECK(lines.size() == 41 + (text.back() == '\n' && lines.back().empty() ? 1 : 0));
  CHECK(lines.at(1) == "CQ1\tgenerated\tWhat is property 1 of the pipeline?");
  CHECK(review_file_text(CqSet{}) == std::string(kReviewHeader) + "\n");
  testing::TempDir dir("review");
  export_for_review(set, dir.path() / "a.tsv");
  export_for_review(set, dir.path() / "b.tsv");
  CHECK(read_text_file(dir.path() / "a.tsv") == read_text_file(dir.path() / "b.tsv"));
}

TEST_CASE("import classifies edits, additions and approvals") {
  const auto set = parse_question_list(numbered(40));
  std::string text = review_file_text(set);
  text::replace_all(text, "property 7 of", "the seventh property of");
  text += "CQ41\tadded\tWho annotated the data?\n\tadded\tWhich GPU was used?\n";
  const auto imported = import_reviewed_text(text, set);
  REQUIRE(imported.questions.size() == 42);
  CHECK(imported.review_round == 1);
  CHECK(imported.questions[6].status == CqStatus::kEdited);
  CHECK(imported.questions[6].provenance == Provenance::kHuman);
  CHECK(imported.questions[0].status == CqStatus::kApproved);
  CHECK(imported.questions[41].status == CqStatus::kAdded);
  CHECK(imported.questions[41].cq_id == "CQ42");
}

TEST_CASE("deleting lines re-densifies ids") {
  const auto set = parse_question_list(numbered(5));
  std::string text;
  for (const auto& line : text::split_lines(review_file_text(set))) {
    if (!line.starts_with("CQ2\t")) text += line + "\n";
  }
  const auto imported = import_reviewed_text(text, set);
  REQUIRE(imported.questions.size() == 4);
  CHECK(imported.questions[1].cq_id == "CQ2");
  CHECK(imported.questions[1].text == "What is property 3 of the pipeline?");
}

TEST_CASE("unchanged round trip only approves") {
  const auto set = parse_question_list(numbered(10));
  const auto imported = import_reviewed_text(review_file_text(set), set);
  REQUIRE(imported.questions.size() == set.questions.size());
  for (std::size_t i = 0; i < set.questions.size(); ++i) {
    CHECK(imported.questions[i].cq_id == set.questions[i].cq_id);
    CHECK(imported.questions[i].text == set.questions[i].text);
    CHECK(imported.questions[i].status == CqStatus::kApproved);
  }
}

TEST_CASE("export after import is a fixed point") {
  const auto set = parse_question_list(numbered(12));
  std::string text = review_file_text(set);
  text::replace_all(text, "property 2 of", "the second property of");
  text += "X\tadded\tWhich license applies?\n";
  const auto first = import_reviewed_text(text, set);
  const auto exported = review_file_text(first);
  const auto second = import_reviewed_text(exported, first);
  CHECK(review_file_text(second) == exported);
  CHECK(second.questions == first.questions);
}

TEST_CASE("malformed review files") {
  const auto set = parse_question_list(numbered(3));
  try {
    import_reviewed_text("# header\nCQ1 generated no tabs\n", set);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(import_reviewed_text("CQ1\tbogus\tWhat?\n", set), ParseError);
  CHECK_THROWS_AS(import_reviewed_text(std::string(kReviewHeader) + "\n", set), ParseError);
}

TEST_CASE("downstream gate requires a review round") {
  const auto set = parse_question_list(numbered(3));
  CHECK_THROWS_AS(require_reviewed(set), CheckpointError);
  CHECK_NOTHROW(require_reviewed(import_reviewed_text(review_file_text(set), set)));
  CHECK(cq_set_from_json(to_json(set)) == set);
}
