#include <doctest.h>

#include "generators.hpp"
#include "kgpipe/judge.hpp"

using namespace kgpipe;
using namespace kgpipe::judge;

namespace {

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

// Reference percentage: exact rational rounding half-up via long division.
std::string oracle_percent(long long m, long long t) {
  const long long scaled = m * 10000;  // hundredths of a percent, times t
  long long q = scaled / t;
  if ((scaled % t) * 2 >= t) ++q;
  const std::string frac = std::to_string(q % 100);
  return std::to_string(q / 100) + "." + (frac.size() == 1 ? "0" + frac : frac);
}

answer::CQAnswer make_answer(const std::string& cq, const std::string& doc, const std::string& text) {
  answer::CQAnswer a;
  a.cq_id = cq;
  a.doc_id = doc;
  a.raw_text = a.clean_text = text;
  a.answered = true;
  return a;
}

}  // namespace

TEST_CASE("classify is exact over the whole score range") {
  const std::vector<Label> expected = {Label::kWrong,   Label::kWrong, Label::kWrong, Label::kPartial,
                                       Label::kPartial, Label::kPartial, Label::kRight, Label::kRight,
                                       Label::kRight,   Label::kRight, Label::kRight};
  for (int s = 0; s <= 10; ++s) CHECK(classify(s) == expected[static_cast<std::size_t>(s)]);
  for (int s = 1; s <= 10; ++s) CHECK(static_cast<int>(classify(s - 1)) <= static_cast<int>(classify(s)));
  CHECK_THROWS_AS(classify(-1), PreconditionError);
  CHECK_THROWS_AS(classify(11), PreconditionError);
}

TEST_CASE("labels round-trip") {
  for (auto l : {Label::kWrong, Label::kPartial, Label::kRight}) CHECK(label_from_string(to_string(l)) == l);
  CHECK_THROWS_AS(label_from_string("Maybe"), ParseError);
}

TEST_CASE("verdict parsing") {
  const auto v = parse_verdict("score: 7\nExplanation: mostly matches.\nMissing the optimizer.");
  CHECK(v.score == 7);
  CHECK(v.label == Label::kRight);
  CHECK(v.explanation.find("mostly matches") != std::string::npos);
  CHECK(parse_verdict("**Score**: 4/10").score == 4);
  CHECK(parse_verdict("SCORE = 10.").label == Label::kRight);
  CHECK_THROWS_AS(parse_verdict("score: eleven"), ResponseParseError);
  CHECK_THROWS_AS(parse_verdict("score: 11"), ResponseParseError);
  CHECK_THROWS_AS(parse_verdict("The answer looks fine."), ResponseParseError);
}

TEST_CASE("verification parsing") {
  CHECK(parse_verification("Response: True"));
  CHECK_FALSE(parse_verification("Reasoning first.\nResponse: false"));
  CHECK_THROWS_AS(parse_verification("Response: maybe"), ResponseParseError);
  CHECK_THROWS_AS(parse_verification("True"), ResponseParseError);
}

TEST_CASE("judge_answer builds the prompt and checks keys") {
  FixedBackend backend("score: 10\nExplanation: identical.");
  const GroundTruth g{"CQ1", "d", "The optimizer is Adam.", Label::kRight};
  const auto v = judge_answer(backend, g, make_answer("CQ1", "d", "The optimizer is Adam."), "Which optimizer?",
                              llm::default_params());
  CHECK(v.label == Label::kRight);
  CHECK(backend.last.stage == llm::Stage::kJudgeAnswer);
  CHECK(backend.last.user_text.find("The optimizer is Adam.") != std::string::npos);
  CHECK(backend.last.user_text.find("Which optimizer?") != std::string::npos);
  CHECK_THROWS_AS(judge_answer(backend, g, make_answer("CQ2", "d", "x"), "q", llm::default_params()),
                  PreconditionError);
  CHECK_THROWS_AS(judge_answer(backend, g, make_answer("CQ1", "e", "x"), "q", llm::default_params()),
                  PreconditionError);
}

TEST_CASE("individual verification") {
  kg::KgIndividual ind{{"https://w3id.org/dlprov/DataFormat_1"}, {"https://w3id.org/dlprov/DataFormat"},
                       std::string("Audio Spectrogram"), "d"};
  CHECK(individual_strings(ind) == "Audio Spectrogram");
  FixedBackend yes("Response: True");
  CHECK(verify_individual(yes, ind, make_answer("CQ1", "d", "It uses an audio spectrogram."), llm::default_params()));
  CHECK(yes.last.stage == llm::Stage::kJudgeKg);
  CHECK(yes.last.user_text.find("Audio Spectrogram") != std::string::npos);
  FixedBackend no("Response: False");
  CHECK_FALSE(verify_individual(no, ind, make_answer("CQ1", "d", "Images only."), llm::default_params()));
  FixedBackend maybe("Response: maybe");
  CHECK_THROWS_AS(verify_individual(maybe, ind, make_answer("CQ1", "d", "x"), llm::default_params()),
                  ResponseParseError);
  ind.label.reset();
  CHECK(individual_strings(ind) == "data format");
}

TEST_CASE("ground truth file format") {
  const std::string text = "# header\nCQ1\td\tRight\tAdam.\n\nCQ2\td\tPartial\tA\twith tab\n";
  const auto g = parse_ground_truth(text);
  REQUIRE(g.size() == 2);
  CHECK(g[1].human_label == Label::kPartial);
  CHECK(g[1].text == "A\twith tab");
  CHECK(parse_ground_truth(ground_truth_text(g)).size() == 2);
  try {
    parse_ground_truth("CQ1\td\tRight\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_ground_truth("CQ1\td\tRight\tx\nCQ1\td\tWrong\ty\n"), ParseError);
  CHECK_THROWS_AS(parse_ground_truth("CQ1\td\tGood\tx\n"), ParseError);
}

TEST_CASE("disagreements on a planted fixture") {
  testing::Rng rng(42);
  std::vector<GroundTruth> ground;
  std::vector<KeyedVerdict> verdicts;
  std::set<std::size_t> planted;
  while (planted.size() < 42) planted.insert(rng() % 200);
  std::array<std::size_t, 3> human_counts{};
  for (std::size_t i = 0; i < 200; ++i) {
    const std::string cq = "CQ" + std::to_string(i % 40 + 1);
    const std::string doc = "doc" + std::to_string(i / 40);
    const int score = static_cast<int>(rng() % 11);
    const Label judged = classify(score);
    Label human = judged;
    if (planted.count(i)) human = static_cast<Label>((static_cast<int>(judged) + 1 + rng() % 2) % 3);
    ++human_counts[static_cast<std::size_t>(human)];
    ground.push_back({cq, doc, "t", human});
    verdicts.push_back({cq, doc, JudgeVerdict{score, "", judged}, ""});
  }
  const auto r = disagreement_report(ground, verdicts);
  CHECK(r.count == 42);
  CHECK(r.total == 200);
  for (std::size_t h = 0; h < 3; ++h) {
    CHECK(r.confusion[h][0] + r.confusion[h][1] + r.confusion[h][2] == human_counts[h]);
  }

  // Self-consistent labels never disagree.
  auto self = ground;
  for (std::size_t i = 0; i < self.size(); ++i) self[i].human_label = verdicts[i].verdict->label;
  CHECK(disagreement_report(self, verdicts).count == 0);

  // Unevaluated pairs leave the total.
  verdicts[0].verdict.reset();
  verdicts[0].error = "unparseable";
  const auto partial = disagreement_report(ground, verdicts);
  CHECK(partial.total == 199);
  CHECK(partial.unevaluated == 1);

  verdicts.pop_back();
  try {
    disagreement_report(ground, verdicts);
    FAIL("expected an alignment error");
  } catch (const AlignmentError& e) {
    CHECK(std::string(e.what()).find("CQ40") != std::string::npos);
  }
}

TEST_CASE("alignment percentage") {
  CHECK(alignment_percentage(142, 203).str() == "69.95");
  CHECK(alignment_percentage(0, 37).str() == "0.00");
  CHECK(alignment_percentage(9, 37).str() == "24.32");
  CHECK(alignment_percentage(1, 1).str() == "100.00");
  CHECK_THROWS_AS(alignment_percentage(5, 4), PreconditionError);
  CHECK_THROWS_AS(alignment_percentage(0, 0), PreconditionError);
  for (long long t = 1; t <= 400; ++t) {
    for (long long m = 0; m <= t; ++m) REQUIRE(alignment_percentage(m, t).str() == oracle_percent(m, t));
  }
}

TEST_CASE("document alignment cells") {
  DocumentAlignment a{"d", kg::KgStatus::kOk, 142, 203, 0};
  CHECK(a.cell() == "69.95");
  a.status = kg::KgStatus::kNoMeaningfulKg;
  CHECK(a.cell() == "x");
  DocumentAlignment empty{"d", kg::KgStatus::kOk, 0, 0, 0};
  CHECK(empty.cell() == "x");
  const auto back = document_alignment_from_json(to_json(DocumentAlignment{"e", kg::KgStatus::kOk, 3, 7, 1}));
  CHECK(back.matched == 3);
  CHECK(back.total == 7);
  CHECK(back.unevaluated == 1);
}

TEST_CASE("keyed verdicts serialize") {
  const KeyedVerdict v{"CQ1", "d", JudgeVerdict{4, "why", Label::kPartial}, ""};
  const auto back = keyed_verdict_from_json(to_json(v));
  REQUIRE(back.verdict);
  CHECK(back.verdict->score == 4);
  const KeyedVerdict u{"CQ2", "d", std::nullopt, "bad"};
  const auto j = to_json(u);
  CHECK(j.at("unevaluated") == true);
  CHECK_FALSE(keyed_verdict_from_json(j).verdict);
}
