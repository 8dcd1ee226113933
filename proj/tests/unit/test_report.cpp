#include <doctest.h>

#include "generators.hpp"
#include "kgpipe/judge.hpp"
#include "kgpipe/pipeline.hpp"
#include "kgpipe/report.hpp"

using namespace kgpipe;
namespace fs = std::filesystem;

namespace {

// Writes the minimal evaluation output the report reads.
void fake_run(const fs::path& runs, const std::string& id, const std::string& pv, const std::string& av,
              const std::vector<judge::DocumentAlignment>& docs, std::size_t disagreements, std::size_t total) {
  const fs::path dir = runs / id;
  json documents = json::array();
  std::size_t matched = 0;
  std::size_t all = 0;
  for (const auto& d : docs) {
    documents.push_back(judge::to_json(d));
    if (d.cell() != "x") {
      matched += d.matched;
      all += d.total;
    }
  }
  json report = {{"prompt_version", pv},
                 {"answer_version", av},
                 {"documents", documents},
                 {"overall", {{"matched", matched}, {"total", all}, {"cell", all ? judge::alignment_percentage(
                                                                                     static_cast<std::int64_t>(matched),
                                                                                     static_cast<std::int64_t>(all))
                                                                                     .str()
                                                                               : "x"}}},
                 {"disagreements", judge::to_json(judge::DisagreementReport{disagreements, total, 0, {}})},
                 {"answers_without_ground_truth", 0}};
  write_json_atomic(dir / "evaluation/report.json", report);
}

}  // namespace

TEST_CASE("report table layout and arithmetic") {
  testing::TempDir runs("report");
  using judge::DocumentAlignment;
  const auto ok = kg::KgStatus::kOk;
  const auto none = kg::KgStatus::kNoMeaningfulKg;
  fake_run(runs.path(), "b", "v1", "v2", {{"doc-b", ok, 9, 37, 0}, {"doc-a", none, 0, 0, 0}}, 20, 100);
  fake_run(runs.path(), "a", "v1", "v1", {{"doc-a", ok, 142, 203, 0}, {"doc-b", ok, 0, 37, 0}}, 22, 100);
  const auto t = report::build_report(runs.path(), {"b", "a"});
  REQUIRE(t.columns.size() == 2);
  CHECK(t.columns[0].run_id == "a");
  CHECK(t.columns[0].header == report::column_header("v1", "v1"));
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].label == "doc-a");
  CHECK(t.rows[0].cells == std::vector<std::string>{"69.95", "x"});
  CHECK(t.rows[1].cells == std::vector<std::string>{"0.00", "24.32"});
  CHECK(t.rows[2].label == report::kOverallRow);
  CHECK(t.rows[2].cells[0] == judge::alignment_percentage(142, 240).str());
  CHECK(t.rows[2].cells[1] == "24.32");
  CHECK(t.disagreement_count == 42);
  CHECK(t.disagreement_total == 200);
  CHECK(t.summary_line() == "42 disagreements out of 200");

  const auto csv = report::render_csv(t);
  CHECK(csv.find("doc-a,69.95,x") != std::string::npos);
  const auto md = report::render_markdown(t);
  CHECK(md.find("| doc-a | 69.95 | x |") != std::string::npos);
  CHECK(md.find("x marks a run with no meaningful KG") != std::string::npos);
  CHECK(md.find("| Document | Prompt v1 and CQ answer v1 | Prompt v1 and CQ answer v2 |") == 0);
  report::emit_report(t, runs.path());
  CHECK(read_text_file(runs.path() / "report.csv") == csv);
  CHECK(report::to_json(t).at("rows").size() == 3);
}

TEST_CASE("absent documents render as a dash") {
  testing::TempDir runs("report-dash");
  fake_run(runs.path(), "a", "v1", "v1", {{"d1", kg::KgStatus::kOk, 1, 2, 0}}, 0, 1);
  fake_run(runs.path(), "b", "v2", "v1", {{"d2", kg::KgStatus::kOk, 1, 4, 0}}, 0, 1);
  const auto t = report::build_report(runs.path(), {"a", "b"});
  CHECK(t.rows[0].cells == std::vector<std::string>{"50.00", "-"});
  CHECK(t.rows[1].cells == std::vector<std::string>{"-", "25.00"});
}

TEST_CASE("report errors") {
  testing::TempDir runs("report-err");
  fake_run(runs.path(), "a", "v1", "v1", {{"d", kg::KgStatus::kOk, 1, 2, 0}}, 0, 1);
  fake_run(runs.path(), "b", "v1", "v1", {{"d", kg::KgStatus::kOk, 1, 2, 0}}, 0, 1);
  CHECK_THROWS_AS(report::build_report(runs.path(), {"a", "b"}), Error);
  try {
    report::build_report(runs.path(), {"a", "missing1", "missing2"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("missing1") != std::string::npos);
    CHECK(std::string(e.what()).find("missing2") != std::string::npos);
  }
  CHECK_THROWS_AS(report::build_report(runs.path(), {}), Error);
}
