#include "fixture_pipeline.hpp"

#include "generators.hpp"
#include "kgpipe/answering.hpp"
#include "kgpipe/cq.hpp"
#include "kgpipe/judge.hpp"
#include "kgpipe/pipeline.hpp"
#include "kgpipe/text_util.hpp"
#include "simulated_backend.hpp"

namespace kgpipe::testing {

namespace fs = std::filesystem;
using pipeline::StageName;

const std::vector<Combination>& fixture_combinations() {
  static const std::vector<Combination> kCombos = {
      {"p1-a1", "v1", "v1"}, {"p1-a2", "v1", "v2"}, {"p2-a1", "v2", "v1"}, {"p2-a2", "v2", "v2"}};
  return kCombos;
}

PipelineConfig fixture_config() { return load_config(fixture_path("config.json")); }

fs::path reviewed_cq_file() { return fixture_path("review/cqs.reviewed.tsv"); }

fs::path ground_truth_file(const std::string& answer_version) {
  return fixture_path("ground_truth_answer_" + answer_version + ".tsv");
}

namespace {

// The reviewer rewords one question and keeps the rest.
void write_review_edit(const fs::path& exported) {
  std::string text = read_text_file(exported);
  text::replace_all(text, "Which research question does the deep learning pipeline address?",
                    "Which research question does the deep learning pipeline in the publication address?");
  write_text_atomic(reviewed_cq_file(), text);
}

judge::Label planted_flip(judge::Label l) {
  switch (l) {
    case judge::Label::kWrong: return judge::Label::kPartial;
    case judge::Label::kPartial: return judge::Label::kRight;
    case judge::Label::kRight: return judge::Label::kPartial;
  }
  return l;
}

// Ground truth comes from the full document text; the human label grades
// the run's answer, with about one label in five deliberately set apart
// from the simulated judge.
void write_ground_truth(const fs::path& run, const std::string& answer_version) {
  const auto set = cq::cq_set_from_json(read_json_file(run / "cq/cqs.round1.json"));
  std::vector<judge::GroundTruth> records;
  for (const auto& doc : read_json_file(run / "corpus/documents.json")) {
    const std::string doc_id = doc.at("doc_id").get<std::string>();
    const std::string body = read_text_file(run / "corpus/docs" / (doc_id + ".txt"));
    std::map<std::string, answer::CQAnswer> answers;
    for (const auto& a : read_json_file(run / "answers" / (doc_id + ".json"))) {
      auto ans = answer::answer_from_json(a);
      answers[ans.cq_id] = ans;
    }
    for (const auto& q : cq::approved_questions(set)) {
      const auto best = best_sentences(body, q.text, 2);
      judge::GroundTruth g;
      g.cq_id = q.cq_id;
      g.doc_id = doc_id;
      g.text = best.empty() ? "The publication does not state this." : text::join(best, " ");
      g.human_label = judge::classify(simulated_score(g.text, answers.at(q.cq_id).clean_text));
      if (fnv1a(q.cq_id + "|" + doc_id + "|" + answer_version) % 5 == 0) g.human_label = planted_flip(g.human_label);
      records.push_back(std::move(g));
    }
  }
  write_text_atomic(ground_truth_file(answer_version), judge::ground_truth_text(records));
}

}  // namespace

report::ReportTable run_fixture_matrix(const fs::path& runs_dir, llm::Backend& backend, bool write_human_inputs) {
  const PipelineConfig base = fixture_config();
  const auto& combos = fixture_combinations();
  std::vector<std::string> run_ids;

  for (std::size_t i = 0; i < combos.size(); ++i) {
    PipelineConfig config = base;
    config.prompt_version = combos[i].prompt_version;
    config.answer_version = combos[i].answer_version;
    const auto share = i == 0 ? std::nullopt : std::optional<std::string>(combos[0].run_id);
    auto m = pipeline::create_run(runs_dir, combos[i].run_id, config, share);
    const fs::path dir = pipeline::run_dir(runs_dir, combos[i].run_id);
    if (i == 0) {
      m = pipeline::run_stage(dir, m, StageName::kIngest, backend);
      m = pipeline::run_stage(dir, m, StageName::kGenCq, backend);
      const fs::path exported = pipeline::export_review(dir, m);
      if (write_human_inputs) write_review_edit(exported);
      m = pipeline::import_review(dir, m, reviewed_cq_file());
      m = pipeline::run_stage(dir, m, StageName::kOntology, backend);
    }
    m = pipeline::run_stage(dir, m, StageName::kAnswer, backend);
    m = pipeline::run_stage(dir, m, StageName::kBuildKg, backend);
    if (write_human_inputs && config.prompt_version == "v1") write_ground_truth(dir, config.answer_version);
    fs::copy_file(ground_truth_file(config.answer_version), dir / pipeline::kGroundTruthFile,
                  fs::copy_options::overwrite_existing);
    m = pipeline::run_stage(dir, m, StageName::kEvaluate, backend);
    run_ids.push_back(combos[i].run_id);
  }
  auto table = report::build_report(runs_dir, run_ids);
  report::emit_report(table, runs_dir);
  return table;
}

}  // namespace kgpipe::testing
