#include "kgpipe/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <regex>
#include <set>
#include <thread>

#include "kgpipe/answering.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/cq.hpp"
#include "kgpipe/judge.hpp"
#include "kgpipe/kg.hpp"
#include "kgpipe/ontology.hpp"
#include "kgpipe/prompts.hpp"
#include "kgpipe/rdf.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(StageName stage) {
  switch (stage) {
    case StageName::kIngest: return "ingest";
    case StageName::kGenCq: return "gencq";
    case StageName::kOntology: return "ontology";
    case StageName::kAnswer: return "answer";
    case StageName::kBuildKg: return "buildkg";
    case StageName::kEvaluate: return "evaluate";
  }
  return "ingest";
}

StageName stage_from_string(std::string_view s) {
  for (StageName st : kStages) {
    if (to_string(st) == s) return st;
  }
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

std::string_view to_string(StageStatus status) {
  switch (status) {
    case StageStatus::kPending: return "pending";
    case StageStatus::kDone: return "done";
    case StageStatus::kFailed: return "failed";
    case StageStatus::kAwaitingReview: return "awaiting_review";
  }
  return "pending";
}

StageStatus stage_status_from_string(std::string_view s) {
  if (s == "pending") return StageStatus::kPending;
  if (s == "done") return StageStatus::kDone;
  if (s == "failed") return StageStatus::kFailed;
  if (s == "awaiting_review") return StageStatus::kAwaitingReview;
  throw ParseError("unknown stage status '" + std::string(s) + "'");
}

const StageRecord& RunManifest::stage(StageName s) const {
  static const StageRecord kEmpty;
  const auto it = stages.find(s);
  return it == stages.end() ? kEmpty : it->second;
}

StageRecord& RunManifest::stage(StageName s) { return stages[s]; }

std::optional<StageName> RunManifest::next_runnable() const {
  for (StageName s : kStages) {
    const StageStatus st = stage(s).status;
    if (st == StageStatus::kDone) continue;
    if (st == StageStatus::kAwaitingReview) return std::nullopt;
    return s;
  }
  return std::nullopt;
}

bool RunManifest::complete() const {
  for (StageName s : kStages) {
    if (stage(s).status != StageStatus::kDone) return false;
  }
  return true;
}

json to_json(const RunManifest& m) {
  json stages = json::object();
  for (StageName s : kStages) {
    const StageRecord& r = m.stage(s);
    stages[std::string(to_string(s))] = {{"status", std::string(to_string(r.status))},
                                         {"artifacts", r.artifacts},
                                         {"diagnostic", r.diagnostic},
                                         {"updated_at", r.updated_at}};
  }
  return {{"run_id", m.run_id},
          {"created_at", m.created_at},
          {"config", m.config},
          {"prompt_version", m.prompt_version},
          {"answer_version", m.answer_version},
          {"stages", std::move(stages)}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.config = j.at("config");
    m.prompt_version = j.at("prompt_version").get<std::string>();
    m.answer_version = j.at("answer_version").get<std::string>();
    for (StageName s : kStages) {
      const json& r = j.at("stages").at(std::string(to_string(s)));
      StageRecord rec;
      rec.status = stage_status_from_string(r.at("status").get<std::string>());
      rec.artifacts = r.at("artifacts").get<std::vector<std::string>>();
      rec.diagnostic = r.at("diagnostic").get<std::string>();
      rec.updated_at = r.at("updated_at").get<std::string>();
      m.stages[s] = std::move(rec);
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

namespace {

std::string now_utc() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Top-level directories owned by each stage.
std::vector<std::string> stage_dirs(StageName s) {
  switch (s) {
    case StageName::kIngest: return {"corpus"};
    case StageName::kGenCq: return {"cq", "review"};
    case StageName::kOntology: return {"ontology"};
    case StageName::kAnswer: return {"answers"};
    case StageName::kBuildKg: return {"kg"};
    case StageName::kEvaluate: return {"evaluation"};
  }
  return {};
}

std::size_t stage_index(StageName s) { return static_cast<std::size_t>(s); }

void validate_run_id(const std::string& id) {
  static const std::regex kId(R"([A-Za-z0-9][A-Za-z0-9._-]*)");
  if (!std::regex_match(id, kId)) throw ConfigError("invalid run id '" + id + "'");
}

// --- artifact access -------------------------------------------------------

struct DocRecord {
  std::string doc_id;
  std::string title;
  std::string source_name;
  std::size_t token_count = 0;
  std::string sha256;
};

std::vector<DocRecord> load_doc_records(const fs::path& dir) {
  std::vector<DocRecord> out;
  for (const auto& j : read_json_file(dir / "corpus/documents.json")) {
    out.push_back({j.at("doc_id").get<std::string>(), j.at("title").get<std::string>(),
                   j.at("source").get<std::string>(), j.at("token_count").get<std::size_t>(),
                   j.at("sha256").get<std::string>()});
  }
  return out;
}

std::vector<corpus::Document> load_documents(const fs::path& dir) {
  std::vector<corpus::Document> docs;
  for (const auto& r : load_doc_records(dir)) {
    docs.push_back({r.doc_id, r.title, read_text_file(dir / "corpus/docs" / (r.doc_id + ".txt")), r.source_name});
  }
  return docs;
}

std::vector<std::string> doc_ids(const fs::path& dir) {
  std::vector<std::string> ids;
  for (const auto& r : load_doc_records(dir)) ids.push_back(r.doc_id);
  return ids;
}

// Highest CQ round present: cq/cqs.round<N>.json.
std::optional<int> latest_cq_round(const fs::path& dir) {
  static const std::regex kRound(R"(cqs\.round(\d+)\.json)");
  std::optional<int> best;
  if (!fs::is_directory(dir / "cq")) return best;
  for (const auto& e : fs::directory_iterator(dir / "cq")) {
    std::smatch m;
    const std::string name = e.path().filename().string();
    if (std::regex_match(name, m, kRound)) best = std::max(best.value_or(0), std::stoi(m[1].str()));
  }
  return best;
}

std::string cq_round_file(int round) { return "cq/cqs.round" + std::to_string(round) + ".json"; }

cq::CqSet load_current_cqs(const fs::path& dir) {
  const auto round = latest_cq_round(dir);
  if (!round) throw OrderingError("no competency questions have been generated");
  try {
    return cq::cq_set_from_json(read_json_file(dir / cq_round_file(*round)));
  } catch (const json::exception& e) {
    throw ParseError("malformed " + cq_round_file(*round) + ": " + e.what());
  }
}

rdf::RdfGraph load_foundation(const PipelineConfig& config) {
  if (config.foundation_path.empty()) return onto::default_foundation();
  return rdf::parse_turtle(read_text_file(config.foundation_path));
}

onto::OntologySpec load_run_ontology(const fs::path& dir, const PipelineConfig& config) {
  return onto::load_ontology(read_text_file(dir / "ontology/ontology.ttl"), config.base_iri, config.base_prefix);
}

std::vector<answer::CQAnswer> load_answers(const fs::path& dir, const std::string& doc_id) {
  std::vector<answer::CQAnswer> out;
  for (const auto& j : read_json_file(dir / "answers" / (doc_id + ".json"))) out.push_back(answer::answer_from_json(j));
  return out;
}

fs::path ground_truth_path(const fs::path& dir, const PipelineConfig& config) {
  if (!config.ground_truth.empty()) return config.ground_truth;
  return dir / kGroundTruthFile;
}

llm::GenerationParams params_of(const PipelineConfig& config) { return config.backend.params; }

// --- stages ----------------------------------------------------------------

std::vector<std::string> do_ingest(const fs::path& dir, const PipelineConfig& config) {
  if (config.corpus_dir.empty()) throw ConfigError("corpus_dir is not configured");
  const auto docs = corpus::ingest_corpus(config.corpus_dir);
  if (docs.empty()) throw PreconditionError("corpus directory '" + config.corpus_dir + "' has no .txt or .md files");
  json records = json::array();
  std::vector<corpus::Chunk> chunks;
  std::vector<std::string> artifacts = {"corpus/documents.json", "corpus/chunks.json"};
  for (const auto& d : docs) {
    const std::string rel = "corpus/docs/" + d.doc_id + ".txt";
    write_text_atomic(dir / rel, d.body);
    artifacts.push_back(rel);
    records.push_back({{"doc_id", d.doc_id},
                       {"title", d.title},
                       {"source", fs::path(d.source_path).filename().string()},
                       {"token_count", corpus::count_tokens(d.body)},
                       {"sha256", sha256_hex(d.body)}});
    auto c = corpus::chunk_document(d, config.chunk_size, config.chunk_overlap);
    chunks.insert(chunks.end(), c.begin(), c.end());
  }
  const corpus::RetrievalIndex index(chunks);
  write_json_atomic(dir / "corpus/documents.json", records);
  write_json_atomic(dir / "corpus/chunks.json", {{"chunks", corpus::chunk_table(chunks)},
                                                 {"chunk_size", config.chunk_size},
                                                 {"overlap", config.chunk_overlap},
                                                 {"statistics", index.statistics()}});
  return artifacts;
}

std::vector<std::string> do_gencq(const fs::path& dir, const PipelineConfig& config, llm::Backend& backend) {
  const std::string domain = config.cq_domain_prompt.empty() ? prompts::default_domain_prompt() : config.cq_domain_prompt;
  cq::CqSet set;
  try {
    set = cq::generate_cqs(backend, domain, params_of(config));
  } catch (const ResponseParseError& e) {
    write_text_atomic(dir / "cq/raw_response.txt", e.raw());
    throw;
  }
  write_json_atomic(dir / cq_round_file(0), cq::to_json(set));
  write_text_atomic(dir / kReviewFile, cq::review_file_text(set));
  return {cq_round_file(0), kReviewFile};
}

std::vector<std::string> do_ontology(const fs::path& dir, const PipelineConfig& config, llm::Backend& backend) {
  const cq::CqSet set = load_current_cqs(dir);
  cq::require_reviewed(set);
  const auto params = params_of(config);
  onto::ConceptSet concepts;
  try {
    concepts = onto::extract_concept_set(backend, set, params);
  } catch (const ResponseParseError& e) {
    write_text_atomic(dir / "ontology/concepts_raw.txt", e.raw());
    throw;
  }
  write_json_atomic(dir / "ontology/concepts.json", onto::to_json(concepts));
  const rdf::RdfGraph foundation = load_foundation(config);
  const std::string draft = onto::draft_ontology(backend, concepts, config.base_iri, foundation, params);
  write_text_atomic(dir / "ontology/draft.txt", draft);
  const onto::OntologySpec spec =
      onto::normalize_ontology(draft, concepts, config.base_iri, foundation, config.base_prefix);
  write_text_atomic(dir / "ontology/ontology.ttl", rdf::serialize_turtle(spec.graph));
  write_json_atomic(dir / "ontology/ontology.json", onto::sidecar(spec));
  return {"ontology/concepts.json", "ontology/draft.txt", "ontology/ontology.ttl", "ontology/ontology.json"};
}

std::vector<std::string> do_answer(const fs::path& dir, const PipelineConfig& config, llm::Backend& backend,
                                   std::string& diagnostic) {
  const auto docs = load_documents(dir);
  const auto index = corpus::index_corpus(docs, config.chunk_size, config.chunk_overlap);
  const auto questions = cq::approved_questions(load_current_cqs(dir));
  if (questions.empty()) throw PreconditionError("no approved competency questions");
  const answer::DontKnowDetector detector(config.dont_know_patterns.empty() ? answer::default_dont_know_patterns()
                                                                            : config.dont_know_patterns);
  answer::AnswerSettings settings{config.answer_version, static_cast<std::size_t>(config.retrieval_k),
                                  params_of(config)};

  const std::size_t per_doc = questions.size();
  std::vector<answer::CQAnswer> results(docs.size() * per_doc);
  parallel_for(results.size(), config.concurrency, [&](std::size_t i) {
    results[i] = answer::answer_cq(backend, index, questions[i % per_doc], docs[i / per_doc].doc_id, settings, detector);
  });

  std::vector<std::string> artifacts;
  std::size_t failed = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    json arr = json::array();
    for (std::size_t q = 0; q < per_doc; ++q) {
      const auto& a = results[d * per_doc + q];
      if (!a.error.empty()) ++failed;
      arr.push_back(answer::to_json(a));
    }
    const std::string rel = "answers/" + docs[d].doc_id + ".json";
    write_json_atomic(dir / rel, arr);
    artifacts.push_back(rel);
  }
  if (failed > 0) diagnostic = std::to_string(failed) + " of " + std::to_string(results.size()) + " answers failed";
  return artifacts;
}

std::vector<std::string> do_buildkg(const fs::path& dir, const PipelineConfig& config, llm::Backend& backend) {
  const auto ids = doc_ids(dir);
  const auto questions = cq::approved_questions(load_current_cqs(dir));
  const auto ontology = load_run_ontology(dir, config);
  const kg::KgSettings settings{config.prompt_version, params_of(config)};

  std::vector<kg::KgBuildResult> results(ids.size());
  parallel_for(ids.size(), config.concurrency, [&](std::size_t i) {
    const auto answers = load_answers(dir, ids[i]);
    const bool any_usable =
        std::any_of(answers.begin(), answers.end(), [](const answer::CQAnswer& a) { return a.error.empty(); });
    if (!any_usable) {
      results[i].status = kg::KgStatus::kNoMeaningfulKg;
      results[i].diagnostic = "no usable CQ answers for this document";
      return;
    }
    results[i] = kg::build_kg(backend, questions, answers, ontology, ids[i], settings);
  });

  std::vector<std::string> artifacts;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::string base = "kg/" + ids[i] + "/";
    const auto& r = results[i];
    write_text_atomic(dir / (base + "kg_raw.txt"), r.raw_text);
    write_text_atomic(dir / (base + "kg.ttl"), rdf::serialize_turtle(r.graph));
    write_json_atomic(dir / (base + "result.json"), kg::result_summary(r));
    json validation = json::object();
    json links = json::array();
    if (r.status == kg::KgStatus::kOk) {
      validation = kg::to_json(kg::validate_kg(r, ontology));
      links = kg::to_json(kg::link_individuals(r, questions));
    }
    write_json_atomic(dir / (base + "validation.json"), validation);
    write_json_atomic(dir / (base + "links.json"), links);
    for (const char* f : {"kg_raw.txt", "kg.ttl", "result.json", "validation.json", "links.json"}) {
      artifacts.push_back(base + f);
    }
  }
  return artifacts;
}

struct IndividualCheck {
  std::string doc_id;
  kg::KgIndividual ind;
  std::string individual;
  std::string strings;
  std::vector<json> checks;  // {cq_id, verdict | error}
  std::string outcome;       // matched | unmatched | unlinked | unevaluated | excluded
};

std::vector<std::string> do_evaluate(const fs::path& dir, const PipelineConfig& config, llm::Backend& backend) {
  const fs::path gt_path = ground_truth_path(dir, config);
  if (!fs::exists(gt_path)) {
    throw CheckpointError("evaluation needs a human ground-truth file at " + gt_path.string());
  }
  const auto ground = judge::load_ground_truth(gt_path);
  const auto ids = doc_ids(dir);
  const auto questions = cq::approved_questions(load_current_cqs(dir));
  std::map<std::string, std::string> question_text;
  for (const auto& q : questions) question_text[q.cq_id] = q.text;
  const auto params = params_of(config);

  std::map<std::pair<std::string, std::string>, answer::CQAnswer> answers;
  for (const auto& id : ids) {
    for (auto& a : load_answers(dir, id)) answers[{a.cq_id, a.doc_id}] = std::move(a);
  }

  std::vector<std::string> missing;
  for (const auto& g : ground) {
    if (!answers.count({g.cq_id, g.doc_id})) missing.push_back("(" + g.cq_id + ", " + g.doc_id + ")");
  }
  if (!missing.empty()) {
    throw judge::AlignmentError("ground truth references pairs with no answer: " + text::join(missing, " "));
  }

  // Answer judging.
  std::vector<judge::KeyedVerdict> verdicts(ground.size());
  parallel_for(ground.size(), config.concurrency, [&](std::size_t i) {
    const auto& g = ground[i];
    auto& v = verdicts[i];
    v.cq_id = g.cq_id;
    v.doc_id = g.doc_id;
    try {
      v.verdict = judge::judge_answer(backend, g, answers.at({g.cq_id, g.doc_id}), question_text[g.cq_id], params);
    } catch (const ResponseParseError& e) {
      v.error = e.what();
    }
  });
  const auto disagreements = judge::disagreement_report(ground, verdicts);

  // KG individual verification.
  std::vector<judge::DocumentAlignment> alignments(ids.size());
  std::vector<std::vector<IndividualCheck>> checks(ids.size());
  std::vector<std::pair<std::size_t, std::size_t>> work;  // (doc, individual)
  for (std::size_t d = 0; d < ids.size(); ++d) {
    const fs::path base = dir / "kg" / ids[d];
    const json summary = read_json_file(base / "result.json");
    alignments[d].doc_id = ids[d];
    alignments[d].status =
        summary.at("status").get<std::string>() == "ok" ? kg::KgStatus::kOk : kg::KgStatus::kNoMeaningfulKg;
    if (alignments[d].status != kg::KgStatus::kOk) continue;
    const auto links = kg::links_from_json(read_json_file(base / "links.json"));
    std::map<std::string, std::vector<std::string>> linked;
    for (const auto& l : links) linked[l.individual_iri] = l.cq_ids;
    for (const auto& ij : summary.at("individuals")) {
      const auto ind = kg::individual_from_json(ij);
      IndividualCheck c;
      c.doc_id = ids[d];
      c.ind = ind;
      c.individual = ind.iri.value;
      c.strings = judge::individual_strings(ind);
      for (const auto& cq_id : linked[ind.iri.value]) c.checks.push_back({{"cq_id", cq_id}});
      checks[d].push_back(std::move(c));
      work.emplace_back(d, checks[d].size() - 1);
    }
  }
  parallel_for(work.size(), config.concurrency, [&](std::size_t w) {
    auto& c = checks[work[w].first][work[w].second];
    for (auto& check : c.checks) {
      const std::string cq_id = check.at("cq_id").get<std::string>();
      const auto it = answers.find({cq_id, c.doc_id});
      if (it == answers.end() || !it->second.error.empty()) {
        check["error"] = "no answer available";
        continue;
      }
      try {
        check["verdict"] = judge::verify_individual(backend, c.ind, it->second, params);
      } catch (const ResponseParseError& e) {
        check["error"] = e.what();
      }
    }
  });
  json kg_checks = json::array();
  for (std::size_t d = 0; d < ids.size(); ++d) {
    auto& a = alignments[d];
    for (auto& c : checks[d]) {
      bool any_true = false;
      bool any_evaluated = false;
      for (const auto& check : c.checks) {
        if (check.contains("verdict")) {
          any_evaluated = true;
          any_true = any_true || check.at("verdict").get<bool>();
        }
      }
      if (c.checks.empty()) {
        c.outcome = config.exclude_unlinked_individuals ? "excluded" : "unlinked";
      } else if (any_true) {
        c.outcome = "matched";
      } else if (any_evaluated) {
        c.outcome = "unmatched";
      } else {
        c.outcome = "unevaluated";
      }
      if (c.outcome == "matched") ++a.matched;
      if (c.outcome == "matched" || c.outcome == "unmatched" || c.outcome == "unlinked") ++a.total;
      if (c.outcome == "unevaluated") ++a.unevaluated;
      kg_checks.push_back({{"doc_id", c.doc_id},
                           {"individual", c.individual},
                           {"strings", c.strings},
                           {"checks", c.checks},
                           {"outcome", c.outcome}});
    }
  }

  json verdict_json = json::array();
  for (const auto& v : verdicts) verdict_json.push_back(judge::to_json(v));
  json docs = json::array();
  std::size_t matched = 0;
  std::size_t total = 0;
  for (const auto& a : alignments) {
    docs.push_back(judge::to_json(a));
    if (a.cell() != "x") {
      matched += a.matched;
      total += a.total;
    }
  }
  json overall = {{"matched", matched}, {"total", total}};
  overall["cell"] = total == 0 ? "x" : judge::alignment_percentage(static_cast<std::int64_t>(matched),
                                                                   static_cast<std::int64_t>(total)).str();

  std::size_t unjudged = 0;
  std::set<std::pair<std::string, std::string>> gt_keys;
  for (const auto& g : ground) gt_keys.insert({g.cq_id, g.doc_id});
  for (const auto& [key, _] : answers) unjudged += gt_keys.count(key) ? 0 : 1;

  write_json_atomic(dir / "evaluation/verdicts.json", verdict_json);
  write_json_atomic(dir / "evaluation/kg_verification.json", kg_checks);
  write_json_atomic(dir / "evaluation/disagreements.json", judge::to_json(disagreements));
  write_json_atomic(dir / "evaluation/report.json", {{"prompt_version", config.prompt_version},
                                                     {"answer_version", config.answer_version},
                                                     {"documents", docs},
                                                     {"overall", overall},
                                                     {"disagreements", judge::to_json(disagreements)},
                                                     {"answers_without_ground_truth", unjudged}});
  return {"evaluation/verdicts.json", "evaluation/kg_verification.json", "evaluation/disagreements.json",
          "evaluation/report.json"};
}

// --- reconstruction --------------------------------------------------------

bool all_exist(const fs::path& dir, const std::vector<std::string>& rel) {
  return std::all_of(rel.begin(), rel.end(), [&](const std::string& r) { return fs::is_regular_file(dir / r); });
}

// Artifacts that prove a stage finished, or nullopt when it did not.
std::optional<std::vector<std::string>> finished_artifacts(const fs::path& dir, StageName s) {
  try {
    switch (s) {
      case StageName::kIngest: {
        std::vector<std::string> rel = {"corpus/documents.json", "corpus/chunks.json"};
        if (!all_exist(dir, rel)) return std::nullopt;
        for (const auto& id : doc_ids(dir)) rel.push_back("corpus/docs/" + id + ".txt");
        if (!all_exist(dir, rel)) return std::nullopt;
        return rel;
      }
      case StageName::kGenCq: {
        const auto round = latest_cq_round(dir);
        if (!round || *round < 1) return std::nullopt;
        std::vector<std::string> rel;
        for (int r = 0; r <= *round; ++r) {
          if (fs::is_regular_file(dir / cq_round_file(r))) rel.push_back(cq_round_file(r));
        }
        for (const char* f : {kReviewFile, "review/cqs.reviewed.tsv"}) {
          if (fs::is_regular_file(dir / f)) rel.push_back(f);
        }
        return rel;
      }
      case StageName::kOntology: {
        std::vector<std::string> rel = {"ontology/concepts.json", "ontology/draft.txt", "ontology/ontology.ttl",
                                        "ontology/ontology.json"};
        if (!all_exist(dir, rel)) return std::nullopt;
        return rel;
      }
      case StageName::kAnswer: {
        std::vector<std::string> rel;
        for (const auto& id : doc_ids(dir)) rel.push_back("answers/" + id + ".json");
        if (!all_exist(dir, rel)) return std::nullopt;
        return rel;
      }
      case StageName::kBuildKg: {
        std::vector<std::string> rel;
        for (const auto& id : doc_ids(dir)) {
          for (const char* f : {"kg_raw.txt", "kg.ttl", "result.json", "validation.json", "links.json"}) {
            rel.push_back("kg/" + id + "/" + f);
          }
        }
        if (!all_exist(dir, rel)) return std::nullopt;
        return rel;
      }
      case StageName::kEvaluate: {
        std::vector<std::string> rel = {"evaluation/verdicts.json", "evaluation/kg_verification.json",
                                        "evaluation/disagreements.json", "evaluation/report.json"};
        if (!all_exist(dir, rel)) return std::nullopt;
        return rel;
      }
    }
  } catch (const Error&) {
    return std::nullopt;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return std::nullopt;
}

void discard_later_stages(const fs::path& dir, RunManifest& m, StageName s) {
  for (std::size_t i = stage_index(s) + 1; i < kStages.size(); ++i) {
    const StageName later = kStages[i];
    for (const auto& d : stage_dirs(later)) fs::remove_all(dir / d);
    StageRecord& r = m.stage(later);
    if (r.status != StageStatus::kPending || !r.artifacts.empty() || !r.diagnostic.empty()) {
      r = StageRecord{};
      r.updated_at = now_utc();
    }
  }
}

// OrderingError / CheckpointError when `s` may not run yet.
void check_order(const RunManifest& m, StageName s) {
  for (std::size_t i = 0; i < stage_index(s); ++i) {
    const StageName prior = kStages[i];
    const StageStatus st = m.stage(prior).status;
    if (st == StageStatus::kDone) continue;
    if (st == StageStatus::kAwaitingReview) {
      throw CheckpointError("stage '" + std::string(to_string(s)) + "' is blocked: '" +
                            std::string(to_string(prior)) + "' is awaiting review");
    }
    throw OrderingError("stage '" + std::string(to_string(s)) + "' requires '" + std::string(to_string(prior)) +
                        "' to be done (it is " + std::string(to_string(st)) + ")");
  }
}

}  // namespace

fs::path run_dir(const fs::path& runs_dir, const std::string& run_id) {
  validate_run_id(run_id);
  return runs_dir / run_id;
}

RunManifest create_run(const fs::path& runs_dir, const std::string& run_id, const PipelineConfig& config,
                       const std::optional<std::string>& share_from) {
  config.validate();
  const fs::path dir = run_dir(runs_dir, run_id);
  if (fs::exists(dir / kManifestFile)) throw ConfigError("run '" + run_id + "' already exists");
  fs::create_directories(dir);

  RunManifest m;
  m.run_id = run_id;
  m.created_at = now_utc();
  m.config = to_json(config);
  m.prompt_version = config.prompt_version;
  m.answer_version = config.answer_version;
  for (StageName s : kStages) m.stage(s).updated_at = m.created_at;
  write_json_atomic(dir / kConfigFile, m.config);

  if (share_from) {
    const fs::path src = run_dir(runs_dir, *share_from);
    const RunManifest other = load_manifest(src);
    for (StageName s : {StageName::kIngest, StageName::kGenCq, StageName::kOntology}) {
      if (other.stage(s).status != StageStatus::kDone) {
        throw OrderingError("cannot share from run '" + *share_from + "': stage '" + std::string(to_string(s)) +
                            "' is not done");
      }
      for (const auto& d : stage_dirs(s)) {
        if (fs::exists(src / d)) fs::copy(src / d, dir / d, fs::copy_options::recursive);
      }
      StageRecord& r = m.stage(s);
      r.status = StageStatus::kDone;
      r.artifacts = other.stage(s).artifacts;
      r.diagnostic = "shared from run " + *share_from;
    }
  }
  save_manifest(dir, m);
  return m;
}

RunManifest load_manifest(const fs::path& dir) {
  const fs::path path = dir / kManifestFile;
  if (!fs::exists(path)) throw IoError("no run manifest at " + path.string());
  try {
    return manifest_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError("corrupt manifest " + path.string() + ": " + e.what());
  }
}

void save_manifest(const fs::path& dir, const RunManifest& m) { write_json_atomic(dir / kManifestFile, to_json(m)); }

PipelineConfig run_config(const RunManifest& m) { return config_from_json(m.config); }

std::shared_ptr<llm::Backend> make_backend(const PipelineConfig& config) {
  const auto& b = config.backend;
  auto live = [&]() -> std::shared_ptr<llm::Backend> {
    std::optional<std::string> key;
    if (const char* v = std::getenv(b.api_key_env.c_str()); v != nullptr && *v != '\0') key = v;
    return std::make_shared<llm::OpenAiCompatibleBackend>(
        b.base_url, key, llm::make_http_transport(std::chrono::seconds(b.timeout_seconds)));
  };
  switch (b.mode) {
    case BackendMode::kLive: return live();
    case BackendMode::kReplay:
      return std::make_shared<llm::ReplayBackend>(std::make_shared<llm::ReplayStore>(b.fixture_dir));
    case BackendMode::kRecord:
      return std::make_shared<llm::RecordingBackend>(live(), std::make_shared<llm::ReplayStore>(b.fixture_dir));
  }
  throw ConfigError("unsupported backend mode");
}

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RunManifest run_stage(const fs::path& dir, RunManifest m, StageName stage, llm::Backend& backend) {
  check_order(m, stage);
  const PipelineConfig config = run_config(m);
  StageRecord& rec = m.stage(stage);

  if (stage == StageName::kEvaluate && !fs::exists(ground_truth_path(dir, config))) {
    const std::string msg =
        "evaluation needs a human ground-truth file at " + ground_truth_path(dir, config).string();
    if (rec.status != StageStatus::kAwaitingReview || rec.diagnostic != msg) {
      rec = StageRecord{StageStatus::kAwaitingReview, {}, msg, now_utc()};
      save_manifest(dir, m);
    }
    throw CheckpointError(msg);
  }

  discard_later_stages(dir, m, stage);
  for (const auto& d : stage_dirs(stage)) fs::remove_all(dir / d);
  rec = StageRecord{};
  try {
    std::string diagnostic;
    std::vector<std::string> artifacts;
    switch (stage) {
      case StageName::kIngest: artifacts = do_ingest(dir, config); break;
      case StageName::kGenCq: artifacts = do_gencq(dir, config, backend); break;
      case StageName::kOntology: artifacts = do_ontology(dir, config, backend); break;
      case StageName::kAnswer: artifacts = do_answer(dir, config, backend, diagnostic); break;
      case StageName::kBuildKg: artifacts = do_buildkg(dir, config, backend); break;
      case StageName::kEvaluate: artifacts = do_evaluate(dir, config, backend); break;
    }
    rec.status = stage == StageName::kGenCq ? StageStatus::kAwaitingReview : StageStatus::kDone;
    rec.artifacts = std::move(artifacts);
    rec.diagnostic = stage == StageName::kGenCq ? "review " + std::string(kReviewFile) + " and import it" : diagnostic;
    rec.updated_at = now_utc();
    save_manifest(dir, m);
  } catch (const std::exception& e) {
    rec.status = StageStatus::kFailed;
    rec.artifacts.clear();
    rec.diagnostic = e.what();
    rec.updated_at = now_utc();
    save_manifest(dir, m);
    throw;
  }
  return m;
}

fs::path export_review(const fs::path& dir, const RunManifest& m) {
  check_order(m, StageName::kGenCq);
  const cq::CqSet set = load_current_cqs(dir);
  cq::export_for_review(set, dir / kReviewFile);
  return dir / kReviewFile;
}

RunManifest import_review(const fs::path& dir, RunManifest m, const fs::path& reviewed) {
  const StageStatus st = m.stage(StageName::kGenCq).status;
  if (st != StageStatus::kAwaitingReview && st != StageStatus::kDone) {
    throw OrderingError("nothing to review: gencq is " + std::string(to_string(st)));
  }
  if (!fs::is_regular_file(reviewed)) throw IoError("review file not found: " + reviewed.string());
  const cq::CqSet current = load_current_cqs(dir);
  const std::string content = read_text_file(reviewed);
  const cq::CqSet next = cq::import_reviewed_text(content, current);

  discard_later_stages(dir, m, StageName::kGenCq);
  const std::string rel = cq_round_file(next.review_round);
  write_json_atomic(dir / rel, cq::to_json(next));
  write_text_atomic(dir / "review/cqs.reviewed.tsv", content);
  StageRecord& rec = m.stage(StageName::kGenCq);
  rec.status = StageStatus::kDone;
  rec.artifacts = *finished_artifacts(dir, StageName::kGenCq);
  rec.diagnostic = "review round " + std::to_string(next.review_round) + " imported";
  rec.updated_at = now_utc();
  save_manifest(dir, m);
  return m;
}

RunManifest reconstruct_manifest(const fs::path& dir) {
  RunManifest m;
  const fs::path manifest_path = dir / kManifestFile;
  if (fs::exists(manifest_path)) {
    m = load_manifest(dir);
  } else {
    if (!fs::exists(dir / kConfigFile)) throw IoError("no run at " + dir.string());
    m.run_id = dir.filename().string();
    m.created_at = now_utc();
    m.config = read_json_file(dir / kConfigFile);
    const PipelineConfig c = config_from_json(m.config);
    m.prompt_version = c.prompt_version;
    m.answer_version = c.answer_version;
  }

  bool blocked = false;
  for (StageName s : kStages) {
    StageRecord& rec = m.stage(s);
    const StageRecord before = rec;
    StageStatus status = StageStatus::kPending;
    std::vector<std::string> artifacts;
    if (!blocked) {
      if (auto found = finished_artifacts(dir, s)) {
        status = StageStatus::kDone;
        artifacts = std::move(*found);
      } else if (s == StageName::kGenCq && latest_cq_round(dir).value_or(-1) == 0) {
        status = StageStatus::kAwaitingReview;
        artifacts = {cq_round_file(0)};
        if (fs::is_regular_file(dir / kReviewFile)) artifacts.push_back(kReviewFile);
      } else if (before.status == StageStatus::kFailed) {
        status = before.status;
      } else if (before.status == StageStatus::kAwaitingReview && s == StageName::kEvaluate &&
                 !fs::exists(ground_truth_path(dir, config_from_json(m.config)))) {
        status = before.status;
      }
      blocked = status != StageStatus::kDone;
    }
    if (status != before.status || artifacts != before.artifacts) {
      rec.status = status;
      rec.artifacts = std::move(artifacts);
      if (status != before.status) rec.diagnostic.clear();
      rec.updated_at = now_utc();
    }
  }
  return m;
}

RunManifest run_all(const fs::path& dir, RunManifest m, llm::Backend& backend) {
  while (auto next = m.next_runnable()) {
    try {
      m = run_stage(dir, std::move(m), *next, backend);
    } catch (const CheckpointError&) {
      return load_manifest(dir);
    }
  }
  return m;
}

RunManifest resume(const fs::path& dir, llm::Backend& backend) {
  RunManifest m = reconstruct_manifest(dir);
  save_manifest(dir, m);
  return run_all(dir, std::move(m), backend);
}

}  // namespace kgpipe::pipeline
