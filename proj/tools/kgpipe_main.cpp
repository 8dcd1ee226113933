// kgpipe: stage-by-stage driver for the CQ -> ontology -> KG pipeline.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kgpipe/config.hpp"
#include "kgpipe/error.hpp"
#include "kgpipe/llm_backend.hpp"
#include "kgpipe/pipeline.hpp"
#include "kgpipe/report.hpp"

namespace fs = std::filesystem;
using namespace kgpipe;

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitGeneric = 1,
  kExitUsage = 2,
  kExitOrdering = 3,
  kExitCheckpoint = 4,
  kExitBackend = 5,
  kExitParse = 6,
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return kExitUsage;
    case ErrorKind::kOrdering: return kExitOrdering;
    case ErrorKind::kCheckpoint: return kExitCheckpoint;
    case ErrorKind::kBackend: return kExitBackend;
    case ErrorKind::kParse: return kExitParse;
    default: return kExitGeneric;
  }
}

struct RunOptions {
  std::string runs_dir = "runs";
  std::string run_id;
  std::string config_path;
  std::optional<std::string> share_from;
  std::optional<std::string> backend_mode;
  std::optional<std::string> base_url;
  std::optional<std::string> model;
  std::optional<int> max_tokens;
  std::optional<double> temperature;
  std::optional<std::string> prompt_version;
  std::optional<std::string> answer_version;
  std::optional<std::string> corpus;
  std::optional<std::string> ground_truth;
  std::optional<std::string> fixture_dir;
  std::optional<int> concurrency;

  bool has_config_input() const {
    return !config_path.empty() || backend_mode || base_url || model || max_tokens || temperature ||
           prompt_version || answer_version || corpus || ground_truth || fixture_dir || concurrency;
  }
};

void add_run_options(CLI::App* app, RunOptions& o) {
  app->add_option("--runs-dir", o.runs_dir, "Directory holding run directories")->capture_default_str();
  app->add_option("--run", o.run_id, "Run id")->required();
  app->add_option("--config", o.config_path, "JSON config (used when the run is created)");
  app->add_option("--share-from", o.share_from, "Copy ingest/gencq/ontology artifacts from this run on creation");
  app->add_option("--backend-mode", o.backend_mode, "live, replay or record");
  app->add_option("--base-url", o.base_url, "OpenAI-compatible endpoint base URL");
  app->add_option("--model", o.model, "Model name");
  app->add_option("--max-tokens", o.max_tokens, "Maximum generated tokens");
  app->add_option("--temperature", o.temperature, "Sampling temperature");
  app->add_option("--prompt-version", o.prompt_version, "KG prompt version (v1, v2)");
  app->add_option("--answer-version", o.answer_version, "CQ answer prompt version (v1, v2)");
  app->add_option("--corpus", o.corpus, "Corpus directory");
  app->add_option("--ground-truth", o.ground_truth, "Ground-truth TSV");
  app->add_option("--fixture-dir", o.fixture_dir, "Replay/record fixture directory");
  app->add_option("--concurrency", o.concurrency, "Parallel model calls");
}

std::string absolute_string(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

PipelineConfig build_config(const RunOptions& o) {
  PipelineConfig c = o.config_path.empty() ? PipelineConfig{} : load_config(o.config_path);
  if (o.backend_mode) c.backend.mode = backend_mode_from_string(*o.backend_mode);
  if (o.base_url) c.backend.base_url = *o.base_url;
  if (o.model) c.backend.params.model_name = *o.model;
  if (o.max_tokens) c.backend.params.max_tokens = *o.max_tokens;
  if (o.temperature) c.backend.params.temperature = *o.temperature;
  if (o.prompt_version) c.prompt_version = *o.prompt_version;
  if (o.answer_version) c.answer_version = *o.answer_version;
  if (o.corpus) c.corpus_dir = absolute_string(*o.corpus);
  if (o.ground_truth) c.ground_truth = absolute_string(*o.ground_truth);
  if (o.fixture_dir) c.backend.fixture_dir = absolute_string(*o.fixture_dir);
  if (o.concurrency) c.concurrency = *o.concurrency;
  c.validate();
  return c;
}

// Opens the run, creating it on first use. The config snapshot of an
// existing run cannot change.
pipeline::RunManifest open_run(const RunOptions& o, fs::path& dir, bool may_create) {
  dir = pipeline::run_dir(o.runs_dir, o.run_id);
  if (!fs::exists(dir / pipeline::kManifestFile) && !fs::exists(dir / pipeline::kConfigFile)) {
    if (!may_create) throw PreconditionError("no run '" + o.run_id + "' under " + o.runs_dir);
    return pipeline::create_run(o.runs_dir, o.run_id, build_config(o), o.share_from);
  }
  pipeline::RunManifest m = fs::exists(dir / pipeline::kManifestFile) ? pipeline::load_manifest(dir)
                                                                      : pipeline::reconstruct_manifest(dir);
  if (o.share_from) throw ConfigError("--share-from only applies when a run is created");
  if (o.has_config_input() && to_json(build_config(o)) != m.config) {
    throw ConfigError("run '" + o.run_id + "' already exists and its config snapshot is immutable");
  }
  return m;
}

void print_manifest(const pipeline::RunManifest& m) {
  std::cout << "run " << m.run_id << " (prompt " << m.prompt_version << ", answer " << m.answer_version << ")\n";
  for (auto s : pipeline::kStages) {
    const auto& r = m.stage(s);
    std::cout << "  " << pipeline::to_string(s) << ": " << pipeline::to_string(r.status);
    if (!r.diagnostic.empty()) std::cout << " - " << r.diagnostic;
    std::cout << "\n";
  }
  if (auto next = m.next_runnable()) {
    std::cout << "next runnable stage: " << pipeline::to_string(*next) << "\n";
  } else if (!m.complete()) {
    std::cout << "waiting at a human checkpoint\n";
  } else {
    std::cout << "run complete\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competency-question driven ontology and knowledge-graph pipeline"};
  app.require_subcommand(1);

  RunOptions opts;
  std::vector<std::pair<CLI::App*, pipeline::StageName>> stage_cmds;
  for (auto s : pipeline::kStages) {
    const std::string name(pipeline::to_string(s));
    auto* cmd = app.add_subcommand(name, "Run the " + name + " stage");
    add_run_options(cmd, opts);
    stage_cmds.emplace_back(cmd, s);
  }

  std::string review_out;
  auto* review_export = app.add_subcommand("review-export", "Write the current CQs to a review file");
  add_run_options(review_export, opts);
  review_export->add_option("--out", review_out, "Copy the review file here as well");

  std::string review_in;
  auto* review_import = app.add_subcommand("review-import", "Import a reviewed CQ file");
  add_run_options(review_import, opts);
  review_import->add_option("--file", review_in, "Reviewed TSV file")->required();

  bool dry_run = false;
  auto* resume_cmd = app.add_subcommand("resume", "Rebuild the manifest from artifacts and continue");
  add_run_options(resume_cmd, opts);
  resume_cmd->add_flag("--dry-run", dry_run, "Only show the reconstructed state");

  std::string report_runs_dir = "runs";
  std::vector<std::string> report_runs;
  std::string report_out = ".";
  auto* report_cmd = app.add_subcommand("report", "Emit the cross-run alignment table");
  report_cmd->add_option("--runs-dir", report_runs_dir, "Directory holding run directories")->capture_default_str();
  report_cmd->add_option("--runs", report_runs, "Run ids")->required()->delimiter(',');
  report_cmd->add_option("--out", report_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (report_cmd->parsed()) {
      const auto table = report::build_report(report_runs_dir, report_runs);
      report::emit_report(table, report_out);
      std::cout << report::render_markdown(table);
      return kExitOk;
    }

    fs::path dir;
    bool stage_verb = false;
    for (const auto& entry : stage_cmds) stage_verb = stage_verb || entry.first->parsed();
    pipeline::RunManifest m = open_run(opts, dir, stage_verb);

    if (review_export->parsed()) {
      const fs::path path = pipeline::export_review(dir, m);
      if (!review_out.empty()) fs::copy_file(path, review_out, fs::copy_options::overwrite_existing);
      std::cout << "review file: " << (review_out.empty() ? path.string() : review_out) << "\n";
      return kExitOk;
    }
    if (review_import->parsed()) {
      m = pipeline::import_review(dir, std::move(m), review_in);
      print_manifest(m);
      return kExitOk;
    }
    if (resume_cmd->parsed()) {
      if (dry_run) {
        print_manifest(pipeline::reconstruct_manifest(dir));
        return kExitOk;
      }
      auto backend = pipeline::make_backend(pipeline::run_config(m));
      m = pipeline::resume(dir, *backend);
      print_manifest(m);
      return m.complete() ? kExitOk : kExitCheckpoint;
    }
    for (const auto& [cmd, stage] : stage_cmds) {
      if (!cmd->parsed()) continue;
      auto backend = pipeline::make_backend(pipeline::run_config(m));
      m = pipeline::run_stage(dir, std::move(m), stage, *backend);
      print_manifest(m);
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitGeneric;
  }
  return kExitGeneric;
}
