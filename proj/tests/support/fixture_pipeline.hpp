#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kgpipe/config.hpp"
#include "kgpipe/llm_backend.hpp"
#include "kgpipe/report.hpp"

namespace kgpipe::testing {

// Prompt/answer version combinations of the fixture run matrix.
struct Combination {
  std::string run_id;
  std::string prompt_version;
  std::string answer_version;
};

const std::vector<Combination>& fixture_combinations();

PipelineConfig fixture_config();

// Human-side inputs of the fixture run: the reviewed CQ file and one
// ground-truth file per answer version.
std::filesystem::path reviewed_cq_file();
std::filesystem::path ground_truth_file(const std::string& answer_version);

// Drives every combination through all six stages under `runs_dir`, sharing
// the upstream stages of the first run. With `write_human_inputs`, the
// review edit and ground-truth files are derived and written into the
// fixture directory first (fixture regeneration); otherwise they are read.
report::ReportTable run_fixture_matrix(const std::filesystem::path& runs_dir, llm::Backend& backend,
                                       bool write_human_inputs = false);

}  // namespace kgpipe::testing
