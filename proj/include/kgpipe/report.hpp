#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kgpipe/json_io.hpp"

namespace kgpipe::report {

struct ReportColumn {
  std::string run_id;
  std::string prompt_version;
  std::string answer_version;
  std::string header;  // "Prompt v1 and CQ answer v2"
};

struct ReportRow {
  std::string label;               // document id, or "Overall"
  std::vector<std::string> cells;  // one per column: percentage, "x", or "-" when absent
};

struct RunDisagreement {
  std::string run_id;
  std::size_t count = 0;
  std::size_t total = 0;
  std::size_t unevaluated = 0;
};

struct ReportTable {
  std::vector<ReportColumn> columns;
  std::vector<ReportRow> rows;  // documents sorted by id, then the overall row
  std::vector<RunDisagreement> disagreements;
  std::size_t disagreement_count = 0;
  std::size_t disagreement_total = 0;

  // "D disagreements out of T"
  std::string summary_line() const;
};

inline constexpr const char* kOverallRow = "Overall";

std::string column_header(const std::string& prompt_version, const std::string& answer_version);

// Builds the documents x combinations matrix from the evaluation reports of
// the given runs. Columns are sorted by (prompt, answer) version; two runs
// with the same combination are an error, as is any run without evaluation
// artifacts (all such runs are listed).
ReportTable build_report(const std::filesystem::path& runs_dir, const std::vector<std::string>& run_ids);

std::string render_csv(const ReportTable& table);
std::string render_markdown(const ReportTable& table);
json to_json(const ReportTable& table);

// Writes report.csv, report.md and report.json into `out_dir`.
void emit_report(const ReportTable& table, const std::filesystem::path& out_dir);

}  // namespace kgpipe::report
