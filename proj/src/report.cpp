#include "kgpipe/report.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kgpipe/error.hpp"
#include "kgpipe/judge.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::report {

namespace fs = std::filesystem;

std::string ReportTable::summary_line() const {
  return std::to_string(disagreement_count) + " disagreements out of " + std::to_string(disagreement_total);
}

std::string column_header(const std::string& prompt_version, const std::string& answer_version) {
  return "Prompt " + prompt_version + " and CQ answer " + answer_version;
}

namespace {

struct RunData {
  ReportColumn column;
  std::map<std::string, judge::DocumentAlignment> docs;
  RunDisagreement disagreement;
};

}  // namespace

ReportTable build_report(const fs::path& runs_dir, const std::vector<std::string>& run_ids) {
  if (run_ids.empty()) throw PreconditionError("report needs at least one run");
  std::vector<std::string> missing;
  std::vector<RunData> runs;
  for (const auto& id : run_ids) {
    const fs::path path = runs_dir / id / "evaluation/report.json";
    if (!fs::is_regular_file(path)) {
      missing.push_back(id);
      continue;
    }
    const json j = read_json_file(path);
    RunData r;
    try {
      r.column.run_id = id;
      r.column.prompt_version = j.at("prompt_version").get<std::string>();
      r.column.answer_version = j.at("answer_version").get<std::string>();
      r.column.header = column_header(r.column.prompt_version, r.column.answer_version);
      for (const auto& d : j.at("documents")) {
        auto a = judge::document_alignment_from_json(d);
        r.docs[a.doc_id] = a;
      }
      const json& dis = j.at("disagreements");
      r.disagreement = {id, dis.at("disagreements").get<std::size_t>(), dis.at("total").get<std::size_t>(),
                        dis.at("unevaluated").get<std::size_t>()};
    } catch (const json::exception& e) {
      throw ParseError("malformed evaluation report " + path.string() + ": " + e.what());
    }
    runs.push_back(std::move(r));
  }
  if (!missing.empty()) {
    throw PreconditionError("runs without evaluation artifacts: " + text::join(missing, ", "));
  }

  std::stable_sort(runs.begin(), runs.end(), [](const RunData& a, const RunData& b) {
    return std::tie(a.column.prompt_version, a.column.answer_version) <
           std::tie(b.column.prompt_version, b.column.answer_version);
  });
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].column.header == runs[i - 1].column.header) {
      throw PreconditionError("runs '" + runs[i - 1].column.run_id + "' and '" + runs[i].column.run_id +
                              "' share the combination '" + runs[i].column.header + "'");
    }
  }

  ReportTable table;
  std::set<std::string> doc_ids;
  for (const auto& r : runs) {
    table.columns.push_back(r.column);
    for (const auto& [id, _] : r.docs) doc_ids.insert(id);
    table.disagreements.push_back(r.disagreement);
    table.disagreement_count += r.disagreement.count;
    table.disagreement_total += r.disagreement.total;
  }
  for (const auto& id : doc_ids) {
    ReportRow row{id, {}};
    for (const auto& r : runs) {
      const auto it = r.docs.find(id);
      row.cells.push_back(it == r.docs.end() ? "-" : it->second.cell());
    }
    table.rows.push_back(std::move(row));
  }
  ReportRow overall{kOverallRow, {}};
  for (const auto& r : runs) {
    std::int64_t matched = 0;
    std::int64_t total = 0;
    for (const auto& [_, a] : r.docs) {
      if (a.cell() == "x") continue;
      matched += static_cast<std::int64_t>(a.matched);
      total += static_cast<std::int64_t>(a.total);
    }
    overall.cells.push_back(total == 0 ? "x" : judge::alignment_percentage(matched, total).str());
  }
  table.rows.push_back(std::move(overall));
  return table;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string render_csv(const ReportTable& table) {
  std::string out = "document";
  for (const auto& c : table.columns) out += "," + csv_field(c.header);
  out += "\n";
  for (const auto& row : table.rows) {
    out += csv_field(row.label);
    for (const auto& cell : row.cells) out += "," + csv_field(cell);
    out += "\n";
  }
  return out;
}

std::string render_markdown(const ReportTable& table) {
  std::string out = "| Document |";
  std::string rule = "|---|";
  for (const auto& c : table.columns) {
    out += " " + c.header + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& row : table.rows) {
    out += "| " + row.label + " |";
    for (const auto& cell : row.cells) out += " " + cell + " |";
    out += "\n";
  }
  out += "\nCells give the percentage of KG individuals in line with the CQ answers; x marks a run with no "
         "meaningful KG.\n\n";
  out += table.summary_line() + "\n";
  for (const auto& d : table.disagreements) {
    out += "- " + d.run_id + ": " + std::to_string(d.count) + " disagreements out of " + std::to_string(d.total);
    if (d.unevaluated > 0) out += " (" + std::to_string(d.unevaluated) + " unevaluated)";
    out += "\n";
  }
  return out;
}

json to_json(const ReportTable& table) {
  json columns = json::array();
  for (const auto& c : table.columns) {
    columns.push_back({{"run_id", c.run_id},
                       {"prompt_version", c.prompt_version},
                       {"answer_version", c.answer_version},
                       {"header", c.header}});
  }
  json rows = json::array();
  for (const auto& r : table.rows) rows.push_back({{"label", r.label}, {"cells", r.cells}});
  json dis = json::array();
  for (const auto& d : table.disagreements) {
    dis.push_back({{"run_id", d.run_id}, {"disagreements", d.count}, {"total", d.total}, {"unevaluated", d.unevaluated}});
  }
  return {{"columns", columns},
          {"rows", rows},
          {"disagreements", dis},
          {"summary", table.summary_line()},
          {"disagreement_count", table.disagreement_count},
          {"disagreement_total", table.disagreement_total}};
}

void emit_report(const ReportTable& table, const fs::path& out_dir) {
  write_text_atomic(out_dir / "report.csv", render_csv(table));
  write_text_atomic(out_dir / "report.md", render_markdown(table));
  write_json_atomic(out_dir / "report.json", to_json(table));
}

}  // namespace kgpipe::report
