#include "kgpipe/cq.hpp"

#include <cctype>
#include <map>
#include <set>

#include "kgpipe/prompts.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::cq {

std::string_view to_string(CqStatus status) {
  switch (status) {
    case CqStatus::kGenerated: return "generated";
    case CqStatus::kEdited: return "edited";
    case CqStatus::kAdded: return "added";
    case CqStatus::kApproved: return "approved";
  }
  return "unknown";
}

std::string_view to_string(Provenance provenance) { return provenance == Provenance::kLlm ? "llm" : "human"; }

CqStatus status_from_string(std::string_view s) {
  for (const auto st : {CqStatus::kGenerated, CqStatus::kEdited, CqStatus::kAdded, CqStatus::kApproved}) {
    if (to_string(st) == s) return st;
  }
  throw ParseError("unknown CQ status '" + std::string(s) + "'");
}

json to_json(const CqSet& set) {
  json qs = json::array();
  for (const auto& q : set.questions) {
    qs.push_back({{"cq_id", q.cq_id},
                  {"text", q.text},
                  {"status", std::string(to_string(q.status))},
                  {"provenance", std::string(to_string(q.provenance))}});
  }
  return {{"review_round", set.review_round}, {"questions", std::move(qs)}};
}

CqSet cq_set_from_json(const json& j) {
  CqSet set;
  try {
    set.review_round = j.at("review_round").get<int>();
    for (const auto& q : j.at("questions")) {
      CompetencyQuestion cq;
      cq.cq_id = q.at("cq_id").get<std::string>();
      cq.text = q.at("text").get<std::string>();
      cq.status = status_from_string(q.at("status").get<std::string>());
      cq.provenance = q.at("provenance").get<std::string>() == "human" ? Provenance::kHuman : Provenance::kLlm;
      set.questions.push_back(std::move(cq));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed CQ set: ") + e.what());
  }
  return set;
}

namespace {

// Drops "1.", "1)", "-", "*", "•", "CQ3:" style list markers.
std::string strip_list_marker(std::string_view line) {
  auto t = text::trim(line);
  if (t.starts_with("\xE2\x80\xA2")) t.remove_prefix(3);
  else if (!t.empty() && (t.front() == '-' || t.front() == '*')) t.remove_prefix(1);
  t = text::trim(t);
  std::size_t i = 0;
  if (text::istarts_with(t, "cq")) i = 2;
  const std::size_t digits_start = i;
  while (i < t.size() && std::isdigit(static_cast<unsigned char>(t[i]))) ++i;
  if (i > digits_start && i < t.size() && (t[i] == '.' || t[i] == ')' || t[i] == ':')) {
    t.remove_prefix(i + 1);
  }
  t = text::trim(t);
  // Markdown emphasis around the whole question.
  while (t.size() >= 2 && t.front() == '*' && t.back() == '*') t = text::trim(t.substr(1, t.size() - 2));
  return std::string(t);
}

void renumber(CqSet& set) {
  for (std::size_t i = 0; i < set.questions.size(); ++i) set.questions[i].cq_id = "CQ" + std::to_string(i + 1);
}

}  // namespace

CqSet parse_question_list(const std::string& response) {
  CqSet set;
  std::set<std::string> seen;
  for (const auto& line : text::split_lines(response)) {
    const std::string q = strip_list_marker(line);
    if (q.empty() || q.back() != '?') continue;
    if (!seen.insert(text::normalize_for_compare(q)).second) continue;
    set.questions.push_back({"", q, CqStatus::kGenerated, Provenance::kLlm});
  }
  if (set.questions.empty()) throw ResponseParseError("no competency questions found in model response", response);
  renumber(set);
  return set;
}

CqSet generate_cqs(llm::Backend& backend, const std::string& domain_prompt, const llm::GenerationParams& params) {
  llm::ChatRequest request;
  request.user_text = prompts::cq_generation(domain_prompt);
  request.params = params;
  request.stage = llm::Stage::kCqGen;
  return parse_question_list(backend.complete(request).text);
}

std::string review_file_text(const CqSet& set) {
  std::string out(kReviewHeader);
  out.push_back('\n');
  for (const auto& q : set.questions) {
    out += q.cq_id + "\t" + std::string(to_string(q.status)) + "\t" + q.text + "\n";
  }
  return out;
}

void export_for_review(const CqSet& set, const std::filesystem::path& path) {
  write_text_atomic(path, review_file_text(set));
}

CqSet import_reviewed_text(std::string_view content, const CqSet& exported) {
  std::map<std::string, const CompetencyQuestion*> by_id;
  for (const auto& q : exported.questions) by_id[q.cq_id] = &q;

  CqSet out;
  out.review_round = exported.review_round + 1;
  const auto lines = text::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string& line = lines[n];
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    const auto fields = text::split(line, '\t');
    const std::string where = "review file line " + std::to_string(n + 1);
    if (fields.size() < 3) throw ParseError(where + ": expected <cq_id><TAB><status><TAB><text>");
    const std::string id = text::trim_copy(fields[0]);
    const std::string status_text = text::trim_copy(fields[1]);
    std::vector<std::string> rest(fields.begin() + 2, fields.end());
    const std::string question = text::trim_copy(text::join(rest, "\t"));
    if (question.empty()) throw ParseError(where + ": empty question text");
    CqStatus status;
    try {
      status = status_from_string(status_text);
    } catch (const ParseError&) {
      throw ParseError(where + ": unknown status '" + status_text + "'");
    }

    CompetencyQuestion q;
    q.text = question;
    const auto it = by_id.find(id);
    if (status == CqStatus::kAdded || it == by_id.end()) {
      q.status = CqStatus::kAdded;
      q.provenance = Provenance::kHuman;
    } else if (it->second->text != question) {
      q.status = CqStatus::kEdited;
      q.provenance = Provenance::kHuman;
    } else {
      q.status = it->second->status == CqStatus::kGenerated ? CqStatus::kApproved : it->second->status;
      q.provenance = it->second->provenance;
    }
    out.questions.push_back(std::move(q));
  }
  if (out.questions.empty()) throw ParseError("review file contains no questions");
  renumber(out);
  return out;
}

CqSet import_reviewed(const std::filesystem::path& path, const CqSet& exported) {
  return import_reviewed_text(read_text_file(path), exported);
}

void require_reviewed(const CqSet& set) {
  if (set.review_round < 1) {
    throw CheckpointError("competency questions have not been through human review (review_round = 0)");
  }
}

std::vector<CompetencyQuestion> approved_questions(const CqSet& set) {
  require_reviewed(set);
  std::vector<CompetencyQuestion> out;
  for (const auto& q : set.questions) {
    if (q.status != CqStatus::kGenerated) out.push_back(q);
  }
  return out;
}

}  // namespace kgpipe::cq
