#include "kgpipe/judge.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "kgpipe/prompts.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::judge {

std::string_view to_string(Label label) {
  switch (label) {
    case Label::kWrong: return "Wrong";
    case Label::kPartial: return "Partial";
    case Label::kRight: return "Right";
  }
  return "unknown";
}

Label label_from_string(std::string_view s) {
  const std::string lower = text::to_lower_ascii(text::trim(s));
  if (lower == "wrong") return Label::kWrong;
  if (lower == "partial") return Label::kPartial;
  if (lower == "right") return Label::kRight;
  throw ParseError("unknown label '" + std::string(s) + "' (expected Right, Wrong or Partial)");
}

Label classify(int score) {
  if (score < kMinScore || score > kMaxScore) {
    throw PreconditionError("judge score " + std::to_string(score) + " outside [0, 10]");
  }
  if (score >= kRightThreshold) return Label::kRight;
  if (score < kWrongThreshold) return Label::kWrong;
  return Label::kPartial;
}

std::vector<GroundTruth> parse_ground_truth(std::string_view content) {
  std::vector<GroundTruth> out;
  std::set<std::pair<std::string, std::string>> keys;
  const auto lines = text::split_lines(content);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto trimmed = text::trim(lines[n]);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    const std::string where = "ground truth line " + std::to_string(n + 1);
    const auto fields = text::split(lines[n], '\t');
    if (fields.size() < 4) throw ParseError(where + ": expected <cq_id><TAB><doc_id><TAB><label><TAB><text>");
    GroundTruth g;
    g.cq_id = text::trim_copy(fields[0]);
    g.doc_id = text::trim_copy(fields[1]);
    try {
      g.human_label = label_from_string(fields[2]);
    } catch (const ParseError& e) {
      throw ParseError(where + ": " + e.what());
    }
    std::vector<std::string> rest(fields.begin() + 3, fields.end());
    g.text = text::trim_copy(text::join(rest, "\t"));
    if (!keys.insert({g.cq_id, g.doc_id}).second) {
      throw ParseError(where + ": duplicate record for (" + g.cq_id + ", " + g.doc_id + ")");
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroundTruth> load_ground_truth(const std::filesystem::path& path) {
  return parse_ground_truth(read_text_file(path));
}

std::string ground_truth_text(const std::vector<GroundTruth>& records) {
  std::string out = "# cq_id\tdoc_id\tlabel\ttext\n";
  for (const auto& g : records) {
    out += g.cq_id + "\t" + g.doc_id + "\t" + std::string(to_string(g.human_label)) + "\t" + g.text + "\n";
  }
  return out;
}

JudgeVerdict parse_verdict(const std::string& response) {
  static const std::regex kScore(R"(^[\s*]*score[\s*]*[:=]\s*(.*)$)", std::regex::ECMAScript | std::regex::icase);
  static const std::regex kExplanation(R"(^[\s*]*explanation[\s*]*:\s*(.*)$)",
                                       std::regex::ECMAScript | std::regex::icase);
  const auto lines = text::split_lines(response);
  std::optional<std::string> score_text;
  std::string explanation;
  bool in_explanation = false;
  for (const auto& line : lines) {
    std::smatch m;
    if (!score_text && std::regex_match(line, m, kScore)) {
      score_text = text::trim_copy(m[1].str());
      in_explanation = false;
      continue;
    }
    if (std::regex_match(line, m, kExplanation)) {
      explanation = text::trim_copy(m[1].str());
      in_explanation = true;
      continue;
    }
    if (in_explanation && !text::trim(line).empty()) explanation += "\n" + text::trim_copy(line);
  }
  if (!score_text) throw ResponseParseError("judge response has no 'score:' line", response);
  std::string token = *score_text;
  token = token.substr(0, token.find_first_of(" \t"));
  if (const auto slash = token.find('/'); slash != std::string::npos) token = token.substr(0, slash);
  while (!token.empty() && (token.back() == '.' || token.back() == ',')) token.pop_back();
  const bool numeric = !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  }) && token.size() <= 3;
  if (!numeric) throw ResponseParseError("unparseable judge score '" + *score_text + "'", response);
  const int score = std::stoi(token);
  if (score < kMinScore || score > kMaxScore) {
    throw ResponseParseError("judge score " + token + " outside [0, 10]", response);
  }
  return {score, explanation, classify(score)};
}

bool parse_verification(const std::string& response) {
  static const std::regex kResponse(R"(^[\s*]*response[\s*]*:\s*(.*)$)", std::regex::ECMAScript | std::regex::icase);
  for (const auto& line : text::split_lines(response)) {
    std::smatch m;
    if (!std::regex_match(line, m, kResponse)) continue;
    std::string value = text::to_lower_ascii(text::trim(m[1].str()));
    while (!value.empty() && (value.back() == '.' || value.back() == '*')) value.pop_back();
    if (value == "true") return true;
    if (value == "false") return false;
    throw ResponseParseError("unparseable verification response '" + m[1].str() + "'", response);
  }
  throw ResponseParseError("verification response has no 'Response:' line", response);
}

JudgeVerdict judge_answer(llm::Backend& backend, const GroundTruth& ground_truth, const answer::CQAnswer& answer,
                          std::string_view question, const llm::GenerationParams& params) {
  if (ground_truth.cq_id != answer.cq_id || ground_truth.doc_id != answer.doc_id) {
    throw PreconditionError("ground truth (" + ground_truth.cq_id + ", " + ground_truth.doc_id +
                            ") does not match answer (" + answer.cq_id + ", " + answer.doc_id + ")");
  }
  llm::ChatRequest request;
  request.user_text = prompts::judge_answer(ground_truth.text, answer.clean_text, question);
  request.params = params;
  request.stage = llm::Stage::kJudgeAnswer;
  return parse_verdict(backend.complete(request).text);
}

std::string individual_strings(const kg::KgIndividual& individual) {
  if (individual.label) return *individual.label;
  return text::decamelize(rdf::local_name(individual.class_iri));
}

bool verify_individual(llm::Backend& backend, const kg::KgIndividual& individual, const answer::CQAnswer& answer,
                       const llm::GenerationParams& params) {
  llm::ChatRequest request;
  request.user_text = prompts::judge_individual(individual_strings(individual), answer.clean_text);
  request.params = params;
  request.stage = llm::Stage::kJudgeKg;
  return parse_verification(backend.complete(request).text);
}

json to_json(const KeyedVerdict& v) {
  json j = {{"cq_id", v.cq_id}, {"doc_id", v.doc_id}};
  if (v.verdict) {
    j["score"] = v.verdict->score;
    j["label"] = std::string(to_string(v.verdict->label));
    j["explanation"] = v.verdict->explanation;
  } else {
    j["unevaluated"] = true;
    j["error"] = v.error;
  }
  return j;
}

KeyedVerdict keyed_verdict_from_json(const json& j) {
  KeyedVerdict v;
  v.cq_id = j.at("cq_id").get<std::string>();
  v.doc_id = j.at("doc_id").get<std::string>();
  if (j.contains("score")) {
    const int score = j.at("score").get<int>();
    v.verdict = JudgeVerdict{score, j.value("explanation", ""), classify(score)};
  } else {
    v.error = j.value("error", "");
  }
  return v;
}

json to_json(const DisagreementReport& r) {
  json matrix = json::object();
  for (int h = 0; h < 3; ++h) {
    json row = json::object();
    for (int p = 0; p < 3; ++p) row[std::string(to_string(static_cast<Label>(p)))] = r.confusion[h][p];
    matrix[std::string(to_string(static_cast<Label>(h)))] = std::move(row);
  }
  return {{"disagreements", r.count}, {"total", r.total}, {"unevaluated", r.unevaluated}, {"confusion", matrix}};
}

DisagreementReport disagreement_report(const std::vector<GroundTruth>& ground, const std::vector<KeyedVerdict>& verdicts) {
  std::map<std::pair<std::string, std::string>, const KeyedVerdict*> by_key;
  for (const auto& v : verdicts) by_key[{v.cq_id, v.doc_id}] = &v;
  std::set<std::pair<std::string, std::string>> ground_keys;
  std::vector<std::string> unmatched;
  for (const auto& g : ground) {
    ground_keys.insert({g.cq_id, g.doc_id});
    if (!by_key.count({g.cq_id, g.doc_id})) unmatched.push_back("(" + g.cq_id + ", " + g.doc_id + ")");
  }
  for (const auto& [key, _] : by_key) {
    if (!ground_keys.count(key)) unmatched.push_back("(" + key.first + ", " + key.second + ")");
  }
  if (!unmatched.empty()) {
    throw AlignmentError("ground truth and verdicts are not aligned; unmatched keys: " + text::join(unmatched, " "));
  }
  DisagreementReport r;
  for (const auto& g : ground) {
    const KeyedVerdict& v = *by_key.at({g.cq_id, g.doc_id});
    if (!v.verdict) {
      ++r.unevaluated;
      continue;
    }
    ++r.total;
    ++r.confusion[static_cast<int>(g.human_label)][static_cast<int>(v.verdict->label)];
    if (g.human_label != v.verdict->label) ++r.count;
  }
  return r;
}

std::string Percent::str() const {
  const std::int64_t whole = hundredths / 100;
  const std::int64_t frac = hundredths % 100;
  return std::to_string(whole) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

Percent alignment_percentage(std::int64_t matched, std::int64_t total) {
  if (total < 1) throw PreconditionError("alignment percentage needs total >= 1");
  if (matched < 0 || matched > total) {
    throw PreconditionError("matched (" + std::to_string(matched) + ") must lie in [0, total=" + std::to_string(total) +
                            "]");
  }
  return {(matched * 20000 + total) / (2 * total)};
}

std::string DocumentAlignment::cell() const {
  if (status == kg::KgStatus::kNoMeaningfulKg || total == 0) return "x";
  return alignment_percentage(static_cast<std::int64_t>(matched), static_cast<std::int64_t>(total)).str();
}

json to_json(const DocumentAlignment& a) {
  return {{"doc_id", a.doc_id},
          {"status", std::string(kg::to_string(a.status))},
          {"matched", a.matched},
          {"total", a.total},
          {"unevaluated", a.unevaluated},
          {"cell", a.cell()}};
}

DocumentAlignment document_alignment_from_json(const json& j) {
  DocumentAlignment a;
  a.doc_id = j.at("doc_id").get<std::string>();
  a.status = j.at("status").get<std::string>() == "ok" ? kg::KgStatus::kOk : kg::KgStatus::kNoMeaningfulKg;
  a.matched = j.at("matched").get<std::size_t>();
  a.total = j.at("total").get<std::size_t>();
  a.unevaluated = j.at("unevaluated").get<std::size_t>();
  return a;
}

}  // namespace kgpipe::judge
