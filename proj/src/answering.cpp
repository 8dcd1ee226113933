#include "kgpipe/answering.hpp"

#include <algorithm>
#include <set>

#include "kgpipe/prompts.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::answer {

json to_json(const CQAnswer& a) {
  json ctx = json::array();
  for (const auto& c : a.context_chunks) ctx.push_back({{"doc_id", c.doc_id}, {"index", c.index}});
  json j = {{"cq_id", a.cq_id},
            {"doc_id", a.doc_id},
            {"raw_text", a.raw_text},
            {"clean_text", a.clean_text},
            {"context_chunks", std::move(ctx)},
            {"answered", a.answered}};
  if (!a.error.empty()) j["error"] = a.error;
  return j;
}

CQAnswer answer_from_json(const json& j) {
  CQAnswer a;
  try {
    a.cq_id = j.at("cq_id").get<std::string>();
    a.doc_id = j.at("doc_id").get<std::string>();
    a.raw_text = j.at("raw_text").get<std::string>();
    a.clean_text = j.at("clean_text").get<std::string>();
    a.answered = j.at("answered").get<bool>();
    for (const auto& c : j.at("context_chunks")) {
      a.context_chunks.push_back({c.at("doc_id").get<std::string>(), c.at("index").get<std::size_t>()});
    }
    if (j.contains("error")) a.error = j.at("error").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed CQ answer record: ") + e.what());
  }
  return a;
}

std::vector<std::string> default_dont_know_patterns() {
  return {R"(don(?:'|\xE2\x80\x99)?t\s+know)", R"(do\s+not\s+know)"};
}

DontKnowDetector::DontKnowDetector(const std::vector<std::string>& patterns) {
  for (const auto& p : patterns) {
    try {
      patterns_.emplace_back(p, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw ConfigError("invalid don't-know pattern '" + p + "': " + e.what());
    }
  }
}

bool DontKnowDetector::matches(std::string_view text) const {
  const std::string s(text);
  return std::any_of(patterns_.begin(), patterns_.end(), [&](const std::regex& re) { return std::regex_search(s, re); });
}

namespace {

std::vector<std::string> line_sentences(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if ((c == '.' || c == '?' || c == '!') && (i + 1 == line.size() || line[i + 1] == ' ' || line[i + 1] == '\t')) {
      auto s = text::trim(line.substr(start, i + 1 - start));
      if (!s.empty()) out.emplace_back(s);
      start = i + 1;
    }
  }
  auto tail = text::trim(line.substr(std::min(start, line.size())));
  if (!tail.empty()) out.emplace_back(tail);
  return out;
}

bool is_boilerplate(std::string_view line) {
  static const std::vector<std::regex> kPatterns = [] {
    const auto flags = std::regex::ECMAScript | std::regex::icase;
    return std::vector<std::regex>{
        std::regex(R"(^(sure|certainly|of course|absolutely|okay|ok)[!,.]?(\s+here\b.*:)?\s*$)", flags),
        std::regex(R"(^(here is|here's|here are)\b[^.!?]*:\s*$)", flags),
        std::regex(R"(^answer\s*:*\s*$)", flags),
        std::regex(R"(^based on the (provided |given )?(context|information)[^.!?]*:\s*$)", flags),
    };
  }();
  const std::string t = text::trim_copy(line);
  return std::any_of(kPatterns.begin(), kPatterns.end(), [&](const std::regex& re) { return std::regex_match(t, re); });
}

}  // namespace

std::vector<std::string> sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(text)) {
    auto s = line_sentences(line);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::string postprocess_answer(std::string_view raw) {
  auto lines = text::split_lines(raw);
  std::size_t first = 0;
  while (first < lines.size() && (text::trim(lines[first]).empty() || is_boilerplate(lines[first]))) ++first;

  std::set<std::string> seen;
  std::vector<std::string> out;
  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    if (text::trim(line).empty()) {
      if (!out.empty() && !out.back().empty()) out.emplace_back();
      continue;
    }
    const std::string indent = line.substr(0, line.find_first_not_of(" \t"));
    std::vector<std::string> kept;
    for (auto& s : line_sentences(line)) {
      if (seen.insert(text::normalize_for_compare(s)).second) kept.push_back(std::move(s));
    }
    if (!kept.empty()) out.push_back(indent + text::join(kept, " "));
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  // Deduplication can shrink a line down to boilerplate.
  std::size_t lead = 0;
  while (lead < out.size() && (out[lead].empty() || is_boilerplate(out[lead]))) ++lead;
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(lead));
  return text::join(out, "\n");
}

CQAnswer answer_cq(llm::Backend& backend, const corpus::RetrievalIndex& index, const cq::CompetencyQuestion& cq,
                   const std::string& doc_id, const AnswerSettings& settings, const DontKnowDetector& detector) {
  if (cq.status == cq::CqStatus::kGenerated) {
    throw PreconditionError("competency question " + cq.cq_id + " has not been approved");
  }
  const bool indexed = std::any_of(index.chunks().begin(), index.chunks().end(),
                                   [&](const corpus::Chunk& c) { return c.doc_id == doc_id; });
  if (!indexed) throw PreconditionError("document '" + doc_id + "' is not in the retrieval index");

  CQAnswer answer;
  answer.cq_id = cq.cq_id;
  answer.doc_id = doc_id;
  std::vector<prompts::ContextPassage> context;
  for (const auto& hit : corpus::retrieve(index, cq.text, settings.k, doc_id)) {
    answer.context_chunks.push_back({hit.chunk.doc_id, hit.chunk.index});
    context.push_back({hit.chunk.doc_id + "#" + std::to_string(hit.chunk.index), hit.chunk.text});
  }

  llm::ChatRequest request;
  request.user_text = prompts::cq_answer(settings.version, context, cq.text);
  request.params = settings.params;
  request.stage = llm::Stage::kCqAnswer;
  try {
    answer.raw_text = backend.complete(request).text;
  } catch (const llm::BackendError& e) {
    answer.error = e.what();
    return answer;
  }
  answer.clean_text = postprocess_answer(answer.raw_text);
  answer.answered = !answer.clean_text.empty() && !detector.matches(answer.clean_text);
  return answer;
}

}  // namespace kgpipe::answer
