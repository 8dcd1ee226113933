#include "kgpipe/rdf_repair.hpp"

#include <cctype>
#include <deque>
#include <optional>

#include "kgpipe/text_util.hpp"

namespace kgpipe::rdf {

std::string_view to_string(RepairKind kind) {
  switch (kind) {
    case RepairKind::kStrippedFence: return "stripped_fence";
    case RepairKind::kStrippedProse: return "stripped_prose";
    case RepairKind::kInjectedPrefix: return "injected_prefix";
    case RepairKind::kTerminatedStatement: return "terminated_statement";
    case RepairKind::kDroppedStatement: return "dropped_statement";
  }
  return "unknown";
}

std::size_t RepairReport::count(RepairKind kind) const {
  std::size_t n = 0;
  for (const auto& a : actions) n += a.kind == kind ? 1 : 0;
  return n;
}

json to_json(const RepairReport& report) {
  json actions = json::array();
  for (const auto& a : report.actions) actions.push_back({{"kind", std::string(to_string(a.kind))}, {"detail", a.detail}});
  return {{"actions", std::move(actions)}, {"recovered_text", report.recovered_text}};
}

namespace {

std::optional<RdfGraph> try_parse(std::string_view text, const PrefixMap& prefixes) {
  try {
    return parse_turtle(text, prefixes);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

bool is_fence(std::string_view line) {
  const auto t = text::trim(line);
  return t.starts_with("```") || t.starts_with("~~~");
}

std::optional<std::string> strip_fences(const std::string& text, std::size_t& fence_lines) {
  const auto lines = text::split_lines(text);
  std::vector<std::string> kept;
  bool inside = false;
  fence_lines = 0;
  for (const auto& line : lines) {
    if (is_fence(line)) {
      ++fence_lines;
      inside = !inside;
      continue;
    }
    if (inside) kept.push_back(line);
  }
  if (fence_lines == 0) return std::nullopt;
  return text::join(kept, "\n") + "\n";
}

bool looks_like_turtle(std::string_view line) {
  const auto t = text::trim(line);
  if (t.empty()) return true;
  const char c = t.front();
  if (std::string_view("<@#\"'.;,)]").find(c) != std::string_view::npos) return true;
  const auto first_token = t.substr(0, t.find_first_of(" \t"));
  const auto upper = [](std::string_view s) {
    std::string u(s);
    for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return u;
  }(first_token);
  if (upper == "PREFIX" || upper == "BASE") return true;
  const auto colon = first_token.find(':');
  if (colon == std::string_view::npos) return false;
  const auto prefix = first_token.substr(0, colon);
  for (const char ch : prefix) {
    const auto u = static_cast<unsigned char>(ch);
    if (!(std::isalnum(u) || ch == '_' || ch == '-' || ch == '.')) return false;
  }
  if (!prefix.empty() && !std::isalpha(static_cast<unsigned char>(prefix.front()))) return false;
  // "Note:" / "Explanation:" style labels read as prose, not as a bare
  // namespace name.
  if (colon + 1 == first_token.size() && !prefix.empty() &&
      std::isupper(static_cast<unsigned char>(prefix.front()))) {
    return false;
  }
  return true;
}

std::optional<std::string> strip_prose(const std::string& text, std::size_t& leading, std::size_t& trailing) {
  const auto lines = text::split_lines(text);
  std::size_t begin = 0;
  std::size_t end = lines.size();
  leading = trailing = 0;
  while (begin < end && (text::trim(lines[begin]).empty() || !looks_like_turtle(lines[begin]))) {
    if (!text::trim(lines[begin]).empty()) ++leading;
    ++begin;
  }
  while (end > begin && (text::trim(lines[end - 1]).empty() || !looks_like_turtle(lines[end - 1]))) {
    if (!text::trim(lines[end - 1]).empty()) ++trailing;
    --end;
  }
  if (leading == 0 && trailing == 0) return std::nullopt;
  std::vector<std::string> kept(lines.begin() + static_cast<std::ptrdiff_t>(begin),
                                lines.begin() + static_cast<std::ptrdiff_t>(end));
  return text::join(kept, "\n") + "\n";
}

// Closes a statement left open by a `;` at the end of a line when the next
// non-blank line starts unindented, i.e. begins a new subject.
std::optional<std::string> terminate_dangling(const std::string& stmt) {
  auto lines = text::split_lines(stmt);
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) {
    std::string& line = lines[i];
    const auto last = line.find_last_not_of(" \t");
    if (last == std::string::npos || line[last] != ';') continue;
    std::size_t j = i + 1;
    while (j < lines.size() && text::trim(lines[j]).empty()) ++j;
    if (j >= lines.size()) continue;
    const char lead = lines[j].empty() ? ' ' : lines[j][0];
    if (lead == ' ' || lead == '\t') continue;
    line[last] = '.';
    return text::join(lines, "\n");
  }
  return std::nullopt;
}

std::string first_line(std::string_view s) {
  const auto nl = s.find('\n');
  std::string out(s.substr(0, nl));
  if (out.size() > 120) out = out.substr(0, 120) + "...";
  return out;
}

}  // namespace

RepairResult repair_rdf_text(std::string_view raw, const PrefixMap& base_prefixes) {
  RepairReport report;
  std::string text(raw);

  auto finish = [&](RdfGraph graph) -> RepairResult {
    if (graph.empty()) throw NoMeaningfulGraphError("no triples could be recovered from model output");
    report.recovered_text = text;
    return {std::move(graph), std::move(report)};
  };

  if (auto g = try_parse(text, base_prefixes)) return finish(std::move(*g));

  std::size_t fence_lines = 0;
  if (auto stripped = strip_fences(text, fence_lines)) {
    text = std::move(*stripped);
    report.actions.push_back({RepairKind::kStrippedFence, "removed " + std::to_string(fence_lines) + " fence line(s)"});
    if (auto g = try_parse(text, base_prefixes)) return finish(std::move(*g));
  }

  std::size_t leading = 0;
  std::size_t trailing = 0;
  if (auto stripped = strip_prose(text, leading, trailing)) {
    text = std::move(*stripped);
    report.actions.push_back({RepairKind::kStrippedProse, "removed " + std::to_string(leading) + " leading and " +
                                                              std::to_string(trailing) + " trailing prose line(s)"});
    if (auto g = try_parse(text, base_prefixes)) return finish(std::move(*g));
  }

  {
    const auto declared = declared_prefixes(text);
    std::string header;
    std::vector<std::string> injected;
    for (const auto& prefix : referenced_prefixes(text)) {
      if (declared.count(prefix) || base_prefixes.count(prefix)) continue;
      const auto known = known_namespaces().find(prefix);
      if (known == known_namespaces().end()) continue;
      injected.push_back(prefix);
    }
    std::sort(injected.begin(), injected.end());
    for (const auto& prefix : injected) {
      header += "@prefix " + prefix + ": <" + known_namespaces().at(prefix) + "> .\n";
      report.actions.push_back({RepairKind::kInjectedPrefix, prefix});
    }
    if (!header.empty()) {
      text = header + text;
      if (auto g = try_parse(text, base_prefixes)) return finish(std::move(*g));
    }
  }

  std::deque<std::string> pending;
  for (auto& s : split_statements(text)) pending.push_back(std::move(s));
  PrefixMap prefixes = base_prefixes;
  std::vector<std::string> kept;
  while (!pending.empty()) {
    std::string stmt = std::move(pending.front());
    pending.pop_front();
    try {
      const RdfGraph piece = parse_turtle(stmt, prefixes);
      for (const auto& [p, ns] : piece.prefixes()) prefixes[p] = ns;
      kept.push_back(std::move(stmt));
      continue;
    } catch (const ParseError& e) {
      if (auto fixed = terminate_dangling(stmt)) {
        report.actions.push_back({RepairKind::kTerminatedStatement, first_line(stmt)});
        auto pieces = split_statements(*fixed);
        for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) pending.push_front(std::move(*it));
        continue;
      }
      report.actions.push_back({RepairKind::kDroppedStatement, std::string(e.what()) + ": " + first_line(stmt)});
    }
  }
  text = text::join(kept, "\n") + (kept.empty() ? "" : "\n");
  return finish(parse_turtle(text, base_prefixes));
}

}  // namespace kgpipe::rdf
