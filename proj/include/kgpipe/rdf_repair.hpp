#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/json_io.hpp"
#include "kgpipe/rdf.hpp"

namespace kgpipe::rdf {

enum class RepairKind {
  kStrippedFence,
  kStrippedProse,
  kInjectedPrefix,
  kTerminatedStatement,
  kDroppedStatement,
};

std::string_view to_string(RepairKind kind);

struct RepairAction {
  RepairKind kind;
  std::string detail;
};

struct RepairReport {
  std::vector<RepairAction> actions;
  std::string recovered_text;

  std::size_t count(RepairKind kind) const;
};

json to_json(const RepairReport& report);

// Raised when nothing usable survives repair.
class NoMeaningfulGraphError : public ParseError {
 public:
  explicit NoMeaningfulGraphError(const std::string& what) : ParseError(what) {}
};

struct RepairResult {
  RdfGraph graph;
  RepairReport report;
};

// Recovers a graph from model-emitted Turtle. Steps run in order and each
// only when the text still fails to parse: strip markdown fences, strip
// leading/trailing prose lines, inject declarations for known namespaces,
// then per statement either close a statement left open by a dangling `;`
// or drop it. Valid Turtle comes back unchanged with no actions.
RepairResult repair_rdf_text(std::string_view raw, const PrefixMap& base_prefixes = {});

}  // namespace kgpipe::rdf
