#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/answering.hpp"
#include "kgpipe/cq.hpp"
#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"
#include "kgpipe/ontology.hpp"
#include "kgpipe/rdf.hpp"
#include "kgpipe/rdf_repair.hpp"

namespace kgpipe::kg {

struct KgIndividual {
  rdf::Iri iri;
  rdf::Iri class_iri;
  std::optional<std::string> label;
  std::string source_doc;

  friend bool operator==(const KgIndividual&, const KgIndividual&) = default;
};

enum class KgStatus { kOk, kNoMeaningfulKg };

std::string_view to_string(KgStatus status);

struct KgBuildResult {
  rdf::RdfGraph graph;
  std::vector<KgIndividual> individuals;
  KgStatus status = KgStatus::kNoMeaningfulKg;
  rdf::RepairReport repair;
  std::string diagnostic;
  std::string raw_text;  // model output before repair
};

json to_json(const KgIndividual& ind);
KgIndividual individual_from_json(const json& j);
// Status, individuals, repair report and diagnostic (graph goes to .ttl).
json result_summary(const KgBuildResult& result);

struct KgSettings {
  std::string prompt_version = "v1";
  llm::GenerationParams params;
};

// Renames typed individuals whose IRI is not `<base><Class>_<n>` for their
// class into that scheme (next free n per class, in IRI order) and rewrites
// every triple that mentions them.
rdf::RdfGraph renumber_individuals(const rdf::RdfGraph& graph, const onto::OntologySpec& ontology);

// Individuals: subjects with exactly one rdf:type into an ontology class.
std::vector<KgIndividual> enumerate_individuals(const rdf::RdfGraph& graph, const onto::OntologySpec& ontology,
                                                const std::string& doc_id);

// Turns raw model output into a KgBuildResult (repair, renumber, enumerate).
KgBuildResult assemble_kg(std::string_view raw, const onto::OntologySpec& ontology, const std::string& doc_id);

KgBuildResult build_kg(llm::Backend& backend, const std::vector<cq::CompetencyQuestion>& cqs,
                       const std::vector<answer::CQAnswer>& answers, const onto::OntologySpec& ontology,
                       const std::string& doc_id, const KgSettings& settings);

enum class IssueKind { kUndeclaredClass, kUndeclaredProperty, kUnspecified, kDuplicateValue, kUnlabeled, kMultipleTypes };

std::string_view to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  std::vector<std::string> subjects;  // IRIs involved
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  std::size_t count(IssueKind kind) const;
  bool empty() const { return issues.empty(); }
};

json to_json(const ValidationReport& report);

ValidationReport validate_kg(const KgBuildResult& result, const onto::OntologySpec& ontology);

struct IndividualLink {
  std::string individual_iri;
  std::vector<std::string> cq_ids;
  std::string match_basis;
};

json to_json(const std::vector<IndividualLink>& links);
std::vector<IndividualLink> links_from_json(const json& j);

// Links each individual to every CQ whose text contains its decamelized
// class name (case-insensitive).
std::vector<IndividualLink> link_individuals(const KgBuildResult& result, const std::vector<cq::CompetencyQuestion>& cqs);

}  // namespace kgpipe::kg
