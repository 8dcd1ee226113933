#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/cq.hpp"
#include "kgpipe/json_io.hpp"
#include "kgpipe/llm_backend.hpp"
#include "kgpipe/rdf.hpp"

namespace kgpipe::onto {

inline constexpr std::string_view kDefaultBaseIri = "https://w3id.org/dlprov/";
inline constexpr std::string_view kDefaultBasePrefix = "dlprov";

// Ordered, duplicate-free concept (UpperCamelCase) and relation
// (lowerCamelCase) names.
struct ConceptSet {
  std::vector<std::string> concepts;
  std::vector<std::string> relations;

  bool empty() const { return concepts.empty() && relations.empty(); }
  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;
};

json to_json(const ConceptSet& set);
ConceptSet concept_set_from_json(const json& j);

std::string to_upper_camel(std::string_view name);
std::string to_lower_camel(std::string_view name);

// Builds a ConceptSet from raw name lists (normalizing and deduplicating).
ConceptSet make_concept_set(const std::vector<std::string>& concepts, const std::vector<std::string>& relations);

// Reads the `Concepts:` and `Relations:` lines of a model response.
ConceptSet parse_concept_response(const std::string& response);

ConceptSet extract_concept_set(llm::Backend& backend, const cq::CqSet& cqs, const llm::GenerationParams& params);

// The bundled PROV-O subset (prov:Entity, prov:Activity, prov:Agent).
std::string_view default_foundation_turtle();
rdf::RdfGraph default_foundation();

// Classes declared in `foundation` (owl:Class / rdfs:Class subjects).
std::vector<rdf::Iri> foundation_roots(const rdf::RdfGraph& foundation);

std::string foundation_summary(const rdf::RdfGraph& foundation);

std::string draft_ontology(llm::Backend& backend, const ConceptSet& concepts, std::string_view base_iri,
                           const rdf::RdfGraph& foundation, const llm::GenerationParams& params);

struct OntologySpec {
  rdf::RdfGraph graph;
  std::string base_iri;
  std::string base_prefix;
  int class_count = 0;
  int property_count = 0;
  int axiom_count = 0;  // raw triple count of `graph`
  std::vector<std::string> synthesized;
  std::vector<std::string> pruned;
  std::vector<std::string> warnings;

  bool declares_class(const rdf::Iri& iri) const;
  bool declares_property(const rdf::Iri& iri) const;
  std::vector<rdf::Iri> classes() const;
  std::vector<rdf::Iri> properties() const;
};

// JSON sidecar: counts, synthesized/pruned names, warnings.
json sidecar(const OntologySpec& spec);

// Superclass chosen for a class that has none: names ending in Process,
// Pipeline, Step or Training go under prov:Activity, Author/Annotator under
// prov:Agent, everything else under prov:Entity.
rdf::Iri default_superclass(std::string_view concept_name, const rdf::RdfGraph& foundation);

// Repairs the draft and enforces that exactly the ConceptSet is declared:
// missing classes/properties are synthesized, foreign declarations pruned,
// every class reaches a foundation root, and `has<Concept>` relations get
// rdfs:range <Concept> when they have no range.
OntologySpec normalize_ontology(std::string_view raw, const ConceptSet& concepts, std::string_view base_iri,
                                const rdf::RdfGraph& foundation,
                                std::string_view base_prefix = kDefaultBasePrefix);

// Re-derives an OntologySpec from a serialized, already-normalized ontology.
OntologySpec load_ontology(std::string_view turtle, std::string_view base_iri, std::string_view base_prefix);

}  // namespace kgpipe::onto
