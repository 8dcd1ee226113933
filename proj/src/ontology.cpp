#include "kgpipe/ontology.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <queue>
#include <regex>
#include <set>
#include <sstream>

#include "kgpipe/prompts.hpp"
#include "kgpipe/rdf_repair.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::onto {

using rdf::Iri;
using rdf::Literal;
using rdf::RdfGraph;
using rdf::Triple;
namespace vocab = rdf::vocab;

json to_json(const ConceptSet& set) { return {{"concepts", set.concepts}, {"relations", set.relations}}; }

ConceptSet concept_set_from_json(const json& j) {
  try {
    return {j.at("concepts").get<std::vector<std::string>>(), j.at("relations").get<std::vector<std::string>>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed concept set: ") + e.what());
  }
}

namespace {

std::vector<std::string> name_words(std::string_view name) {
  std::vector<std::string> words;
  std::string cur;
  for (const char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

}  // namespace

std::string to_upper_camel(std::string_view name) {
  std::string out;
  for (auto word : name_words(name)) {
    word[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(word[0])));
    out += word;
  }
  return out;
}

std::string to_lower_camel(std::string_view name) {
  std::string out = to_upper_camel(name);
  if (!out.empty()) out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
  return out;
}

ConceptSet make_concept_set(const std::vector<std::string>& concepts, const std::vector<std::string>& relations) {
  ConceptSet out;
  auto add = [](std::vector<std::string>& dst, std::string name) {
    if (name.empty() || std::find(dst.begin(), dst.end(), name) != dst.end()) return;
    dst.push_back(std::move(name));
  };
  for (const auto& c : concepts) add(out.concepts, to_upper_camel(c));
  for (const auto& r : relations) add(out.relations, to_lower_camel(r));
  return out;
}

ConceptSet parse_concept_response(const std::string& response) {
  std::optional<std::vector<std::string>> concepts;
  std::optional<std::vector<std::string>> relations;
  auto list_after_label = [](std::string_view rest) {
    std::vector<std::string> items;
    for (const auto& part : text::split(rest, ',')) {
      std::string item = text::trim_copy(part);
      while (!item.empty() && std::string_view("`'\".*").find(item.back()) != std::string_view::npos) item.pop_back();
      while (!item.empty() && std::string_view("`'\"*").find(item.front()) != std::string_view::npos) {
        item.erase(item.begin());
      }
      if (!item.empty()) items.push_back(item);
    }
    return items;
  };
  for (const auto& raw_line : text::split_lines(response)) {
    std::string line = text::trim_copy(raw_line);
    text::replace_all(line, "**", "");
    if (!line.empty() && (line.front() == '-' || line.front() == '*')) line = text::trim_copy(line.substr(1));
    for (const std::string_view label : {"concepts:", "concept:"}) {
      if (text::istarts_with(line, label)) concepts = list_after_label(std::string_view(line).substr(label.size()));
    }
    for (const std::string_view label : {"relations:", "relationships:", "relation:"}) {
      if (text::istarts_with(line, label)) relations = list_after_label(std::string_view(line).substr(label.size()));
    }
  }
  if (!concepts || !relations) {
    throw ResponseParseError("concept extraction response lacks a 'Concepts:' or 'Relations:' line", response);
  }
  return make_concept_set(*concepts, *relations);
}

ConceptSet extract_concept_set(llm::Backend& backend, const cq::CqSet& cqs, const llm::GenerationParams& params) {
  std::vector<std::string> questions;
  for (const auto& q : cq::approved_questions(cqs)) questions.push_back(q.text);
  if (questions.empty()) throw PreconditionError("no approved competency questions to extract concepts from");
  llm::ChatRequest request;
  request.user_text = prompts::concept_extraction(questions);
  request.params = params;
  request.stage = llm::Stage::kConceptExtract;
  return parse_concept_response(backend.complete(request).text);
}

std::string_view default_foundation_turtle() {
  static constexpr std::string_view kFoundation =
      R"(@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix prov: <http://www.w3.org/ns/prov#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .

prov:Activity a owl:Class ;
    rdfs:label "Activity"@en ;
    rdfs:comment "Something that occurs over a period of time and acts upon or with entities."@en .

prov:Agent a owl:Class ;
    rdfs:label "Agent"@en ;
    rdfs:comment "Something that bears some form of responsibility for an activity taking place, for the existence of an entity, or for another agent's activity."@en .

prov:Entity a owl:Class ;
    rdfs:label "Entity"@en ;
    rdfs:comment "A physical, digital, conceptual, or other kind of thing with some fixed aspects."@en .
)";
  return kFoundation;
}

RdfGraph default_foundation() { return rdf::parse_turtle(default_foundation_turtle()); }

std::vector<Iri> foundation_roots(const RdfGraph& foundation) {
  std::set<Iri> roots;
  for (const auto& t : foundation.triples()) {
    if (t.predicate != vocab::type()) continue;
    const auto* o = std::get_if<Iri>(&t.object);
    if (o && (*o == vocab::owl("Class") || *o == vocab::rdfs("Class"))) roots.insert(t.subject);
  }
  return {roots.begin(), roots.end()};
}

std::string foundation_summary(const RdfGraph& foundation) {
  std::ostringstream out;
  for (const auto& root : foundation_roots(foundation)) {
    out << "- " << rdf::render_iri(root, foundation.prefixes());
    for (const auto& t : rdf::triples_matching(foundation, {root, vocab::rdfs("comment"), std::nullopt})) {
      if (const auto* lit = std::get_if<Literal>(&t.object)) out << ": " << lit->lexical;
    }
    out << "\n";
  }
  return out.str();
}

std::string draft_ontology(llm::Backend& backend, const ConceptSet& concepts, std::string_view base_iri,
                           const RdfGraph& foundation, const llm::GenerationParams& params) {
  if (concepts.concepts.empty()) throw PreconditionError("cannot draft an ontology from an empty concept set");
  llm::ChatRequest request;
  request.user_text = prompts::ontology_draft(concepts.concepts, concepts.relations, base_iri,
                                              foundation_summary(foundation));
  request.params = params;
  request.stage = llm::Stage::kOntologyBuild;
  return backend.complete(request).text;
}

bool OntologySpec::declares_class(const Iri& iri) const {
  return graph.contains(Triple{iri, vocab::type(), vocab::owl("Class")}) ||
         graph.contains(Triple{iri, vocab::type(), vocab::rdfs("Class")});
}

bool OntologySpec::declares_property(const Iri& iri) const {
  return graph.contains(Triple{iri, vocab::type(), vocab::owl("ObjectProperty")}) ||
         graph.contains(Triple{iri, vocab::type(), vocab::owl("DatatypeProperty")}) ||
         graph.contains(Triple{iri, vocab::type(), vocab::rdf("Property")});
}

namespace {

std::vector<Iri> typed_in_namespace(const RdfGraph& g, const Iri& type, std::string_view ns) {
  std::vector<Iri> out;
  for (const auto& t : rdf::triples_matching(g, {std::nullopt, vocab::type(), type})) {
    if (t.subject.value.starts_with(ns) && t.subject.value.size() > ns.size()) out.push_back(t.subject);
  }
  return out;
}

}  // namespace

std::vector<Iri> OntologySpec::classes() const { return typed_in_namespace(graph, vocab::owl("Class"), base_iri); }

std::vector<Iri> OntologySpec::properties() const {
  return typed_in_namespace(graph, vocab::owl("ObjectProperty"), base_iri);
}

json sidecar(const OntologySpec& spec) {
  return {{"base_iri", spec.base_iri},
          {"class_count", spec.class_count},
          {"property_count", spec.property_count},
          {"axiom_count", spec.axiom_count},
          {"axiom_count_unit", "rdf_triples"},
          {"synthesized", spec.synthesized},
          {"pruned", spec.pruned},
          {"warnings", spec.warnings}};
}

Iri default_superclass(std::string_view concept_name, const RdfGraph& foundation) {
  const auto roots = foundation_roots(foundation);
  if (roots.empty()) throw ConfigError("foundation ontology declares no classes");
  auto ends_with = [&](std::string_view suffix) { return concept_name.ends_with(suffix); };
  Iri wanted = vocab::prov("Entity");
  if (ends_with("Process") || ends_with("Pipeline") || ends_with("Step") || ends_with("Training")) {
    wanted = vocab::prov("Activity");
  } else if (ends_with("Author") || ends_with("Annotator")) {
    wanted = vocab::prov("Agent");
  }
  if (std::find(roots.begin(), roots.end(), wanted) != roots.end()) return wanted;
  if (std::find(roots.begin(), roots.end(), vocab::prov("Entity")) != roots.end()) return vocab::prov("Entity");
  return roots.front();
}

namespace {

rdf::PrefixMap output_prefixes(std::string_view base_iri, std::string_view base_prefix, const RdfGraph& foundation) {
  rdf::PrefixMap out;
  for (const auto& [p, ns] : rdf::known_namespaces()) {
    if (ns != base_iri) out[p] = ns;
  }
  for (const auto& [p, ns] : foundation.prefixes()) {
    const bool mapped = std::any_of(out.begin(), out.end(), [&](const auto& kv) { return kv.second == ns; });
    if (!mapped && ns != base_iri && !out.count(p)) out[p] = ns;
  }
  out[std::string(base_prefix)] = std::string(base_iri);
  return out;
}

}  // namespace

OntologySpec normalize_ontology(std::string_view raw, const ConceptSet& concepts, std::string_view base_iri,
                                const RdfGraph& foundation, std::string_view base_prefix) {
  OntologySpec spec;
  spec.base_iri = std::string(base_iri);
  spec.base_prefix = std::string(base_prefix);
  const rdf::PrefixMap prefixes = output_prefixes(base_iri, base_prefix, foundation);

  RdfGraph draft;
  try {
    draft = rdf::repair_rdf_text(raw, prefixes).graph;
  } catch (const ParseError& e) {
    spec.warnings.push_back(std::string("draft unusable (") + e.what() + "); ontology synthesized from the concept set");
  }

  const auto iri_of = [&](const std::string& name) { return Iri{spec.base_iri + name}; };
  std::set<Iri> classes;
  std::set<Iri> relations;
  for (const auto& c : concepts.concepts) classes.insert(iri_of(c));
  for (const auto& r : concepts.relations) relations.insert(iri_of(r));
  const auto roots_vec = foundation_roots(foundation);
  const std::set<Iri> roots(roots_vec.begin(), roots_vec.end());
  const Iri ontology_iri{spec.base_iri};
  const Iri rdf_type = vocab::type();
  const Iri sub_class = vocab::rdfs("subClassOf");
  const Iri range = vocab::rdfs("range");
  const Iri domain = vocab::rdfs("domain");
  const Iri owl_class = vocab::owl("Class");
  const Iri owl_object_property = vocab::owl("ObjectProperty");

  auto is_class_target = [&](const Iri& o) { return classes.count(o) || roots.count(o); };
  auto is_annotation = [&](const Iri& p) {
    return p == vocab::rdfs("label") || p == vocab::rdfs("comment") || p == vocab::rdfs("seeAlso") ||
           p == Iri{"http://www.w3.org/2004/02/skos/core#definition"};
  };

  RdfGraph out(prefixes);
  std::set<std::string> pruned;
  std::size_t dropped = 0;
  for (const auto& t : draft.triples()) {
    const Iri* obj = std::get_if<Iri>(&t.object);
    const bool literal = obj == nullptr;
    bool keep = false;
    if (classes.count(t.subject)) {
      if (t.predicate == rdf_type) keep = obj && *obj == owl_class;
      else if (t.predicate == sub_class) keep = obj && is_class_target(*obj) && *obj != t.subject;
      else keep = literal && is_annotation(t.predicate);
    } else if (relations.count(t.subject)) {
      if (t.predicate == rdf_type) keep = obj && *obj == owl_object_property;
      else if (t.predicate == domain || t.predicate == range) keep = obj && is_class_target(*obj);
      else if (t.predicate == vocab::rdfs("subPropertyOf")) keep = obj && relations.count(*obj) && *obj != t.subject;
      else keep = literal && is_annotation(t.predicate);
    } else if (t.subject == ontology_iri) {
      keep = literal || (t.predicate == rdf_type && obj && *obj == vocab::owl("Ontology")) ||
             t.predicate == vocab::owl("imports");
    } else {
      if (!roots.count(t.subject) && t.predicate == rdf_type && obj &&
          (*obj == owl_class || *obj == owl_object_property || *obj == vocab::rdfs("Class") ||
           *obj == vocab::owl("DatatypeProperty"))) {
        pruned.insert(rdf::render_iri(t.subject, prefixes));
      }
    }
    if (keep) {
      out.insert(t);
    } else {
      ++dropped;
    }
  }
  spec.pruned.assign(pruned.begin(), pruned.end());
  if (dropped > 0) {
    spec.warnings.push_back("dropped " + std::to_string(dropped) + " draft triple(s) outside the concept set");
  }

  for (const auto& t : foundation.triples()) out.insert(t);
  out.insert({ontology_iri, rdf_type, vocab::owl("Ontology")});

  for (const auto& name : concepts.concepts) {
    const Iri c = iri_of(name);
    if (!out.contains({c, rdf_type, owl_class})) {
      spec.synthesized.push_back(name);
      out.insert({c, rdf_type, owl_class});
    }
    if (rdf::triples_matching(out, {c, sub_class, std::nullopt}).empty()) {
      out.insert({c, sub_class, default_superclass(name, foundation)});
    }
  }
  for (const auto& name : concepts.relations) {
    const Iri r = iri_of(name);
    if (!out.contains({r, rdf_type, owl_object_property})) {
      spec.synthesized.push_back(name);
      out.insert({r, rdf_type, owl_object_property});
    }
    if (name.size() > 3 && name.starts_with("has") && std::isupper(static_cast<unsigned char>(name[3]))) {
      const Iri target = iri_of(name.substr(3));
      if (classes.count(target) && rdf::triples_matching(out, {r, range, std::nullopt}).empty()) {
        out.insert({r, range, target});
      }
    }
  }

  // Every class must reach a foundation root through subClassOf; classes
  // caught in cycles get the default superclass.
  auto reaches_root = [&](const Iri& start) {
    std::set<Iri> seen{start};
    std::queue<Iri> todo;
    todo.push(start);
    while (!todo.empty()) {
      const Iri cur = todo.front();
      todo.pop();
      if (roots.count(cur)) return true;
      for (const auto& t : rdf::triples_matching(out, {cur, sub_class, std::nullopt})) {
        const Iri& next = std::get<Iri>(t.object);
        if (seen.insert(next).second) todo.push(next);
      }
    }
    return false;
  };
  for (const auto& name : concepts.concepts) {
    const Iri c = iri_of(name);
    if (!reaches_root(c)) out.insert({c, sub_class, default_superclass(name, foundation)});
  }

  if (draft.empty()) {
    spec.warnings.push_back("ontology fully synthesized from the concept set");
  }
  spec.graph = std::move(out);
  spec.class_count = static_cast<int>(classes.size());
  spec.property_count = static_cast<int>(relations.size());
  spec.axiom_count = static_cast<int>(spec.graph.size());
  return spec;
}

OntologySpec load_ontology(std::string_view turtle, std::string_view base_iri, std::string_view base_prefix) {
  OntologySpec spec;
  spec.graph = rdf::parse_turtle(turtle);
  spec.base_iri = std::string(base_iri);
  spec.base_prefix = std::string(base_prefix);
  spec.class_count = static_cast<int>(spec.classes().size());
  spec.property_count = static_cast<int>(spec.properties().size());
  spec.axiom_count = static_cast<int>(spec.graph.size());
  return spec;
}

}  // namespace kgpipe::onto
