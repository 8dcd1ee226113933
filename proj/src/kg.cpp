#include "kgpipe/kg.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "kgpipe/prompts.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::kg {

using rdf::Iri;
using rdf::Literal;
using rdf::RdfGraph;
using rdf::Triple;
namespace vocab = rdf::vocab;

std::string_view to_string(KgStatus status) { return status == KgStatus::kOk ? "ok" : "no_meaningful_kg"; }

std::string_view to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::kUndeclaredClass: return "undeclared_class";
    case IssueKind::kUndeclaredProperty: return "undeclared_property";
    case IssueKind::kUnspecified: return "unspecified";
    case IssueKind::kDuplicateValue: return "duplicate_value";
    case IssueKind::kUnlabeled: return "unlabeled";
    case IssueKind::kMultipleTypes: return "multiple_types";
  }
  return "unknown";
}

json to_json(const KgIndividual& ind) {
  return {{"iri", ind.iri.value},
          {"class", ind.class_iri.value},
          {"label", ind.label ? json(*ind.label) : json(nullptr)},
          {"source_doc", ind.source_doc}};
}

KgIndividual individual_from_json(const json& j) {
  KgIndividual ind;
  ind.iri = {j.at("iri").get<std::string>()};
  ind.class_iri = {j.at("class").get<std::string>()};
  if (!j.at("label").is_null()) ind.label = j.at("label").get<std::string>();
  ind.source_doc = j.at("source_doc").get<std::string>();
  return ind;
}

json result_summary(const KgBuildResult& result) {
  json inds = json::array();
  for (const auto& i : result.individuals) inds.push_back(to_json(i));
  return {{"status", std::string(to_string(result.status))},
          {"individuals", std::move(inds)},
          {"triple_count", result.graph.size()},
          {"diagnostic", result.diagnostic},
          {"repair", rdf::to_json(result.repair)}};
}

namespace {

bool is_ontology_term(const Iri& iri, const onto::OntologySpec& ontology) {
  return ontology.declares_class(iri) || ontology.declares_property(iri) || iri.value == ontology.base_iri;
}

// Ontology classes each subject is typed with.
std::map<Iri, std::vector<Iri>> ontology_types(const RdfGraph& graph, const onto::OntologySpec& ontology) {
  std::map<Iri, std::vector<Iri>> out;
  for (const auto& t : rdf::triples_matching(graph, {std::nullopt, vocab::type(), std::nullopt})) {
    const auto* cls = std::get_if<Iri>(&t.object);
    if (!cls || !ontology.declares_class(*cls) || is_ontology_term(t.subject, ontology)) continue;
    out[t.subject].push_back(*cls);
  }
  return out;
}

std::optional<std::string> first_label(const RdfGraph& graph, const Iri& subject) {
  for (const auto& t : rdf::triples_matching(graph, {subject, vocab::label(), std::nullopt})) {
    if (const auto* lit = std::get_if<Literal>(&t.object)) return lit->lexical;
  }
  return std::nullopt;
}

// n when `iri` is exactly <base><ClassLocal>_<n> with n a positive integer.
std::optional<long> conforming_number(const Iri& iri, const Iri& cls, const std::string& base) {
  const std::string prefix = base + rdf::local_name(cls) + "_";
  if (!iri.value.starts_with(prefix)) return std::nullopt;
  const std::string digits = iri.value.substr(prefix.size());
  if (digits.empty() || digits.size() > 9 || digits[0] == '0') return std::nullopt;
  if (!std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return std::nullopt;
  }
  return std::stol(digits);
}

}  // namespace

RdfGraph renumber_individuals(const RdfGraph& graph, const onto::OntologySpec& ontology) {
  const auto types = ontology_types(graph, ontology);
  std::map<Iri, std::set<long>> used;
  std::vector<std::pair<Iri, Iri>> to_rename;  // (individual, class)
  for (const auto& [subject, classes] : types) {
    if (classes.size() != 1) continue;
    if (auto n = conforming_number(subject, classes.front(), ontology.base_iri)) {
      used[classes.front()].insert(*n);
    } else {
      to_rename.emplace_back(subject, classes.front());
    }
  }
  if (to_rename.empty()) return graph;

  std::set<std::string> existing;
  for (const auto& t : graph.triples()) {
    existing.insert(t.subject.value);
    if (const auto* o = std::get_if<Iri>(&t.object)) existing.insert(o->value);
  }
  std::map<Iri, Iri> renamed;
  for (const auto& [subject, cls] : to_rename) {
    auto& taken = used[cls];
    long n = 1;
    std::string candidate;
    while (true) {
      candidate = ontology.base_iri + rdf::local_name(cls) + "_" + std::to_string(n);
      if (!taken.count(n) && !existing.count(candidate)) break;
      ++n;
    }
    taken.insert(n);
    existing.insert(candidate);
    renamed[subject] = Iri{candidate};
  }
  auto map_iri = [&](const Iri& i) {
    const auto it = renamed.find(i);
    return it == renamed.end() ? i : it->second;
  };
  RdfGraph out(graph.prefixes());
  for (const auto& t : graph.triples()) {
    Triple r{map_iri(t.subject), t.predicate, t.object};
    if (const auto* o = std::get_if<Iri>(&t.object)) r.object = map_iri(*o);
    out.insert(std::move(r));
  }
  return out;
}

std::vector<KgIndividual> enumerate_individuals(const RdfGraph& graph, const onto::OntologySpec& ontology,
                                                const std::string& doc_id) {
  std::vector<KgIndividual> out;
  for (const auto& [subject, classes] : ontology_types(graph, ontology)) {
    if (classes.size() != 1) continue;
    out.push_back({subject, classes.front(), first_label(graph, subject), doc_id});
  }
  return out;
}

KgBuildResult assemble_kg(std::string_view raw, const onto::OntologySpec& ontology, const std::string& doc_id) {
  KgBuildResult result;
  result.raw_text = std::string(raw);
  rdf::RdfGraph repaired;
  try {
    auto repaired_result = rdf::repair_rdf_text(raw, ontology.graph.prefixes());
    repaired = std::move(repaired_result.graph);
    result.repair = std::move(repaired_result.report);
  } catch (const ParseError& e) {
    result.status = KgStatus::kNoMeaningfulKg;
    result.diagnostic = e.what();
    return result;
  }
  result.graph = renumber_individuals(repaired, ontology);
  result.individuals = enumerate_individuals(result.graph, ontology, doc_id);
  if (result.individuals.empty()) {
    result.status = KgStatus::kNoMeaningfulKg;
    result.diagnostic = "recovered graph has no individuals typed with an ontology class";
  } else {
    result.status = KgStatus::kOk;
  }
  return result;
}

KgBuildResult build_kg(llm::Backend& backend, const std::vector<cq::CompetencyQuestion>& cqs,
                       const std::vector<answer::CQAnswer>& answers, const onto::OntologySpec& ontology,
                       const std::string& doc_id, const KgSettings& settings) {
  if (answers.empty()) throw PreconditionError("no CQ answers for document '" + doc_id + "'");
  std::map<std::string, const cq::CompetencyQuestion*> by_id;
  for (const auto& q : cqs) by_id[q.cq_id] = &q;
  std::vector<prompts::QuestionAnswer> qa;
  for (const auto& a : answers) {
    if (a.doc_id != doc_id) throw PreconditionError("answer for " + a.cq_id + " belongs to '" + a.doc_id + "'");
    if (!a.error.empty()) continue;
    const auto it = by_id.find(a.cq_id);
    if (it == by_id.end()) throw PreconditionError("answer references unknown CQ " + a.cq_id);
    qa.push_back({a.cq_id, it->second->text, a.clean_text});
  }
  if (qa.empty()) throw PreconditionError("every CQ answer for '" + doc_id + "' failed");

  llm::ChatRequest request;
  request.user_text = prompts::kg_population(settings.prompt_version, qa, rdf::serialize_turtle(ontology.graph),
                                             ontology.base_iri);
  request.params = settings.params;
  request.stage = llm::Stage::kKgBuild;
  return assemble_kg(backend.complete(request).text, ontology, doc_id);
}

std::size_t ValidationReport::count(IssueKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.kind == kind; }));
}

json to_json(const ValidationReport& report) {
  json issues = json::array();
  for (const auto& i : report.issues) {
    issues.push_back({{"kind", std::string(to_string(i.kind))}, {"subjects", i.subjects}, {"detail", i.detail}});
  }
  return {{"issue_count", report.issues.size()}, {"issues", std::move(issues)}};
}

ValidationReport validate_kg(const KgBuildResult& result, const onto::OntologySpec& ontology) {
  if (result.status != KgStatus::kOk) throw PreconditionError("cannot validate a KG without individuals");
  ValidationReport report;
  const RdfGraph& g = result.graph;
  const std::set<Iri> ignorable_types{vocab::owl("NamedIndividual"), vocab::owl("Thing")};
  const std::set<Iri> annotation{vocab::label(), vocab::rdfs("comment"), vocab::rdfs("seeAlso"), vocab::owl("sameAs")};

  for (const auto& t : rdf::triples_matching(g, {std::nullopt, vocab::type(), std::nullopt})) {
    const auto* cls = std::get_if<Iri>(&t.object);
    if (!cls || is_ontology_term(t.subject, ontology) || ignorable_types.count(*cls)) continue;
    if (!ontology.declares_class(*cls)) {
      report.issues.push_back({IssueKind::kUndeclaredClass, {t.subject.value}, cls->value});
    }
  }

  std::map<Iri, std::vector<std::string>> bad_predicates;
  for (const auto& t : g.triples()) {
    if (t.predicate == vocab::type() || annotation.count(t.predicate) || is_ontology_term(t.subject, ontology)) continue;
    if (!ontology.declares_property(t.predicate)) {
      auto& subjects = bad_predicates[t.predicate];
      if (std::find(subjects.begin(), subjects.end(), t.subject.value) == subjects.end()) {
        subjects.push_back(t.subject.value);
      }
    }
  }
  for (auto& [pred, subjects] : bad_predicates) {
    report.issues.push_back({IssueKind::kUndeclaredProperty, std::move(subjects), pred.value});
  }

  for (const auto& [subject, classes] : ontology_types(g, ontology)) {
    if (classes.size() > 1) {
      std::string detail;
      for (const auto& c : classes) detail += (detail.empty() ? "" : " ") + c.value;
      report.issues.push_back({IssueKind::kMultipleTypes, {subject.value}, detail});
    }
  }

  std::map<std::pair<Iri, std::string>, std::vector<std::string>> by_value;
  for (const auto& ind : result.individuals) {
    if (!ind.label) {
      // Hub individuals that only carry relations are fine without a label.
      bool has_relation = false;
      for (const auto& t : rdf::triples_matching(g, {ind.iri, std::nullopt, std::nullopt})) {
        has_relation = has_relation || (t.predicate != vocab::type() && std::holds_alternative<Iri>(t.object));
      }
      if (!has_relation) report.issues.push_back({IssueKind::kUnlabeled, {ind.iri.value}, ""});
      continue;
    }
    std::string norm = text::normalize_for_compare(*ind.label);
    while (!norm.empty() && norm.back() == '.') norm.pop_back();
    if (norm == "not specified") {
      report.issues.push_back({IssueKind::kUnspecified, {ind.iri.value}, *ind.label});
    }
    by_value[{ind.class_iri, norm}].push_back(ind.iri.value);
  }
  for (auto& [key, iris] : by_value) {
    if (iris.size() < 2) continue;
    report.issues.push_back({IssueKind::kDuplicateValue, std::move(iris), key.first.value + " '" + key.second + "'"});
  }
  return report;
}

json to_json(const std::vector<IndividualLink>& links) {
  json out = json::array();
  for (const auto& l : links) {
    out.push_back({{"individual", l.individual_iri}, {"cq_ids", l.cq_ids}, {"match_basis", l.match_basis}});
  }
  return out;
}

std::vector<IndividualLink> links_from_json(const json& j) {
  std::vector<IndividualLink> out;
  for (const auto& l : j) {
    out.push_back({l.at("individual").get<std::string>(), l.at("cq_ids").get<std::vector<std::string>>(),
                   l.at("match_basis").get<std::string>()});
  }
  return out;
}

std::vector<IndividualLink> link_individuals(const KgBuildResult& result, const std::vector<cq::CompetencyQuestion>& cqs) {
  if (result.status != KgStatus::kOk) throw PreconditionError("cannot link a KG without individuals");
  std::vector<IndividualLink> links;
  for (const auto& ind : result.individuals) {
    IndividualLink link{ind.iri.value, {}, text::decamelize(rdf::local_name(ind.class_iri))};
    for (const auto& q : cqs) {
      if (!link.match_basis.empty() && text::icontains(q.text, link.match_basis)) link.cq_ids.push_back(q.cq_id);
    }
    links.push_back(std::move(link));
  }
  return links;
}

}  // namespace kgpipe::kg
