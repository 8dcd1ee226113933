#include <doctest.h>

#include "generators.hpp"
#include "kgpipe/kg.hpp"

using namespace kgpipe;
using namespace kgpipe::kg;
using rdf::Iri;

namespace {

const std::string kBase(onto::kDefaultBaseIri);

class FixedBackend : public llm::Backend {
 public:
  explicit FixedBackend(std::string text) : text_(std::move(text)) {}
  llm::ChatResponse complete(const llm::ChatRequest& r) override {
    last = r;
    return {text_, "fixed", ""};
  }
  std::string id() const override { return "fixed"; }
  llm::ChatRequest last;

 private:
  std::string text_;
};

onto::OntologySpec excerpt_ontology() {
  const auto cs = onto::make_concept_set({"DeepLearningPipeline", "DataFormat"}, {"hasDataFormat"});
  return onto::normalize_ontology("", cs, kBase, onto::default_foundation());
}

std::string excerpt_text() { return read_text_file(testing::fixture_path("kg_excerpt.ttl")); }

std::vector<cq::CompetencyQuestion> questions() {
  return {{"CQ1", "What data formats are used in the deep learning pipeline?", cq::CqStatus::kApproved,
           cq::Provenance::kLlm},
          {"CQ2", "Which Data Format is the most common?", cq::CqStatus::kEdited, cq::Provenance::kHuman},
          {"CQ3", "Who funded the work?", cq::CqStatus::kApproved, cq::Provenance::kLlm}};
}

std::vector<answer::CQAnswer> answers(const std::string& doc) {
  std::vector<answer::CQAnswer> out;
  for (const auto& q : questions()) {
    answer::CQAnswer a;
    a.cq_id = q.cq_id;
    a.doc_id = doc;
    a.raw_text = a.clean_text = "Audio spectrograms and image data.";
    a.answered = true;
    out.push_back(a);
  }
  return out;
}

}  // namespace

TEST_CASE("excerpt output yields the expected individuals") {
  FixedBackend backend(excerpt_text());
  const auto ontology = excerpt_ontology();
  const auto r = build_kg(backend, questions(), answers("birdsong-cnn"), ontology, "birdsong-cnn", {});
  REQUIRE(r.status == KgStatus::kOk);
  REQUIRE(r.individuals.size() == 3);
  std::map<std::string, std::optional<std::string>> labels;
  for (const auto& i : r.individuals) labels[rdf::local_name(i.iri)] = i.label;
  CHECK(labels.at("DataFormat_1") == std::optional<std::string>("Audio Spectrogram"));
  CHECK(labels.at("DataFormat_2") == std::optional<std::string>("Image data"));
  CHECK_FALSE(labels.at("DeepLearningPipeline_1").has_value());
  CHECK(r.graph.contains({{kBase + "DeepLearningPipeline_1"}, {kBase + "hasDataFormat"}, Iri{kBase + "DataFormat_2"}}));
  CHECK(backend.last.stage == llm::Stage::kKgBuild);
  const auto& prompt = backend.last.user_text;
  CHECK(prompt.find("What data formats are used") < prompt.find("owl:ObjectProperty"));
  CHECK(validate_kg(r, ontology).empty());
}

TEST_CASE("build_kg preconditions and prose output") {
  const auto ontology = excerpt_ontology();
  FixedBackend prose("I am sorry, the text does not describe a pipeline.");
  CHECK_THROWS_AS(build_kg(prose, questions(), {}, ontology, "d", {}), PreconditionError);
  CHECK_THROWS_AS(build_kg(prose, questions(), answers("other"), ontology, "d", {}), PreconditionError);
  const auto r = build_kg(prose, questions(), answers("d"), ontology, "d", {});
  CHECK(r.status == KgStatus::kNoMeaningfulKg);
  CHECK(r.individuals.empty());
  CHECK_THROWS_AS(validate_kg(r, ontology), PreconditionError);
  CHECK(result_summary(r).at("status") == "no_meaningful_kg");
}

TEST_CASE("triples without ontology-typed individuals are not meaningful") {
  const auto r = assemble_kg("dlprov:X rdfs:label 'loose' .", excerpt_ontology(), "d");
  CHECK(r.status == KgStatus::kNoMeaningfulKg);
}

TEST_CASE("non-conforming IRIs are renumbered preserving labels") {
  const auto ontology = excerpt_ontology();
  const auto r = assemble_kg(
      "dlprov:DataFormat_1 a dlprov:DataFormat ; rdfs:label 'A' .\n"
      "dlprov:spectrogram a dlprov:DataFormat ; rdfs:label 'B' .\n"
      "dlprov:pipe a dlprov:DeepLearningPipeline ; dlprov:hasDataFormat dlprov:spectrogram .\n",
      ontology, "d");
  REQUIRE(r.status == KgStatus::kOk);
  std::set<std::string> iris;
  for (const auto& i : r.individuals) iris.insert(rdf::local_name(i.iri));
  CHECK(iris == std::set<std::string>{"DataFormat_1", "DataFormat_2", "DeepLearningPipeline_1"});
  CHECK(r.graph.contains({{kBase + "DataFormat_2"}, rdf::vocab::label(), rdf::Literal{"B", "", ""}}));
  CHECK(r.graph.contains(
      {{kBase + "DeepLearningPipeline_1"}, {kBase + "hasDataFormat"}, Iri{kBase + "DataFormat_2"}}));
}

TEST_CASE("validation flags") {
  const auto ontology = excerpt_ontology();
  SUBCASE("not specified") {
    const auto r = assemble_kg("dlprov:DataFormat_1 a dlprov:DataFormat ; rdfs:label 'Not Specified' .", ontology, "d");
    CHECK(validate_kg(r, ontology).count(IssueKind::kUnspecified) == 1);
  }
  SUBCASE("duplicate value") {
    const auto r = assemble_kg(
        "dlprov:DataFormat_1 a dlprov:DataFormat ; rdfs:label 'Image data' .\n"
        "dlprov:DataFormat_2 a dlprov:DataFormat ; rdfs:label 'Image data' .\n",
        ontology, "d");
    const auto v = validate_kg(r, ontology);
    CHECK(v.count(IssueKind::kDuplicateValue) == 1);
    CHECK(v.issues.size() == 1);
  }
  SUBCASE("undeclared terms, unlabeled and multiple types") {
    const auto r = assemble_kg(
        "dlprov:DataFormat_1 a dlprov:DataFormat .\n"
        "dlprov:Thing_1 a dlprov:Gadget ; rdfs:label 'g' .\n"
        "dlprov:DataFormat_2 a dlprov:DataFormat , dlprov:DeepLearningPipeline ; dlprov:usesGpu dlprov:DataFormat_1 .\n",
        ontology, "d");
    const auto v = validate_kg(r, ontology);
    CHECK(v.count(IssueKind::kUnlabeled) == 1);
    CHECK(v.count(IssueKind::kUndeclaredClass) == 1);
    CHECK(v.count(IssueKind::kUndeclaredProperty) == 1);
    CHECK(v.count(IssueKind::kMultipleTypes) == 1);
    for (const auto& i : r.individuals) CHECK(rdf::local_name(i.iri) != "DataFormat_2");
    CHECK(to_json(v).at("issue_count") == v.issues.size());
  }
}

TEST_CASE("linking by decamelized class name") {
  FixedBackend backend(excerpt_text());
  const auto r = build_kg(backend, questions(), answers("d"), excerpt_ontology(), "d", {});
  const auto links = link_individuals(r, questions());
  REQUIRE(links.size() == 3);
  for (const auto& l : links) {
    if (l.individual_iri.ends_with("DataFormat_1")) {
      CHECK(l.match_basis == "data format");
      CHECK(l.cq_ids == std::vector<std::string>{"CQ1", "CQ2"});
    }
    if (l.individual_iri.ends_with("DeepLearningPipeline_1")) {
      CHECK(l.match_basis == "deep learning pipeline");
      CHECK(l.cq_ids == std::vector<std::string>{"CQ1"});
    }
  }
  const auto none = link_individuals(r, {questions()[2]});
  for (const auto& l : none) CHECK(l.cq_ids.empty());
  const auto round = links_from_json(to_json(links));
  CHECK(round.size() == links.size());
  CHECK(round[0].cq_ids == links[0].cq_ids);
}

TEST_CASE("individual IRIs are unique per class and document") {
  testing::Rng rng(21);
  const auto ontology = excerpt_ontology();
  for (int i = 0; i < 50; ++i) {
    std::string raw;
    for (int n = 1 + static_cast<int>(rng() % 8); n > 0; --n) {
      const bool fmt = rng() % 2;
      raw += "dlprov:" + std::string(fmt ? "fmt" : "DataFormat_") + std::to_string(rng() % 5) +
             " a dlprov:DataFormat ; rdfs:label 'v" + std::to_string(rng() % 3) + "' .\n";
    }
    const auto r = assemble_kg(raw, ontology, "d");
    std::set<std::string> seen;
    for (const auto& ind : r.individuals) {
      CHECK(seen.insert(ind.iri.value).second);
      CHECK(ind.iri.value.starts_with(kBase + "DataFormat_"));
      CHECK(rdf::triples_matching(r.graph, {ind.iri, rdf::vocab::type(), std::nullopt}).size() == 1);
    }
    CHECK(assemble_kg(raw, ontology, "d").graph == r.graph);
  }
}
