#include "kgpipe/prompts.hpp"

#include <sstream>

#include "kgpipe/error.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::prompts {

void check_version(std::string_view version) {
  if (version != "v1" && version != "v2") {
    throw ConfigError("unknown prompt version '" + std::string(version) + "' (expected v1 or v2)");
  }
}

std::string default_domain_prompt() {
  return "Deep learning pipelines reported in scientific publications: the provenance of their results, "
         "covering data sources, preprocessing, data formats, model architectures, hyperparameters, training, "
         "evaluation, software and hardware, post-processing, sensitive data handling, and data bias.";
}

std::string cq_generation(std::string_view domain_prompt) {
  std::ostringstream p;
  p << "TASK:\n"
    << "Write competency questions that an ontology for the domain below must be able to answer. "
    << "Keep the questions at an abstract level so they apply to any publication in the domain.\n"
    << "Return a numbered list with one question per line and nothing else.\n\n"
    << "DOMAIN:\n"
    << domain_prompt << "\n";
  return p.str();
}

std::string concept_extraction(const std::vector<std::string>& questions) {
  std::ostringstream p;
  p << "INSTRUCTIONS:\n"
    << "Read the competency questions and list every concept and every relationship between concepts that "
    << "they mention. The result seeds an ontology describing the provenance of deep learning pipelines.\n"
    << "If you cannot find any, say that you don't know instead of inventing terms.\n"
    << "Reply with exactly two lines, each a comma-separated list, in the format of the example.\n\n"
    << "EXAMPLE:\n"
    << "CQ1: Which optimizer was used to train the model?\n"
    << "CQ2: What data formats are used in the deep learning pipeline?\n"
    << "Concepts: Optimizer, Model, DataFormat, DeepLearningPipeline\n"
    << "Relations: hasOptimizer, hasModel, hasDataFormat\n\n"
    << "QUERY:\n";
  for (std::size_t i = 0; i < questions.size(); ++i) p << "CQ" << (i + 1) << ": " << questions[i] << "\n";
  return p.str();
}

std::string ontology_draft(const std::vector<std::string>& concepts, const std::vector<std::string>& relations,
                           std::string_view base_iri, std::string_view foundation_summary) {
  std::ostringstream p;
  p << "INSTRUCTIONS:\n"
    << "Build an OWL ontology in Turtle syntax from the concepts (classes) and relations (object properties) "
    << "below. Reuse the foundation ontology: make every new class a subclass of one of its classes or of "
    << "another new class. Use the base IRI " << base_iri << " for all new terms. "
    << "If you don't know, say so rather than making terms up. Output only the Turtle document.\n\n"
    << "FOUNDATION:\n"
    << foundation_summary << "\n\n"
    << "EXAMPLE:\n"
    << "Concepts: Optimizer, Model\n"
    << "Relations: hasOptimizer\n"
    << "@prefix owl: <http://www.w3.org/2002/07/owl#> .\n"
    << "@prefix prov: <http://www.w3.org/ns/prov#> .\n"
    << "@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .\n"
    << "@prefix ex: <" << base_iri << "> .\n"
    << "ex:Model a owl:Class ; rdfs:subClassOf prov:Entity .\n"
    << "ex:Optimizer a owl:Class ; rdfs:subClassOf prov:Entity .\n"
    << "ex:hasOptimizer a owl:ObjectProperty ; rdfs:domain ex:Model ; rdfs:range ex:Optimizer .\n\n"
    << "QUERY:\n"
    << "Concepts: " << text::join(concepts, ", ") << "\n"
    << "Relations: " << text::join(relations, ", ") << "\n";
  return p.str();
}

std::string cq_answer(std::string_view version, const std::vector<ContextPassage>& context,
                      std::string_view question) {
  check_version(version);
  std::ostringstream p;
  p << "CONTEXT:\n";
  for (const auto& passage : context) p << "[" << passage.label << "]\n" << passage.text << "\n\n";
  p << "INSTRUCTIONS:\n";
  if (version == "v1") {
    p << "Answer the query using only the context above. If the context does not contain the answer, "
      << "say that you don't know; do not make up an answer.\n\n";
  } else {
    p << "Answer the query in two or three sentences, quoting names, numbers and settings exactly as they "
      << "appear in the context above. If the context does not contain the answer, say that you don't know; "
      << "do not make up an answer.\n\n";
  }
  p << "QUERY: \"" << question << "\"\n";
  return p.str();
}

std::string kg_population(std::string_view version, const std::vector<QuestionAnswer>& qa,
                          std::string_view ontology_turtle, std::string_view base_iri) {
  check_version(version);
  std::ostringstream p;
  p << "INSTRUCTIONS:\n";
  if (version == "v1") {
    p << "Create a knowledge graph from the competency questions and answers below, using only their "
      << "content. Map every entity onto a class of the ontology that follows and relate entities with its "
      << "object properties. Output only Turtle.\n\n";
  } else {
    p << "Extract the key entities, relationships and concepts stated in the answers below and map them "
      << "onto the ontology that follows. Name each individual <Class>_<n> in the namespace " << base_iri
      << ", give it an rdfs:label with the value found in the answer, and leave out anything the answers do "
      << "not state. Output only Turtle.\n\n";
  }
  p << "QUESTIONS AND ANSWERS:\n";
  for (const auto& item : qa) {
    p << item.cq_id << ": " << item.question << "\n"
      << "Answer: " << item.answer << "\n\n";
  }
  p << "ONTOLOGY:\n" << ontology_turtle << "\n";
  return p.str();
}

std::string judge_answer(std::string_view ground_truth, std::string_view prediction, std::string_view question) {
  std::ostringstream p;
  p << "INSTRUCTIONS:\n"
    << "Act as an impartial judge. Rate from 0 to 10 how well the prediction agrees with the ground truth, "
    << "where 0 means no agreement and 10 means full agreement; use the question for context. Base the "
    << "rating only on the three texts below. If you cannot decide, say that you don't know.\n"
    << "Reply in this format:\n"
    << "Answer:::\n"
    << "score: <integer 0-10>\n"
    << "Explanation: <one or two sentences>\n\n"
    << "ground truth: \"" << ground_truth << "\"\n"
    << "prediction answer: \"" << prediction << "\"\n"
    << "question: \"" << question << "\"\n"
    << "Answer:::\n";
  return p.str();
}

std::string judge_individual(std::string_view strings, std::string_view match_text) {
  std::ostringstream p;
  p << "INSTRUCTIONS:\n"
    << "Act as an impartial judge. Reply True if the content of the strings appears in the match text and "
    << "False otherwise, using only the two texts below. If you cannot decide, say that you don't know.\n"
    << "Reply in this format:\n"
    << "Answer:::\n"
    << "Response: <True or False>\n"
    << "Explanation: <one sentence>\n\n"
    << "strings: \"" << strings << "\"\n"
    << "match text: \"" << match_text << "\"\n"
    << "Answer:::\n";
  return p.str();
}

}  // namespace kgpipe::prompts
