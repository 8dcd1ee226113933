#include "generators.hpp"

#include <algorithm>
#include <atomic>
#include <unistd.h>

#include "kgpipe/json_io.hpp"

namespace kgpipe::testing {

namespace fs = std::filesystem;

namespace {

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

int roll(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

std::string random_local(Rng& rng) {
  static const std::vector<std::string> kStems = {"Model", "Dataset", "run", "Step", "x", "Format", "a1", "B_2",
                                                  "data-set", "Layer"};
  std::string s = pick(rng, kStems);
  if (roll(rng, 0, 1)) s += std::to_string(roll(rng, 0, 99));
  return s;
}

rdf::Iri random_iri(Rng& rng) {
  static const std::vector<std::string> kNamespaces = {
      "https://w3id.org/dlprov/", "http://www.w3.org/ns/prov#", "http://example.org/kg/", "urn:test:",
      "http://www.w3.org/2000/01/rdf-schema#"};
  const std::string& ns = pick(rng, kNamespaces);
  std::string local = random_local(rng);
  // Occasionally a local part that cannot be written as a prefixed name.
  if (roll(rng, 0, 9) == 0) local += "/path.part";
  return {ns + local};
}

rdf::Literal random_literal(Rng& rng) {
  static const std::vector<std::string> kPieces = {"plain", "with space", "quote \" inside", "back\\slash", "tab\t",
                                                   "new\nline", "caf\xC3\xA9", "\xE2\x9C\x93 check", "'single'",
                                                   "", "42", "3.14", "ctrl\x01"};
  rdf::Literal lit;
  for (int i = roll(rng, 1, 3); i > 0; --i) lit.lexical += pick(rng, kPieces);
  switch (roll(rng, 0, 3)) {
    case 0: break;
    case 1: lit.language = roll(rng, 0, 1) ? "en" : "de-CH"; break;
    case 2: lit.datatype = "http://www.w3.org/2001/XMLSchema#string"; break;
    default: lit.datatype = "http://example.org/kg/customType"; break;
  }
  return lit;
}

}  // namespace

rdf::RdfGraph random_graph(Rng& rng, std::size_t max_triples) {
  rdf::RdfGraph g;
  g.set_prefix("dlprov", "https://w3id.org/dlprov/");
  g.set_prefix("prov", "http://www.w3.org/ns/prov#");
  g.set_prefix("rdfs", "http://www.w3.org/2000/01/rdf-schema#");
  g.set_prefix("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#");
  if (roll(rng, 0, 1)) g.set_prefix("ex", "http://example.org/kg/");
  const std::size_t n = std::uniform_int_distribution<std::size_t>(1, max_triples)(rng);
  std::vector<rdf::Iri> subjects;
  for (int i = roll(rng, 1, 6); i > 0; --i) subjects.push_back(random_iri(rng));
  for (std::size_t i = 0; i < n; ++i) {
    rdf::Triple t;
    t.subject = pick(rng, subjects);
    const int kind = roll(rng, 0, 3);
    t.predicate = kind == 0 ? rdf::vocab::type() : random_iri(rng);
    if (kind == 0 || kind == 1) {
      t.object = roll(rng, 0, 1) ? pick(rng, subjects) : random_iri(rng);
    } else {
      t.object = random_literal(rng);
    }
    g.insert(std::move(t));
  }
  return g;
}

std::string random_document(Rng& rng, std::size_t tokens, std::vector<std::string>* words) {
  static const std::vector<std::string> kWords = {"spectrogram", "model", "data", "caf\xC3\xA9", "x", "CNN",
                                                  "2,500", "layer.", "\xE2\x9C\x93", "bird-song", "(test)"};
  static const std::vector<std::string> kSpaces = {" ", " ", " ", "\n", "\t", "  ", "\r\n", "\xC2\xA0",
                                                   "\xE2\x80\x83", "\xE3\x80\x80", "\n\n"};
  std::string out;
  if (roll(rng, 0, 3) == 0) out += pick(rng, kSpaces);
  for (std::size_t i = 0; i < tokens; ++i) {
    if (i) out += pick(rng, kSpaces);
    std::string w = pick(rng, kWords);
    if (roll(rng, 0, 4) == 0) w += std::to_string(i);
    out += w;
    if (words) words->push_back(w);
  }
  if (roll(rng, 0, 3) == 0) out += pick(rng, kSpaces);
  return out;
}

onto::ConceptSet random_concept_set(Rng& rng) {
  static const std::vector<std::string> kWords = {"data", "model", "format", "training", "process", "pipeline",
                                                  "author", "optimizer", "layer", "bias", "step", "annotator",
                                                  "source", "metric", "rate", "hardware", "image"};
  std::vector<std::string> concepts;
  std::vector<std::string> relations;
  for (int i = roll(rng, 1, 12); i > 0; --i) {
    std::string name;
    for (int k = roll(rng, 1, 3); k > 0; --k) name += (name.empty() ? "" : " ") + pick(rng, kWords);
    concepts.push_back(name);
  }
  for (int i = roll(rng, 0, 10); i > 0; --i) {
    if (roll(rng, 0, 2) > 0) {
      relations.push_back("has " + pick(rng, concepts));
    } else {
      relations.push_back(pick(rng, kWords) + " by");
    }
  }
  return onto::make_concept_set(concepts, relations);
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("kgpipe-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::map<std::string, std::string> snapshot_tree(const fs::path& root, const std::vector<std::string>& skip) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    const std::string name = e.path().filename().string();
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    out[fs::relative(e.path(), root).generic_string()] = read_text_file(e.path());
  }
  return out;
}

}  // namespace kgpipe::testing
