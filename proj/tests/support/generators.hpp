#pragma once

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "kgpipe/ontology.hpp"
#include "kgpipe/rdf.hpp"

namespace kgpipe::testing {

#ifndef KGPIPE_FIXTURE_DIR
#error "KGPIPE_FIXTURE_DIR must point at tests/fixtures"
#endif

inline std::filesystem::path fixture_path(const std::string& rel) {
  return std::filesystem::path(KGPIPE_FIXTURE_DIR) / rel;
}

using Rng = std::mt19937_64;

// Graph of up to `max_triples` triples over a handful of namespaces, with
// prefixed and full IRIs, escaped, tagged and typed literals.
rdf::RdfGraph random_graph(Rng& rng, std::size_t max_triples);

// `tokens` words joined by random runs of Unicode whitespace. Also reports
// the tokens so callers can check coverage independently.
std::string random_document(Rng& rng, std::size_t tokens, std::vector<std::string>* words = nullptr);

onto::ConceptSet random_concept_set(Rng& rng);

// Temporary directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Relative path -> file bytes for every regular file under `root`, minus
// files named in `skip`.
std::map<std::string, std::string> snapshot_tree(const std::filesystem::path& root,
                                                 const std::vector<std::string>& skip = {});

}  // namespace kgpipe::testing
