#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kgpipe/json_io.hpp"

namespace kgpipe::corpus {

inline constexpr int kDefaultChunkSize = 2500;
inline constexpr int kDefaultChunkOverlap = 100;
inline constexpr int kDefaultRetrievalDepth = 4;

struct Document {
  std::string doc_id;
  std::string title;
  std::string body;
  std::string source_path;
};

struct Chunk {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t token_start = 0;
  std::size_t token_end = 0;
  std::string text;
};

struct RetrievalHit {
  Chunk chunk;
  double score = 0.0;
};

// Token boundaries for chunking. The default splits on Unicode whitespace.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  // Byte spans of each token in `text`.
  virtual std::vector<std::pair<std::size_t, std::size_t>> spans(std::string_view text) const = 0;
  std::size_t count(std::string_view text) const { return spans(text).size(); }
};

class WhitespaceTokenizer : public Tokenizer {
 public:
  std::vector<std::pair<std::size_t, std::size_t>> spans(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer = default_tokenizer());

// Slug of the file stem: lowercase ASCII alphanumerics joined by '-'.
std::string slugify(std::string_view name);

// Reads one UTF-8 text/markdown file. Title is the first non-empty line with
// any markdown heading marks removed.
Document ingest_document(const std::filesystem::path& path);

// Every .txt/.md file in `dir`, sorted by filename; duplicate doc_ids are an
// error.
std::vector<Document> ingest_corpus(const std::filesystem::path& dir);

// Throws PreconditionError on duplicate ids.
void check_unique_ids(const std::vector<Document>& docs);

// Sliding windows of `chunk_size` tokens advancing by chunk_size - overlap.
std::vector<Chunk> chunk_document(const Document& doc, int chunk_size = kDefaultChunkSize,
                                  int overlap = kDefaultChunkOverlap,
                                  const Tokenizer& tokenizer = default_tokenizer());

// Lowercased alphanumeric terms used for lexical scoring.
std::vector<std::string> scoring_terms(std::string_view text);

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

class RetrievalIndex {
 public:
  RetrievalIndex(std::vector<Chunk> chunks, Bm25Params params = {});

  std::size_t size() const noexcept { return chunks_.size(); }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  double average_length() const noexcept { return avg_len_; }
  std::size_t document_frequency(const std::string& term) const;
  const Bm25Params& params() const noexcept { return params_; }

  // BM25 score of chunk `i` for the already-tokenized query.
  double score(std::size_t i, const std::vector<std::string>& query_terms) const;

  json statistics() const;

 private:
  std::vector<Chunk> chunks_;
  std::vector<std::map<std::string, std::size_t>> term_freqs_;
  std::vector<std::size_t> lengths_;
  std::map<std::string, std::size_t> doc_freq_;
  double avg_len_ = 0.0;
  Bm25Params params_;
};

RetrievalIndex index_corpus(const std::vector<Document>& docs, int chunk_size = kDefaultChunkSize,
                            int overlap = kDefaultChunkOverlap);

class Retriever {
 public:
  virtual ~Retriever() = default;
  virtual std::vector<RetrievalHit> retrieve(const RetrievalIndex& index, std::string_view query, std::size_t k,
                                             const std::optional<std::string>& doc_filter) const = 0;
};

// Top-k by BM25, ties broken by (doc_id, index).
std::vector<RetrievalHit> retrieve(const RetrievalIndex& index, std::string_view query, std::size_t k,
                                   const std::optional<std::string>& doc_filter = std::nullopt);

class Bm25Retriever : public Retriever {
 public:
  std::vector<RetrievalHit> retrieve(const RetrievalIndex& index, std::string_view query, std::size_t k,
                                     const std::optional<std::string>& doc_filter) const override {
    return corpus::retrieve(index, query, k, doc_filter);
  }
};

json chunk_table(const std::vector<Chunk>& chunks);

}  // namespace kgpipe::corpus
