#include "kgpipe/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "kgpipe/error.hpp"
#include "kgpipe/text_util.hpp"

namespace kgpipe::corpus {

namespace fs = std::filesystem;

std::vector<std::pair<std::size_t, std::size_t>> WhitespaceTokenizer::spans(std::string_view text) const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : text::whitespace_token_spans(text)) out.emplace_back(s.begin, s.end);
  return out;
}

const Tokenizer& default_tokenizer() {
  static const WhitespaceTokenizer tokenizer;
  return tokenizer;
}

std::size_t count_tokens(std::string_view text, const Tokenizer& tokenizer) { return tokenizer.count(text); }

std::string slugify(std::string_view name) {
  std::string out;
  bool pending_dash = false;
  for (const char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (pending_dash && !out.empty()) out.push_back('-');
      out.push_back(static_cast<char>(std::tolower(c)));
      pending_dash = false;
    } else {
      pending_dash = true;
    }
  }
  return out;
}

Document ingest_document(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("not a readable file: " + path.string());
  Document doc;
  doc.body = read_text_file(path);
  doc.source_path = path.string();
  doc.doc_id = slugify(path.stem().string());
  if (doc.doc_id.empty()) throw PreconditionError("cannot derive a document id from " + path.string());
  if (count_tokens(doc.body) == 0) throw PreconditionError("empty document: " + path.string());
  for (const auto& line : text::split_lines(doc.body)) {
    auto t = text::trim(line);
    while (!t.empty() && t.front() == '#') t.remove_prefix(1);
    t = text::trim(t);
    if (!t.empty()) {
      doc.title = std::string(t);
      break;
    }
  }
  return doc;
}

void check_unique_ids(const std::vector<Document>& docs) {
  std::set<std::string> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.doc_id).second) throw PreconditionError("duplicate document id: " + d.doc_id);
  }
}

std::vector<Document> ingest_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = text::to_lower_ascii(entry.path().extension().string());
    if (ext == ".txt" || ext == ".md") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Document> docs;
  for (const auto& f : files) docs.push_back(ingest_document(f));
  if (docs.empty()) throw PreconditionError("corpus directory has no .txt/.md files: " + dir.string());
  check_unique_ids(docs);
  return docs;
}

std::vector<Chunk> chunk_document(const Document& doc, int chunk_size, int overlap, const Tokenizer& tokenizer) {
  if (chunk_size < 1 || overlap < 0 || overlap >= chunk_size) {
    throw PreconditionError("chunking requires 0 <= overlap < chunk_size (got size " + std::to_string(chunk_size) +
                            ", overlap " + std::to_string(overlap) + ")");
  }
  const auto spans = tokenizer.spans(doc.body);
  const std::size_t n = spans.size();
  const auto size = static_cast<std::size_t>(chunk_size);
  const auto stride = static_cast<std::size_t>(chunk_size - overlap);
  std::vector<Chunk> chunks;
  if (n == 0) return chunks;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + size, n);
    Chunk c;
    c.doc_id = doc.doc_id;
    c.index = chunks.size();
    c.token_start = start;
    c.token_end = end;
    c.text = doc.body.substr(spans[start].first, spans[end - 1].second - spans[start].first);
    chunks.push_back(std::move(c));
    if (end == n) break;
  }
  return chunks;
}

std::vector<std::string> scoring_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::string cur;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      terms.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) terms.push_back(std::move(cur));
  return terms;
}

RetrievalIndex::RetrievalIndex(std::vector<Chunk> chunks, Bm25Params params)
    : chunks_(std::move(chunks)), params_(params) {
  std::size_t total = 0;
  for (const auto& c : chunks_) {
    std::map<std::string, std::size_t> tf;
    const auto terms = scoring_terms(c.text);
    for (const auto& t : terms) ++tf[t];
    for (const auto& [t, _] : tf) ++doc_freq_[t];
    lengths_.push_back(terms.size());
    total += terms.size();
    term_freqs_.push_back(std::move(tf));
  }
  avg_len_ = chunks_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(chunks_.size());
}

std::size_t RetrievalIndex::document_frequency(const std::string& term) const {
  const auto it = doc_freq_.find(term);
  return it == doc_freq_.end() ? 0 : it->second;
}

double RetrievalIndex::score(std::size_t i, const std::vector<std::string>& query_terms) const {
  const double n = static_cast<double>(chunks_.size());
  const double len = static_cast<double>(lengths_[i]);
  const double norm = avg_len_ > 0.0 ? len / avg_len_ : 0.0;
  double s = 0.0;
  for (const auto& term : query_terms) {
    const auto it = term_freqs_[i].find(term);
    if (it == term_freqs_[i].end()) continue;
    const double df = static_cast<double>(document_frequency(term));
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    const double tf = static_cast<double>(it->second);
    s += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * norm));
  }
  return s;
}

json RetrievalIndex::statistics() const {
  json per_chunk = json::array();
  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    per_chunk.push_back({{"doc_id", chunks_[i].doc_id}, {"index", chunks_[i].index}, {"length", lengths_[i]}});
  }
  return {{"chunks", chunks_.size()},
          {"average_length", avg_len_},
          {"vocabulary", doc_freq_.size()},
          {"per_chunk", std::move(per_chunk)}};
}

RetrievalIndex index_corpus(const std::vector<Document>& docs, int chunk_size, int overlap) {
  if (docs.empty()) throw PreconditionError("cannot index an empty corpus");
  std::vector<Chunk> all;
  for (const auto& d : docs) {
    auto chunks = chunk_document(d, chunk_size, overlap);
    all.insert(all.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
  }
  return RetrievalIndex(std::move(all));
}

std::vector<RetrievalHit> retrieve(const RetrievalIndex& index, std::string_view query, std::size_t k,
                                   const std::optional<std::string>& doc_filter) {
  if (k < 1) throw PreconditionError("retrieval depth k must be >= 1");
  const auto terms = scoring_terms(query);
  std::vector<RetrievalHit> hits;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const Chunk& c = index.chunks()[i];
    if (doc_filter && c.doc_id != *doc_filter) continue;
    hits.push_back({c, index.score(i, terms)});
  }
  std::stable_sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
    return a.chunk.index < b.chunk.index;
  });
  if (hits.size() > k) hits.resize(k);
  return hits;
}

json chunk_table(const std::vector<Chunk>& chunks) {
  json rows = json::array();
  for (const auto& c : chunks) {
    rows.push_back(
        {{"doc_id", c.doc_id}, {"index", c.index}, {"token_start", c.token_start}, {"token_end", c.token_end}});
  }
  return rows;
}

}  // namespace kgpipe::corpus
