#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "generators.hpp"
#include "kgpipe/corpus.hpp"
#include "kgpipe/text_util.hpp"

using namespace kgpipe;
using namespace kgpipe::corpus;

namespace {

// Reference tokenizer: splits on the whitespace code points directly.
std::vector<std::string> oracle_words(const std::string& s) {
  static const std::vector<std::string> kSpaces = {" ", "\t", "\n", "\r", "\v", "\f", "\xC2\xA0", "\xE2\x80\x83",
                                                   "\xE3\x80\x80", "\xC2\x85", "\xE2\x80\xA8", "\xE2\x80\xA9"};
  std::vector<std::string> out;
  std::string cur;
  for (std::size_t i = 0; i < s.size();) {
    std::size_t len = 0;
    for (const auto& sp : kSpaces) {
      if (s.compare(i, sp.size(), sp) == 0) {
        len = sp.size();
        break;
      }
    }
    if (len) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
      i += len;
    } else {
      cur.push_back(s[i++]);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

Document make_doc(const std::string& id, std::size_t tokens) {
  std::string body;
  for (std::size_t i = 0; i < tokens; ++i) body += (i ? " w" : "w") + std::to_string(i);
  return {id, id, body, id + ".txt"};
}

// Brute-force BM25 over raw chunk text.
std::vector<std::pair<std::string, std::size_t>> oracle_ranking(const std::vector<Chunk>& chunks,
                                                                 const std::string& query, std::size_t k) {
  auto terms_of = [](const std::string& s) {
    std::vector<std::string> t;
    std::string cur;
    for (unsigned char c : s) {
      if (std::isalnum(c) || c >= 0x80) {
        cur.push_back(static_cast<char>(std::tolower(c)));
      } else if (!cur.empty()) {
        t.push_back(cur);
        cur.clear();
      }
    }
    if (!cur.empty()) t.push_back(cur);
    return t;
  };
  std::vector<std::vector<std::string>> docs;
  double total = 0;
  for (const auto& c : chunks) {
    docs.push_back(terms_of(c.text));
    total += static_cast<double>(docs.back().size());
  }
  const double n = static_cast<double>(chunks.size());
  const double avg = total / n;
  std::vector<std::tuple<double, std::string, std::size_t>> scored;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    double s = 0;
    for (const auto& q : terms_of(query)) {
      const double tf = static_cast<double>(std::count(docs[i].begin(), docs[i].end(), q));
      if (tf == 0) continue;
      double df = 0;
      for (const auto& d : docs) df += std::find(d.begin(), d.end(), q) != d.end() ? 1 : 0;
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double norm = static_cast<double>(docs[i].size()) / avg;
      s += idf * tf * 2.2 / (tf + 1.2 * (0.25 + 0.75 * norm));
    }
    scored.emplace_back(-s, chunks[i].doc_id, chunks[i].index);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<std::pair<std::string, std::size_t>> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.emplace_back(std::get<1>(scored[i]), std::get<2>(scored[i]));
  return out;
}

}  // namespace

TEST_CASE("count_tokens") {
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens("a b  c") == 3);
  const auto paragraph = read_text_file(testing::fixture_path("corpus/birdsong-cnn.md"));
  CHECK(count_tokens(paragraph) == oracle_words(paragraph).size());
}

TEST_CASE("property: token counts match the reference split") {
  testing::Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    std::vector<std::string> words;
    const auto doc = testing::random_document(rng, rng() % 200, &words);
    REQUIRE(count_tokens(doc) == words.size());
    CHECK(oracle_words(doc) == words);
  }
}

TEST_CASE("ingest the fixture corpus") {
  const auto docs = ingest_corpus(testing::fixture_path("corpus"));
  REQUIRE(docs.size() == 5);
  std::set<std::string> ids;
  for (const auto& d : docs) ids.insert(d.doc_id);
  CHECK(ids.size() == 5);
  CHECK(ids.count("birdsong-cnn") == 1);
}

TEST_CASE("ingest errors") {
  testing::TempDir dir("ingest");
  std::ofstream(dir.path() / "empty.txt") << " \n\t";
  CHECK_THROWS_AS(ingest_document(dir.path() / "empty.txt"), PreconditionError);
  CHECK_THROWS_AS(ingest_document(dir.path() / "missing.txt"), IoError);
  std::vector<Document> dup = {make_doc("a", 3), make_doc("a", 4)};
  CHECK_THROWS_AS(check_unique_ids(dup), PreconditionError);
  CHECK(slugify("Bird Song CNN.md").find(' ') == std::string::npos);
}

TEST_CASE("chunk stride arithmetic") {
  const auto chunks = chunk_document(make_doc("d", 5000), 2500, 100);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].token_start == 0);
  CHECK(chunks[0].token_end == 2500);
  CHECK(chunks[1].token_start == 2400);
  CHECK(chunks[1].token_end == 4900);
  CHECK(chunks[2].token_start == 4800);
  CHECK(chunks[2].token_end == 5000);
  CHECK(chunk_document(make_doc("d", 300)).size() == 1);
  CHECK_THROWS_AS(chunk_document(make_doc("d", 10), 2500, 2500), PreconditionError);
  CHECK_THROWS_AS(chunk_document(make_doc("d", 10), 10, -1), PreconditionError);
}

TEST_CASE("property: chunks tile the token sequence") {
  testing::Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const int size = 2 + static_cast<int>(rng() % 60);
    const int overlap = static_cast<int>(rng() % static_cast<unsigned>(size));
    std::vector<std::string> words;
    const auto body = testing::random_document(rng, 1 + rng() % 400, &words);
    const auto chunks = chunk_document({"d", "d", body, "d.txt"}, size, overlap);
    REQUIRE(!chunks.empty());
    CHECK(chunks.front().token_start == 0);
    CHECK(chunks.back().token_end == words.size());
    for (std::size_t c = 0; c < chunks.size(); ++c) {
      CHECK(chunks[c].index == c);
      CHECK(chunks[c].token_end - chunks[c].token_start <= static_cast<std::size_t>(size));
      std::vector<std::string> expect(words.begin() + static_cast<std::ptrdiff_t>(chunks[c].token_start),
                                      words.begin() + static_cast<std::ptrdiff_t>(chunks[c].token_end));
      CHECK(oracle_words(chunks[c].text) == expect);
      if (c + 1 < chunks.size()) CHECK(chunks[c].token_end - chunks[c + 1].token_start == static_cast<std::size_t>(overlap));
    }
  }
}

TEST_CASE("index size is the sum of per-document chunk counts") {
  const auto docs = ingest_corpus(testing::fixture_path("corpus"));
  std::size_t expected = 0;
  for (const auto& d : docs) expected += chunk_document(d, 120, 20).size();
  const auto index = index_corpus(docs, 120, 20);
  CHECK(index.size() == expected);
  CHECK(index.statistics() == index_corpus(docs, 120, 20).statistics());
  CHECK(index_corpus({make_doc("one", 10)}).size() == 1);
  CHECK_THROWS_AS(index_corpus({}), PreconditionError);
}

TEST_CASE("retrieval matches brute-force scoring") {
  const auto docs = ingest_corpus(testing::fixture_path("corpus"));
  const auto index = index_corpus(docs, 120, 20);
  for (const std::string query : {"Which optimizer and learning rate were used for training?",
                                  "spectrogram audio recordings", "camera trap images annotated by volunteers",
                                  "zzzz unknown"}) {
    for (std::size_t k : {1u, 4u, 1000u}) {
      const auto hits = retrieve(index, query, k);
      const auto oracle = oracle_ranking(index.chunks(), query, k);
      REQUIRE(hits.size() == oracle.size());
      for (std::size_t i = 0; i < hits.size(); ++i) {
        CHECK(hits[i].chunk.doc_id == oracle[i].first);
        CHECK(hits[i].chunk.index == oracle[i].second);
        if (i) CHECK(hits[i - 1].score >= hits[i].score);
      }
    }
  }
  CHECK_THROWS_AS(retrieve(index, "x", 0), PreconditionError);
}

TEST_CASE("a chunk's own text ranks it first") {
  const auto index = index_corpus(ingest_corpus(testing::fixture_path("corpus")), 120, 20);
  for (std::size_t i = 0; i < index.size(); i += 7) {
    const auto& c = index.chunks()[i];
    const auto hits = retrieve(index, c.text, 1);
    CHECK(hits.at(0).chunk.doc_id == c.doc_id);
    CHECK(hits.at(0).chunk.index == c.index);
  }
}

TEST_CASE("document filter and determinism") {
  const auto index = index_corpus(ingest_corpus(testing::fixture_path("corpus")), 120, 20);
  const auto hits = retrieve(index, "model data training", 100, std::string("camera-trap"));
  CHECK(!hits.empty());
  for (const auto& h : hits) CHECK(h.chunk.doc_id == "camera-trap");
  const auto again = retrieve(index, "model data training", 100, std::string("camera-trap"));
  REQUIRE(again.size() == hits.size());
  for (std::size_t i = 0; i < hits.size(); ++i) CHECK(again[i].chunk.index == hits[i].chunk.index);
  CHECK(retrieve(index, "model", 3, std::string("nope")).empty());
}

TEST_CASE("chunk table lists offsets") {
  const auto chunks = chunk_document(make_doc("d", 30), 10, 2);
  const auto t = chunk_table(chunks);
  REQUIRE(t.size() == chunks.size());
  CHECK(t.at(1).at("token_start") == 8);
}
