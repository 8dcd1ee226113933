#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgpipe/error.hpp"

namespace kgpipe::rdf {

// Absolute IRI.
struct Iri {
  std::string value;

  auto operator<=>(const Iri&) const = default;
};

struct Literal {
  std::string lexical;
  std::string language;  // empty when absent
  std::string datatype;  // absolute IRI, empty for plain literals

  auto operator<=>(const Literal&) const = default;
};

using Object = std::variant<Iri, Literal>;

struct Triple {
  Iri subject;
  Iri predicate;
  Object object;

  auto operator<=>(const Triple&) const = default;
};

using PrefixMap = std::map<std::string, std::string>;

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view kXsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kProv = "http://www.w3.org/ns/prov#";
inline constexpr std::string_view kDlprov = "https://w3id.org/dlprov/";

Iri rdf(std::string_view local);
Iri rdfs(std::string_view local);
Iri owl(std::string_view local);
Iri xsd(std::string_view local);
Iri prov(std::string_view local);

Iri type();
Iri label();
}  // namespace vocab

// Fixed namespace table used by repair to inject missing declarations.
const PrefixMap& known_namespaces();

// Set of triples plus the prefix map they were written with.
class RdfGraph {
 public:
  RdfGraph() = default;
  explicit RdfGraph(PrefixMap prefixes) : prefixes_(std::move(prefixes)) {}

  bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
  void erase(const Triple& t) { triples_.erase(t); }
  void merge(const RdfGraph& other);

  void set_prefix(const std::string& prefix, const std::string& ns) { prefixes_[prefix] = ns; }
  const PrefixMap& prefixes() const noexcept { return prefixes_; }
  const std::set<Triple>& triples() const noexcept { return triples_; }

  std::size_t size() const noexcept { return triples_.size(); }
  bool empty() const noexcept { return triples_.empty(); }
  bool contains(const Triple& t) const { return triples_.count(t) != 0; }

  friend bool operator==(const RdfGraph& a, const RdfGraph& b) { return a.triples_ == b.triples_; }

 private:
  std::set<Triple> triples_;
  PrefixMap prefixes_;
};

class TurtleSyntaxError : public ParseError {
 public:
  TurtleSyntaxError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UndefinedPrefixError : public TurtleSyntaxError {
 public:
  UndefinedPrefixError(const std::string& prefix, std::size_t line, std::size_t column);

  const std::string& prefix() const noexcept { return prefix_; }

 private:
  std::string prefix_;
};

// Flat Turtle subset: @prefix/@base (and SPARQL-style PREFIX/BASE), IRIs,
// prefixed names, `a`, `;` and `,` lists, string literals with optional
// language tag or datatype, and bare numeric/boolean literals. Blank nodes
// and collections are rejected.
RdfGraph parse_turtle(std::string_view text, const PrefixMap& base_prefixes = {});

// Deterministic rendering: prefixes sorted by name, subjects sorted by IRI,
// `a` first then predicates by IRI, objects joined with `,`.
std::string serialize_turtle(const RdfGraph& graph);

// Renders a single term using the graph prefixes when possible.
std::string render_iri(const Iri& iri, const PrefixMap& prefixes);
std::string render_literal(const Literal& literal, const PrefixMap& prefixes);

struct TriplePattern {
  std::optional<Iri> subject;
  std::optional<Iri> predicate;
  std::optional<Object> object;
};

// Matching triples in graph order (sorted by subject, predicate, object).
std::vector<Triple> triples_matching(const RdfGraph& graph, const TriplePattern& pattern);

// Local part of an IRI after the last '#' or '/'.
std::string local_name(const Iri& iri);

// Split text into statements (directives and `.`-terminated triples) without
// parsing them; quotes, IRIs and comments are respected.
std::vector<std::string> split_statements(std::string_view text);

// Prefix names referenced by prefixed names in `text`, in first-use order.
// Tolerant of syntax errors.
std::vector<std::string> referenced_prefixes(std::string_view text);

// Prefix names declared by @prefix/PREFIX directives in `text`.
std::set<std::string> declared_prefixes(std::string_view text);

}  // namespace kgpipe::rdf
