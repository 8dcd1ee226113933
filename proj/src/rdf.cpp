#include "kgpipe/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <sstream>

namespace kgpipe::rdf {

namespace vocab {
Iri rdf(std::string_view local) { return {std::string(kRdf) + std::string(local)}; }
Iri rdfs(std::string_view local) { return {std::string(kRdfs) + std::string(local)}; }
Iri owl(std::string_view local) { return {std::string(kOwl) + std::string(local)}; }
Iri xsd(std::string_view local) { return {std::string(kXsd) + std::string(local)}; }
Iri prov(std::string_view local) { return {std::string(kProv) + std::string(local)}; }
Iri type() { return rdf("type"); }
Iri label() { return rdfs("label"); }
}  // namespace vocab

const PrefixMap& known_namespaces() {
  static const PrefixMap table{
      {"dlprov", std::string(vocab::kDlprov)}, {"owl", std::string(vocab::kOwl)},
      {"prov", std::string(vocab::kProv)},     {"rdf", std::string(vocab::kRdf)},
      {"rdfs", std::string(vocab::kRdfs)},     {"xsd", std::string(vocab::kXsd)},
  };
  return table;
}

void RdfGraph::merge(const RdfGraph& other) {
  triples_.insert(other.triples_.begin(), other.triples_.end());
  for (const auto& [p, ns] : other.prefixes_) prefixes_.emplace(p, ns);
}

TurtleSyntaxError::TurtleSyntaxError(const std::string& message, std::size_t line, std::size_t column)
    : ParseError("turtle syntax error at " + std::to_string(line) + ":" + std::to_string(column) + ": " +
                 message),
      line_(line),
      column_(column) {}

UndefinedPrefixError::UndefinedPrefixError(const std::string& prefix, std::size_t line, std::size_t column)
    : TurtleSyntaxError("undefined prefix '" + prefix + ":'", line, column), prefix_(prefix) {}

namespace {

bool is_pn_chars_base(unsigned char c) { return std::isalpha(c) || c >= 0x80; }
bool is_pn_chars(unsigned char c) { return is_pn_chars_base(c) || std::isdigit(c) || c == '_' || c == '-'; }
bool is_local_char(unsigned char c) { return is_pn_chars(c) || c == '.' || c == ':' || c == '%'; }

bool is_absolute_iri(std::string_view iri) {
  if (iri.empty() || !std::isalpha(static_cast<unsigned char>(iri[0]))) return false;
  for (std::size_t i = 1; i < iri.size(); ++i) {
    const auto c = static_cast<unsigned char>(iri[i]);
    if (c == ':') return true;
    if (!(std::isalnum(c) || c == '+' || c == '-' || c == '.')) return false;
  }
  return false;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

enum class Tok {
  kIriRef,
  kPName,
  kA,
  kString,
  kLangTag,
  kCaretCaret,
  kDot,
  kSemicolon,
  kComma,
  kAtPrefix,
  kAtBase,
  kSparqlPrefix,
  kSparqlBase,
  kNumber,
  kBoolean,
  kEof,
};

struct Token {
  Tok kind = Tok::kEof;
  std::string text;    // IRI / string value / lexical form / lang tag / pname prefix
  std::string local;   // pname local part
  std::string datatype;  // for numbers
  std::size_t line = 1;
  std::size_t column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_ws_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = col_;
    if (pos_ >= src_.size()) return tok;
    const char c = src_[pos_];
    const bool after_string = last_was_string_end_ == pos_;
    switch (c) {
      case '<':
        tok.kind = Tok::kIriRef;
        tok.text = read_iriref();
        return tok;
      case '"':
      case '\'':
        tok.kind = Tok::kString;
        tok.text = read_string();
        last_was_string_end_ = pos_;
        return tok;
      case '.':
        if (pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) break;
        advance();
        tok.kind = Tok::kDot;
        return tok;
      case ';':
        advance();
        tok.kind = Tok::kSemicolon;
        return tok;
      case ',':
        advance();
        tok.kind = Tok::kComma;
        return tok;
      case '^':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '^') {
          advance();
          advance();
          tok.kind = Tok::kCaretCaret;
          return tok;
        }
        fail("unexpected '^'");
      case '@': {
        advance();
        std::string word;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '-')) {
          word.push_back(src_[pos_]);
          advance();
        }
        if (after_string) {
          if (word.empty() || !std::isalpha(static_cast<unsigned char>(word[0]))) fail("malformed language tag");
          tok.kind = Tok::kLangTag;
          tok.text = word;
          return tok;
        }
        if (word == "prefix") {
          tok.kind = Tok::kAtPrefix;
          return tok;
        }
        if (word == "base") {
          tok.kind = Tok::kAtBase;
          return tok;
        }
        fail("unknown directive '@" + word + "'");
      }
      case '[':
      case '(':
        fail("blank nodes and collections are not supported");
      case '_':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == ':') fail("blank nodes are not supported");
        break;
      default:
        break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.') {
      return read_number(tok);
    }
    return read_name(tok);
  }

  [[noreturn]] void fail(const std::string& message) const { throw TurtleSyntaxError(message, line_, col_); }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string read_iriref() {
    advance();  // '<'
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated IRI");
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '>') {
        advance();
        return out;
      }
      if (c <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' || c == '^' || c == '`') {
        fail("invalid character in IRI");
      }
      if (c == '\\') {
        advance();
        out += read_unicode_escape();
        continue;
      }
      out.push_back(static_cast<char>(c));
      advance();
    }
  }

  std::string read_unicode_escape() {
    if (pos_ >= src_.size()) fail("dangling escape");
    const char kind = src_[pos_];
    int digits = 0;
    if (kind == 'u') digits = 4;
    if (kind == 'U') digits = 8;
    if (!digits) fail("invalid escape in IRI");
    advance();
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      if (pos_ >= src_.size() || !std::isxdigit(static_cast<unsigned char>(src_[pos_]))) fail("bad unicode escape");
      const char h = src_[pos_];
      cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(h)) ? h - '0'
                                                                                      : (std::tolower(h) - 'a' + 10));
      advance();
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("unicode escape out of range");
    std::string out;
    append_utf8(out, cp);
    return out;
  }

  std::string read_string() {
    const char q = src_[pos_];
    const bool is_long = pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q;
    advance();
    if (is_long) {
      advance();
      advance();
    }
    std::string out;
    while (true) {
      if (pos_ >= src_.size()) fail("unterminated string literal");
      const char c = src_[pos_];
      if (c == q) {
        if (!is_long) {
          advance();
          return out;
        }
        if (pos_ + 2 < src_.size() && src_[pos_ + 1] == q && src_[pos_ + 2] == q) {
          // A long string may end with up to two extra quote characters.
          std::size_t run = 0;
          while (pos_ + run < src_.size() && src_[pos_ + run] == q) ++run;
          for (std::size_t i = 0; i + 3 < run; ++i) out.push_back(q);
          for (std::size_t i = 0; i < run; ++i) advance();
          if (run > 5) fail("too many quotes closing long string");
          return out;
        }
        out.push_back(c);
        advance();
        continue;
      }
      if (!is_long && (c == '\n' || c == '\r')) fail("newline in short string literal");
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) fail("dangling escape");
        const char e = src_[pos_];
        switch (e) {
          case 't': out.push_back('\t'); advance(); break;
          case 'b': out.push_back('\b'); advance(); break;
          case 'n': out.push_back('\n'); advance(); break;
          case 'r': out.push_back('\r'); advance(); break;
          case 'f': out.push_back('\f'); advance(); break;
          case '"': out.push_back('"'); advance(); break;
          case '\'': out.push_back('\''); advance(); break;
          case '\\': out.push_back('\\'); advance(); break;
          case 'u':
          case 'U': out += read_unicode_escape(); break;
          default: fail(std::string("invalid string escape '\\") + e + "'");
        }
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  Token read_number(Token tok) {
    std::string lex;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        lex.push_back(src_[pos_]);
        advance();
        ++n;
      }
      return n;
    };
    if (src_[pos_] == '+' || src_[pos_] == '-') {
      lex.push_back(src_[pos_]);
      advance();
    }
    std::size_t int_digits = digits();
    bool decimal = false;
    bool exponent = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      lex.push_back('.');
      advance();
      digits();
      decimal = true;
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      lex.push_back(src_[pos_]);
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
        lex.push_back(src_[pos_]);
        advance();
      }
      if (digits() == 0) fail("malformed exponent");
      exponent = true;
    }
    if (int_digits == 0 && !decimal) fail("malformed number");
    if (pos_ < src_.size() && is_pn_chars(static_cast<unsigned char>(src_[pos_]))) fail("malformed number");
    tok.kind = Tok::kNumber;
    tok.text = lex;
    tok.datatype = std::string(vocab::kXsd) + (exponent ? "double" : decimal ? "decimal" : "integer");
    return tok;
  }

  Token read_name(Token tok) {
    std::string prefix;
    while (pos_ < src_.size() && src_[pos_] != ':') {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (!(is_pn_chars(c) || c == '.')) break;
      prefix.push_back(static_cast<char>(c));
      advance();
    }
    if (pos_ >= src_.size() || src_[pos_] != ':') {
      // Bare word; back off a trailing '.' that terminates a statement.
      while (!prefix.empty() && prefix.back() == '.') {
        prefix.pop_back();
        --pos_;
        --col_;
      }
      if (prefix == "a") {
        tok.kind = Tok::kA;
        return tok;
      }
      if (prefix == "true" || prefix == "false") {
        tok.kind = Tok::kBoolean;
        tok.text = prefix;
        tok.datatype = std::string(vocab::kXsd) + "boolean";
        return tok;
      }
      const std::string upper = [&] {
        std::string u = prefix;
        for (auto& ch : u) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        return u;
      }();
      if (upper == "PREFIX") {
        tok.kind = Tok::kSparqlPrefix;
        return tok;
      }
      if (upper == "BASE") {
        tok.kind = Tok::kSparqlBase;
        return tok;
      }
      if (prefix.empty()) fail(std::string("unexpected character '") + src_[pos_] + "'");
      fail("unexpected word '" + prefix + "'");
    }
    if (!prefix.empty() && (!is_pn_chars_base(static_cast<unsigned char>(prefix[0])) || prefix.back() == '.')) {
      fail("invalid prefix name '" + prefix + "'");
    }
    advance();  // ':'
    std::string local;
    while (pos_ < src_.size()) {
      const auto c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\\' && pos_ + 1 < src_.size()) {
        local.push_back(src_[pos_ + 1]);
        advance();
        advance();
        continue;
      }
      if (!is_local_char(c)) break;
      local.push_back(static_cast<char>(c));
      advance();
    }
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
      --col_;
    }
    tok.kind = Tok::kPName;
    tok.text = prefix;
    tok.local = local;
    return tok;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
  std::size_t last_was_string_end_ = static_cast<std::size_t>(-1);
};

class Parser {
 public:
  Parser(std::string_view text, const PrefixMap& base) : lexer_(text), graph_(base) { shift(); }

  RdfGraph run() {
    while (cur_.kind != Tok::kEof) statement();
    return std::move(graph_);
  }

 private:
  void shift() { cur_ = lexer_.next(); }

  [[noreturn]] void fail_here(const std::string& message) const {
    throw TurtleSyntaxError(message, cur_.line, cur_.column);
  }

  void expect(Tok kind, const char* what) {
    if (cur_.kind != kind) fail_here(std::string("expected ") + what);
    shift();
  }

  void statement() {
    switch (cur_.kind) {
      case Tok::kAtPrefix:
        shift();
        prefix_decl();
        expect(Tok::kDot, "'.' after @prefix");
        return;
      case Tok::kSparqlPrefix:
        shift();
        prefix_decl();
        return;
      case Tok::kAtBase:
        shift();
        base_decl();
        expect(Tok::kDot, "'.' after @base");
        return;
      case Tok::kSparqlBase:
        shift();
        base_decl();
        return;
      default:
        break;
    }
    const Iri subject = iri("subject");
    predicate_object_list(subject);
    expect(Tok::kDot, "'.' at end of statement");
  }

  void prefix_decl() {
    if (cur_.kind != Tok::kPName || !cur_.local.empty()) fail_here("expected prefix name ending in ':'");
    const std::string prefix = cur_.text;
    shift();
    if (cur_.kind != Tok::kIriRef) fail_here("expected namespace IRI");
    const std::string ns = resolve(cur_.text);
    shift();
    graph_.set_prefix(prefix, ns);
  }

  void base_decl() {
    if (cur_.kind != Tok::kIriRef) fail_here("expected base IRI");
    base_ = resolve(cur_.text);
    shift();
  }

  std::string resolve(const std::string& ref) const {
    if (is_absolute_iri(ref)) return ref;
    if (base_.empty()) fail_here("relative IRI <" + ref + "> without a base");
    if (ref.empty()) return base_;
    if (ref[0] == '#') return base_.substr(0, base_.find('#')) + ref;
    if (ref[0] == '/') {
      const auto auth = base_.find("://");
      const auto path = auth == std::string::npos ? std::string::npos : base_.find('/', auth + 3);
      return (path == std::string::npos ? base_ : base_.substr(0, path)) + ref;
    }
    const auto slash = base_.rfind('/');
    return (slash == std::string::npos ? base_ : base_.substr(0, slash + 1)) + ref;
  }

  Iri iri(const char* role) {
    if (cur_.kind == Tok::kIriRef) {
      Iri out{resolve(cur_.text)};
      shift();
      return out;
    }
    if (cur_.kind == Tok::kPName) {
      const auto it = graph_.prefixes().find(cur_.text);
      if (it == graph_.prefixes().end()) throw UndefinedPrefixError(cur_.text, cur_.line, cur_.column);
      Iri out{it->second + cur_.local};
      shift();
      return out;
    }
    fail_here(std::string("expected IRI for ") + role);
  }

  void predicate_object_list(const Iri& subject) {
    while (true) {
      Iri predicate;
      if (cur_.kind == Tok::kA) {
        predicate = vocab::type();
        shift();
      } else {
        predicate = iri("predicate");
      }
      object_list(subject, predicate);
      if (cur_.kind != Tok::kSemicolon) return;
      while (cur_.kind == Tok::kSemicolon) shift();
      if (cur_.kind == Tok::kDot) return;
    }
  }

  void object_list(const Iri& subject, const Iri& predicate) {
    while (true) {
      graph_.insert(Triple{subject, predicate, object()});
      if (cur_.kind != Tok::kComma) return;
      shift();
    }
  }

  Object object() {
    switch (cur_.kind) {
      case Tok::kString: {
        Literal lit{cur_.text, "", ""};
        shift();
        if (cur_.kind == Tok::kLangTag) {
          lit.language = cur_.text;
          shift();
        } else if (cur_.kind == Tok::kCaretCaret) {
          shift();
          lit.datatype = iri("datatype").value;
        }
        return lit;
      }
      case Tok::kNumber:
      case Tok::kBoolean: {
        Literal lit{cur_.text, "", cur_.datatype};
        shift();
        return lit;
      }
      default:
        return iri("object");
    }
  }

  Lexer lexer_;
  Token cur_;
  RdfGraph graph_;
  std::string base_;
};

bool valid_local_for_output(std::string_view local) {
  if (local.empty()) return true;
  const auto first = static_cast<unsigned char>(local.front());
  if (!(std::isalnum(first) || first == '_')) return false;
  for (const char ch : local) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || c == '_' || c == '-' || c == '.')) return false;
  }
  return local.back() != '.';
}

// Character-level scanner shared by the tolerant helpers: walks the text and
// reports top-level characters, skipping strings, IRIs and comments.
template <typename OnChar>
void scan_top_level(std::string_view text, OnChar&& on_char) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == '<') {
      const std::size_t start = i;
      ++i;
      while (i < text.size() && text[i] != '>' && text[i] != '\n' && text[i] != ' ') ++i;
      if (i < text.size() && text[i] == '>') {
        ++i;
        on_char(start, true);
        continue;
      }
      i = start + 1;
      on_char(start, false);
      continue;
    }
    if (c == '"' || c == '\'') {
      const std::size_t start = i;
      const bool is_long = i + 2 < text.size() && text[i + 1] == c && text[i + 2] == c;
      i += is_long ? 3 : 1;
      while (i < text.size()) {
        if (text[i] == '\\') {
          i += 2;
          continue;
        }
        if (!is_long && text[i] == '\n') break;
        if (text[i] == c) {
          if (!is_long) {
            ++i;
            break;
          }
          if (i + 2 < text.size() && text[i + 1] == c && text[i + 2] == c) {
            i += 3;
            while (i < text.size() && text[i] == c) ++i;
            break;
          }
        }
        ++i;
      }
      on_char(start, true);
      continue;
    }
    on_char(i, false);
    ++i;
  }
}

}  // namespace

RdfGraph parse_turtle(std::string_view text, const PrefixMap& base_prefixes) {
  return Parser(text, base_prefixes).run();
}

std::string render_iri(const Iri& iri, const PrefixMap& prefixes) {
  const std::string* best_prefix = nullptr;
  std::size_t best_len = 0;
  for (const auto& [prefix, ns] : prefixes) {
    if (ns.empty() || iri.value.size() < ns.size() || iri.value.compare(0, ns.size(), ns) != 0) continue;
    if (!valid_local_for_output(std::string_view(iri.value).substr(ns.size()))) continue;
    if (!best_prefix || ns.size() > best_len) {
      best_prefix = &prefix;
      best_len = ns.size();
    }
  }
  if (best_prefix) return *best_prefix + ":" + iri.value.substr(best_len);
  return "<" + iri.value + ">";
}

std::string render_literal(const Literal& literal, const PrefixMap& prefixes) {
  std::string out = "\"";
  for (const char ch : literal.lexical) {
    switch (ch) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          static constexpr char kHex[] = "0123456789ABCDEF";
          out += "\\u00";
          out.push_back(kHex[(ch >> 4) & 0xF]);
          out.push_back(kHex[ch & 0xF]);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
  if (!literal.language.empty()) {
    out += "@" + literal.language;
  } else if (!literal.datatype.empty()) {
    out += "^^" + render_iri(Iri{literal.datatype}, prefixes);
  }
  return out;
}

std::string serialize_turtle(const RdfGraph& graph) {
  std::ostringstream out;
  const auto& prefixes = graph.prefixes();
  for (const auto& [prefix, ns] : prefixes) out << "@prefix " << prefix << ": <" << ns << "> .\n";

  auto render_object = [&](const Object& o) {
    if (const auto* i = std::get_if<Iri>(&o)) return render_iri(*i, prefixes);
    return render_literal(std::get<Literal>(o), prefixes);
  };

  const Iri rdf_type = vocab::type();
  const auto& triples = graph.triples();
  auto it = triples.begin();
  while (it != triples.end()) {
    const Iri& subject = it->subject;
    // Triples are ordered by subject, so one subject's block is contiguous.
    std::map<Iri, std::vector<const Object*>> by_predicate;
    while (it != triples.end() && it->subject == subject) {
      by_predicate[it->predicate].push_back(&it->object);
      ++it;
    }
    std::vector<std::string> predicate_lines;
    auto emit = [&](const std::string& verb, const std::vector<const Object*>& objects) {
      std::string line = verb + " ";
      for (std::size_t k = 0; k < objects.size(); ++k) {
        if (k) line += ", ";
        line += render_object(*objects[k]);
      }
      predicate_lines.push_back(std::move(line));
    };
    if (auto t = by_predicate.find(rdf_type); t != by_predicate.end()) emit("a", t->second);
    for (const auto& [predicate, objects] : by_predicate) {
      if (predicate == rdf_type) continue;
      emit(render_iri(predicate, prefixes), objects);
    }
    out << "\n" << render_iri(subject, prefixes) << " ";
    for (std::size_t k = 0; k < predicate_lines.size(); ++k) {
      if (k) out << " ;\n    ";
      out << predicate_lines[k];
    }
    out << " .\n";
  }
  return out.str();
}

std::vector<Triple> triples_matching(const RdfGraph& graph, const TriplePattern& pattern) {
  std::vector<Triple> out;
  for (const auto& t : graph.triples()) {
    if (pattern.subject && t.subject != *pattern.subject) continue;
    if (pattern.predicate && t.predicate != *pattern.predicate) continue;
    if (pattern.object && t.object != *pattern.object) continue;
    out.push_back(t);
  }
  return out;
}

std::string local_name(const Iri& iri) {
  const auto pos = iri.value.find_last_of("#/");
  return pos == std::string::npos ? iri.value : iri.value.substr(pos + 1);
}

std::vector<std::string> split_statements(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  bool sparql_directive = false;
  bool at_statement_start = true;

  auto push = [&](std::size_t end) {
    std::string stmt(text.substr(start, end - start));
    const auto first = stmt.find_first_not_of(" \t\r\n");
    if (first != std::string::npos) {
      stmt = stmt.substr(first);
      while (!stmt.empty() && (stmt.back() == ' ' || stmt.back() == '\t' || stmt.back() == '\r' ||
                               stmt.back() == '\n')) {
        stmt.pop_back();
      }
      // Comment-only fragments are not statements.
      bool only_comments = true;
      for (const auto& line : [&] {
             std::vector<std::string> ls;
             std::size_t s = 0;
             while (s <= stmt.size()) {
               auto nl = stmt.find('\n', s);
               if (nl == std::string::npos) nl = stmt.size();
               ls.push_back(stmt.substr(s, nl - s));
               s = nl + 1;
             }
             return ls;
           }()) {
        const auto p = line.find_first_not_of(" \t\r");
        if (p != std::string::npos && line[p] != '#') only_comments = false;
      }
      if (!only_comments) out.push_back(std::move(stmt));
    }
    start = end;
    at_statement_start = true;
    sparql_directive = false;
  };

  scan_top_level(text, [&](std::size_t i, bool skipped_token) {
    if (i < start) return;
    const char c = text[i];
    if (skipped_token) {
      at_statement_start = false;
      return;
    }
    if (at_statement_start && !std::isspace(static_cast<unsigned char>(c))) {
      at_statement_start = false;
      const std::string_view rest = text.substr(i);
      auto starts_word = [&](std::string_view w) {
        if (rest.size() < w.size()) return false;
        for (std::size_t k = 0; k < w.size(); ++k) {
          if (std::toupper(static_cast<unsigned char>(rest[k])) != w[k]) return false;
        }
        return rest.size() == w.size() || std::isspace(static_cast<unsigned char>(rest[w.size()]));
      };
      sparql_directive = starts_word("PREFIX") || starts_word("BASE");
    }
    if (sparql_directive && c == '\n') {
      push(i + 1);
      return;
    }
    if (c == '.') {
      const bool at_end = i + 1 >= text.size();
      const char next = at_end ? ' ' : text[i + 1];
      if (at_end || std::isspace(static_cast<unsigned char>(next)) || next == '#') push(i + 1);
    }
  });
  push(text.size());
  return out;
}

std::vector<std::string> referenced_prefixes(std::string_view text) {
  std::vector<std::string> out;
  std::size_t token_start = 0;
  bool at_boundary = true;
  scan_top_level(text, [&](std::size_t i, bool skipped_token) {
    if (skipped_token) {
      at_boundary = false;
      return;
    }
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c) || c == ';' || c == ',' || c == '^' || c == '(' || c == '[') {
      at_boundary = true;
      return;
    }
    if (at_boundary) {
      token_start = i;
      at_boundary = false;
    }
    if (c == ':' && i >= token_start) {
      std::string candidate(text.substr(token_start, i - token_start));
      if (!candidate.empty() && candidate[0] == '@') return;
      bool valid = candidate.empty() || is_pn_chars_base(static_cast<unsigned char>(candidate[0]));
      for (const char ch : candidate) valid = valid && (is_pn_chars(static_cast<unsigned char>(ch)) || ch == '.');
      if (valid && (candidate.empty() || candidate.back() != '.') &&
          std::find(out.begin(), out.end(), candidate) == out.end()) {
        out.push_back(candidate);
      }
      // Colons later in the same token belong to the local part.
      token_start = std::string::npos;
    }
  });
  return out;
}

std::set<std::string> declared_prefixes(std::string_view text) {
  static const std::regex kDecl(R"((?:@prefix|(?:^|\s)[Pp][Rr][Ee][Ff][Ii][Xx])\s+([A-Za-z][A-Za-z0-9_.-]*)?:)");
  std::set<std::string> out;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), kDecl); it != std::sregex_iterator(); ++it) {
    out.insert((*it)[1].str());
  }
  return out;
}

}  // namespace kgpipe::rdf
