#include "ldq/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <regex>

#include "ldq/errors.hpp"

namespace ldq {

namespace {

const std::string& xsd_string() {
  static const std::string iri = ns::xsd_("string");
  return iri;
}
const std::string& rdf_lang_string() {
  static const std::string iri = ns::rdf_("langString");
  return iri;
}
const std::string& rdf_type() {
  static const std::string iri = ns::rdf_("type");
  return iri;
}

// Decodes one code point starting at s[pos]; returns the byte length or 0
// when the sequence is not well-formed UTF-8.
std::size_t decode_utf8(std::string_view s, std::size_t pos, char32_t& cp) {
  auto byte = [&](std::size_t i) {
    return static_cast<unsigned char>(s[i]);
  };
  unsigned char b0 = byte(pos);
  if (b0 < 0x80) {
    cp = b0;
    return 1;
  }
  std::size_t len;
  char32_t min;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
    min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
    min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
    min = 0x10000;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

void append_uchar(std::string& out, unsigned char c) {
  char buffer[8];
  std::snprintf(buffer, sizeof buffer, "\\u%04X", c);
  out += buffer;
}

std::string escape_iri(std::string_view iri) {
  std::string out;
  out.reserve(iri.size() + 2);
  out += '<';
  for (char ch : iri) {
    switch (ch) {
      case '{':
      case '}':
      case '|':
      case '^':
      case '`':
      case '\\':
        append_uchar(out, static_cast<unsigned char>(ch));
        break;
      default:
        out += ch;
    }
  }
  out += '>';
  return out;
}

std::string escape_string(std::string_view lexical) {
  std::string out;
  out.reserve(lexical.size() + 2);
  out += '"';
  for (char ch : lexical) {
    auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      default:
        if (c < 0x20 || c == 0x7F) {
          append_uchar(out, c);
        } else {
          out += ch;
        }
    }
  }
  out += '"';
  return out;
}

bool is_alpha(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) { return is_alpha(c) || is_digit(c); }

}  // namespace

// ---------------------------------------------------------------------------
// Terms

bool is_valid_iri(std::string_view iri) {
  auto colon = iri.find(':');
  if (colon == std::string_view::npos || colon == 0) return false;
  if (!is_alpha(iri[0])) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    char c = iri[i];
    if (!is_alnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  for (char ch : iri) {
    auto c = static_cast<unsigned char>(ch);
    if (c <= 0x20 || c == 0x7F || ch == '<' || ch == '>' || ch == '"')
      return false;
  }
  return true;
}

bool is_valid_blank_label(std::string_view label) {
  if (label.empty() || !is_alnum(label[0])) return false;
  return std::all_of(label.begin(), label.end(), [](char c) {
    return is_alnum(c) || c == '.' || c == '_' || c == '-';
  });
}

bool is_valid_language_tag(std::string_view tag) {
  static const std::regex pattern("[a-zA-Z]+(-[a-zA-Z0-9]+)*");
  return std::regex_match(tag.begin(), tag.end(), pattern);
}

Term::Term(TermKind kind, std::string value, std::string datatype,
           std::string language)
    : kind_(kind),
      value_(std::move(value)),
      datatype_(std::move(datatype)),
      language_(std::move(language)) {
  switch (kind_) {
    case TermKind::Iri:
      text_ = escape_iri(value_);
      break;
    case TermKind::Blank:
      text_ = "_:" + value_;
      break;
    case TermKind::Literal:
      text_ = escape_string(value_);
      if (!language_.empty()) {
        text_ += '@';
        text_ += language_;
      } else if (datatype_ != xsd_string()) {
        text_ += "^^";
        text_ += escape_iri(datatype_);
      }
      break;
  }
}

Term Term::iri(std::string value) {
  if (!is_valid_iri(value)) throw TermError("invalid IRI: " + value);
  return Term(TermKind::Iri, std::move(value), {}, {});
}

Term Term::blank(std::string label) {
  if (!is_valid_blank_label(label))
    throw TermError("invalid blank node label: " + label);
  return Term(TermKind::Blank, std::move(label), {}, {});
}

Term Term::literal(std::string lexical, std::string datatype) {
  if (datatype.empty()) datatype = xsd_string();
  if (datatype == rdf_lang_string())
    throw TermError("rdf:langString literal requires a language tag");
  if (!is_valid_iri(datatype))
    throw TermError("invalid datatype IRI: " + datatype);
  validate_utf8(lexical);
  return Term(TermKind::Literal, std::move(lexical), std::move(datatype), {});
}

Term Term::lang_literal(std::string lexical, std::string language) {
  if (!is_valid_language_tag(language))
    throw TermError("invalid language tag: " + language);
  validate_utf8(lexical);
  return Term(TermKind::Literal, std::move(lexical), rdf_lang_string(),
              std::move(language));
}

Triple::Triple(Term s, Term p, Term o)
    : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (subject.is_literal()) throw TermError("literal in subject position");
  if (!predicate.is_iri()) throw TermError("predicate must be an IRI");
}

std::string Triple::text() const {
  return subject.text() + " " + predicate.text() + " " + object.text() + " .";
}

// ---------------------------------------------------------------------------
// Graph

bool Graph::add(const Triple& triple) {
  ++raw_count_;
  return triples_.insert(triple).second;
}

bool Graph::remove(const Triple& triple) {
  if (triples_.erase(triple) == 0) return false;
  --raw_count_;
  return true;
}

void Graph::set_raw_statement_count(std::uint64_t count) {
  if (count < triples_.size())
    throw TermError("raw statement count below distinct triple count");
  raw_count_ = count;
}

std::pair<Graph::const_iterator, Graph::const_iterator> Graph::subject_range(
    const Term& subject) const {
  return triples_.equal_range(subject);
}

std::vector<Triple> match(const Graph& g, const TriplePattern& pattern) {
  std::vector<Triple> out;
  auto [first, last] = pattern.subject ? g.subject_range(*pattern.subject)
                                       : std::pair{g.begin(), g.end()};
  for (auto it = first; it != last; ++it)
    if (pattern.matches(*it)) out.push_back(*it);
  return out;
}

void for_each_subject(
    const Graph& g,
    const std::function<void(const Term&, const std::vector<const Triple*>&)>&
        fn) {
  std::vector<const Triple*> group;
  for (const Triple& t : g) {
    if (!group.empty() && group.front()->subject != t.subject) {
      fn(group.front()->subject, group);
      group.clear();
    }
    group.push_back(&t);
  }
  if (!group.empty()) fn(group.front()->subject, group);
}

// ---------------------------------------------------------------------------
// UTF-8

void validate_utf8(std::string_view input) {
  std::size_t pos = 0;
  while (pos < input.size()) {
    char32_t cp;
    std::size_t len = decode_utf8(input, pos, cp);
    if (len == 0) throw EncodingError(pos);
    pos += len;
  }
}

// ---------------------------------------------------------------------------
// Shared lexer for N-Triples and the Turtle subset

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view input) : input_(input) {}

  bool at_end() const { return pos_ >= input_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < input_.size() ? input_[pos_ + ahead] : '\0';
  }
  char next() {
    char c = input_[pos_++];
    if (c == '\n') {
      ++line_;
      line_start_ = pos_;
    }
    return c;
  }
  std::size_t line() const { return line_; }
  std::size_t column() const { return pos_ - line_start_ + 1; }
  std::size_t pos() const { return pos_; }
  std::string_view rest() const { return input_.substr(pos_); }

  [[noreturn]] void fail(const std::string& reason) const {
    throw SyntaxError(line_, column(), reason);
  }

  // Skips spaces and tabs (and newlines/comments when `newlines`).
  void skip_ws(bool newlines) {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t') {
        next();
      } else if (newlines && (c == '\n' || c == '\r')) {
        next();
      } else if (newlines && c == '#') {
        while (!at_end() && peek() != '\n') next();
      } else {
        break;
      }
    }
  }

  void expect(char c, const char* what) {
    if (at_end() || peek() != c) fail(std::string("expected ") + what);
    next();
  }

  char32_t read_hex(int digits) {
    char32_t cp = 0;
    for (int i = 0; i < digits; ++i) {
      char c = at_end() ? '\0' : next();
      int v;
      if (c >= '0' && c <= '9') {
        v = c - '0';
      } else if (c >= 'a' && c <= 'f') {
        v = c - 'a' + 10;
      } else if (c >= 'A' && c <= 'F') {
        v = c - 'A' + 10;
      } else {
        fail("invalid hex digit in escape");
      }
      cp = cp * 16 + static_cast<char32_t>(v);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
      fail("escape is not a Unicode scalar value");
    return cp;
  }

  void read_uchar(std::string& out) {
    char kind = at_end() ? '\0' : next();
    if (kind == 'u') {
      append_utf8(out, read_hex(4));
    } else if (kind == 'U') {
      append_utf8(out, read_hex(8));
    } else {
      fail("invalid escape");
    }
  }

  std::string read_iriref() {
    expect('<', "'<'");
    std::string iri;
    while (true) {
      if (at_end()) fail("unterminated IRI");
      char c = next();
      if (c == '>') break;
      if (c == '\\') {
        read_uchar(iri);
        continue;
      }
      auto u = static_cast<unsigned char>(c);
      if (u <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' ||
          c == '|' || c == '^' || c == '`')
        fail("character not allowed in IRI");
      iri += c;
    }
    if (!is_valid_iri(iri)) fail("IRI is not absolute: " + iri);
    return iri;
  }

  std::string read_string() {
    expect('"', "'\"'");
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string literal");
      char c = next();
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("newline in string literal");
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      char e = peek();
      switch (e) {
        case 't':
          out += '\t';
          next();
          break;
        case 'b':
          out += '\b';
          next();
          break;
        case 'n':
          out += '\n';
          next();
          break;
        case 'r':
          out += '\r';
          next();
          break;
        case 'f':
          out += '\f';
          next();
          break;
        case '"':
          out += '"';
          next();
          break;
        case '\'':
          out += '\'';
          next();
          break;
        case '\\':
          out += '\\';
          next();
          break;
        default:
          read_uchar(out);
      }
    }
    return out;
  }

  std::string read_blank_label() {
    if (peek() != '_' || peek(1) != ':') fail("expected blank node");
    next();
    next();
    std::string label;
    while (!at_end()) {
      char c = peek();
      if (is_alnum(c) || c == '_' || c == '-' || c == '.') {
        label += next();
      } else {
        break;
      }
    }
    // A trailing '.' terminates the statement rather than the label.
    while (!label.empty() && label.back() == '.') {
      label.pop_back();
      --pos_;
    }
    if (!is_valid_blank_label(label)) fail("invalid blank node label");
    return label;
  }

  std::string read_langtag() {
    expect('@', "'@'");
    std::string tag;
    while (!at_end() && (is_alnum(peek()) || peek() == '-')) tag += next();
    if (!is_valid_language_tag(tag)) fail("invalid language tag");
    return tag;
  }

 private:
  std::string_view input_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
};

Term make_literal(Cursor& cur, std::string lexical, std::string datatype,
                  std::string language) {
  try {
    if (!language.empty())
      return Term::lang_literal(std::move(lexical), std::move(language));
    return Term::literal(std::move(lexical), std::move(datatype));
  } catch (const TermError& e) {
    cur.fail(e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// N-Triples

Graph parse_ntriples(std::string_view input) {
  validate_utf8(input);
  Graph g;
  Cursor cur(input);
  while (true) {
    cur.skip_ws(true);
    if (cur.at_end()) break;

    Term subject = [&] {
      if (cur.peek() == '<') return Term::iri(cur.read_iriref());
      if (cur.peek() == '_') return Term::blank(cur.read_blank_label());
      cur.fail("expected subject IRI or blank node");
    }();
    cur.skip_ws(false);
    if (cur.peek() != '<') cur.fail("expected predicate IRI");
    Term predicate = Term::iri(cur.read_iriref());
    cur.skip_ws(false);

    Term object = [&] {
      char c = cur.peek();
      if (c == '<') return Term::iri(cur.read_iriref());
      if (c == '_') return Term::blank(cur.read_blank_label());
      if (c != '"') cur.fail("expected object");
      std::string lexical = cur.read_string();
      if (cur.peek() == '@')
        return make_literal(cur, std::move(lexical), {}, cur.read_langtag());
      if (cur.peek() == '^') {
        cur.next();
        cur.expect('^', "'^^'");
        return make_literal(cur, std::move(lexical), cur.read_iriref(), {});
      }
      return make_literal(cur, std::move(lexical), {}, {});
    }();
    cur.skip_ws(false);
    cur.expect('.', "'.' terminating statement");
    cur.skip_ws(false);
    if (cur.peek() == '#') {
      while (!cur.at_end() && cur.peek() != '\n') cur.next();
    }
    if (!cur.at_end() && cur.peek() != '\n' && cur.peek() != '\r')
      cur.fail("unexpected content after statement");
    g.add(Triple(std::move(subject), std::move(predicate), std::move(object)));
  }
  return g;
}

std::string serialize_ntriples(const Graph& g) {
  std::string out;
  for (const Triple& t : g) {
    out += t.text();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Turtle subset

namespace {

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view input) : cur_(input) {}

  Graph read() {
    while (true) {
      cur_.skip_ws(true);
      if (cur_.at_end()) break;
      if (cur_.peek() == '@') {
        read_prefix();
      } else {
        read_triples();
      }
    }
    return std::move(graph_);
  }

 private:
  void read_prefix() {
    std::string_view rest = cur_.rest();
    if (rest.substr(0, 7) != "@prefix") cur_.fail("unsupported directive");
    for (int i = 0; i < 7; ++i) cur_.next();
    cur_.skip_ws(true);
    std::string prefix = read_prefix_name();
    cur_.expect(':', "':' after prefix name");
    cur_.skip_ws(true);
    std::string iri = cur_.read_iriref();
    cur_.skip_ws(true);
    cur_.expect('.', "'.' after @prefix");
    prefixes_[prefix] = iri;
  }

  std::string read_prefix_name() {
    std::string name;
    if (is_alpha(cur_.peek())) {
      while (!cur_.at_end() &&
             (is_alnum(cur_.peek()) || cur_.peek() == '_' ||
              cur_.peek() == '-' || cur_.peek() == '.'))
        name += cur_.next();
    }
    if (!name.empty() && name.back() == '.') cur_.fail("prefix ends with '.'");
    return name;
  }

  Term read_prefixed_name() {
    std::size_t line = cur_.line();
    std::string prefix = read_prefix_name();
    if (cur_.peek() != ':') cur_.fail("expected prefixed name");
    cur_.next();
    std::string local;
    while (!cur_.at_end()) {
      char c = cur_.peek();
      if (is_alnum(c) || c == '_' || c == '-' || c == ':' || c == '.') {
        local += c;
        cur_.next();
      } else {
        break;
      }
    }
    std::size_t trailing = 0;
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      ++trailing;
    }
    pending_dots_ = trailing;
    auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) throw UnknownPrefix(prefix, line);
    std::string iri = it->second + local;
    if (!is_valid_iri(iri)) cur_.fail("prefixed name expands to invalid IRI");
    return Term::iri(std::move(iri));
  }

  Term read_iri_or_pname() {
    if (cur_.peek() == '<') return Term::iri(cur_.read_iriref());
    return read_prefixed_name();
  }

  Term read_subject() {
    if (cur_.peek() == '_' && cur_.peek(1) == ':')
      return Term::blank(cur_.read_blank_label());
    return read_iri_or_pname();
  }

  Term read_verb() {
    if (cur_.peek() == 'a') {
      char after = cur_.peek(1);
      if (after == ' ' || after == '\t' || after == '\n' || after == '\r' ||
          after == '<' || after == '"' || after == '_') {
        cur_.next();
        return Term::iri(rdf_type());
      }
    }
    if (cur_.peek() == '_') cur_.fail("blank node not allowed as predicate");
    if (cur_.peek() == '"') cur_.fail("literal not allowed as predicate");
    return read_iri_or_pname();
  }

  Term read_object() {
    char c = cur_.peek();
    if (c == '"') {
      std::string lexical = cur_.read_string();
      if (cur_.peek() == '@')
        return make_literal(cur_, std::move(lexical), {}, cur_.read_langtag());
      if (cur_.peek() == '^') {
        cur_.next();
        cur_.expect('^', "'^^'");
        Term datatype = read_iri_or_pname();
        return make_literal(cur_, std::move(lexical), datatype.value(), {});
      }
      return make_literal(cur_, std::move(lexical), {}, {});
    }
    if (c == '_' && cur_.peek(1) == ':')
      return Term::blank(cur_.read_blank_label());
    if (c == '<' || is_alpha(c) || c == ':') return read_iri_or_pname();
    cur_.fail("unsupported object syntax");
  }

  // Consumes a '.' left over from a prefixed name like "x:b." first.
  bool take_dot() {
    if (pending_dots_ > 0) {
      --pending_dots_;
      return true;
    }
    if (cur_.peek() == '.') {
      cur_.next();
      return true;
    }
    return false;
  }

  void read_triples() {
    pending_dots_ = 0;
    Term subject = read_subject();
    bool first = true;
    while (true) {
      cur_.skip_ws(true);
      if (!first && pending_dots_ == 0 && cur_.peek() == '.') {
        // Trailing ';' before '.'.
        break;
      }
      first = false;
      Term verb = read_verb();
      while (true) {
        cur_.skip_ws(true);
        Term object = read_object();
        graph_.add(Triple(subject, verb, std::move(object)));
        if (pending_dots_ > 0) break;
        cur_.skip_ws(true);
        if (cur_.peek() == ',') {
          cur_.next();
          continue;
        }
        break;
      }
      if (pending_dots_ > 0) break;
      cur_.skip_ws(true);
      if (cur_.peek() == ';') {
        while (cur_.peek() == ';') {
          cur_.next();
          cur_.skip_ws(true);
        }
        continue;
      }
      break;
    }
    cur_.skip_ws(true);
    if (!take_dot()) cur_.fail("expected '.' terminating statement");
    if (pending_dots_ > 0) cur_.fail("unexpected '.'");
  }

  Cursor cur_;
  Graph graph_;
  PrefixMap prefixes_;
  std::size_t pending_dots_ = 0;
};

bool is_plain_local(std::string_view local) {
  if (local.empty()) return false;
  if (!is_alnum(local[0]) && local[0] != '_') return false;
  return std::all_of(local.begin(), local.end(), [](char c) {
    return is_alnum(c) || c == '_' || c == '-' || c == ':';
  });
}

std::string turtle_iri(const std::string& iri, const PrefixMap& prefixes) {
  // Longest matching namespace wins.
  const std::pair<const std::string, std::string>* best = nullptr;
  for (const auto& entry : prefixes) {
    const std::string& ns_iri = entry.second;
    if (iri.size() > ns_iri.size() && iri.compare(0, ns_iri.size(), ns_iri) == 0 &&
        is_plain_local(std::string_view(iri).substr(ns_iri.size()))) {
      if (!best || ns_iri.size() > best->second.size()) best = &entry;
    }
  }
  if (best) return best->first + ":" + iri.substr(best->second.size());
  return escape_iri(iri);
}

std::string turtle_term(const Term& t, const PrefixMap& prefixes) {
  switch (t.kind()) {
    case TermKind::Iri:
      return turtle_iri(t.value(), prefixes);
    case TermKind::Blank:
      return t.text();
    case TermKind::Literal: {
      std::string out = escape_string(t.value());
      if (!t.language().empty()) {
        out += "@" + t.language();
      } else if (t.datatype() != xsd_string()) {
        out += "^^" + turtle_iri(t.datatype(), prefixes);
      }
      return out;
    }
  }
  return t.text();
}

}  // namespace

Graph parse_turtle_subset(std::string_view input) {
  validate_utf8(input);
  return TurtleReader(input).read();
}

std::string serialize_turtle(const Graph& g, const PrefixMap& prefixes) {
  std::string out;
  for (const auto& [prefix, iri] : prefixes)
    out += "@prefix " + prefix + ": " + escape_iri(iri) + " .\n";
  if (!prefixes.empty() && !g.empty()) out += '\n';

  for_each_subject(g, [&](const Term& subject,
                          const std::vector<const Triple*>& triples) {
    out += turtle_term(subject, prefixes);
    const Term* last_predicate = nullptr;
    for (const Triple* t : triples) {
      if (last_predicate && *last_predicate == t->predicate) {
        out += " ,\n        " + turtle_term(t->object, prefixes);
        continue;
      }
      if (last_predicate) out += " ;";
      std::string verb = t->predicate.value() == rdf_type()
                             ? std::string("a")
                             : turtle_term(t->predicate, prefixes);
      out += "\n    " + verb + " " + turtle_term(t->object, prefixes);
      last_predicate = &t->predicate;
    }
    out += " .\n";
  });
  return out;
}

const PrefixMap& standard_prefixes() {
  static const PrefixMap prefixes = {
      {"rdf", std::string(ns::rdf)},   {"rdfs", std::string(ns::rdfs)},
      {"xsd", std::string(ns::xsd)},   {"owl", std::string(ns::owl)},
      {"dqv", std::string(ns::dqv)},   {"eldv", std::string(ns::eldv)},
  };
  return prefixes;
}

// ---------------------------------------------------------------------------
// Datatypes

bool is_numeric_datatype(std::string_view datatype) {
  static const std::set<std::string, std::less<>> numeric = [] {
    std::set<std::string, std::less<>> s;
    for (const char* local :
         {"integer", "decimal", "double", "float", "long", "int", "short",
          "byte", "nonNegativeInteger", "positiveInteger", "negativeInteger",
          "nonPositiveInteger", "unsignedLong", "unsignedInt",
          "unsignedShort", "unsignedByte"})
      s.insert(ns::xsd_(local));
    return s;
  }();
  return numeric.count(datatype) != 0;
}

namespace {

bool is_integer_lexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
}

bool is_decimal_lexical(std::string_view s) {
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) s.remove_prefix(1);
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  if (whole.empty() && frac.empty()) return false;
  return std::all_of(whole.begin(), whole.end(), is_digit) &&
         std::all_of(frac.begin(), frac.end(), is_digit);
}

bool is_double_lexical(std::string_view s) {
  if (s == "INF" || s == "-INF" || s == "+INF" || s == "NaN") return true;
  auto e = s.find_first_of("eE");
  if (e == std::string_view::npos) return is_decimal_lexical(s);
  return is_decimal_lexical(s.substr(0, e)) &&
         is_integer_lexical(s.substr(e + 1));
}

}  // namespace

bool lexical_conforms(std::string_view lexical, std::string_view datatype) {
  if (datatype.substr(0, ns::xsd.size()) != ns::xsd) return true;
  std::string_view local = datatype.substr(ns::xsd.size());
  if (local == "decimal") return is_decimal_lexical(lexical);
  if (local == "double" || local == "float") return is_double_lexical(lexical);
  if (local == "boolean")
    return lexical == "true" || lexical == "false" || lexical == "1" ||
           lexical == "0";
  if (local == "dateTime") {
    static const std::regex pattern(
        R"(-?\d{4,}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})?)");
    return std::regex_match(lexical.begin(), lexical.end(), pattern);
  }
  if (local == "date") {
    static const std::regex pattern(R"(-?\d{4,}-\d{2}-\d{2}(Z|[+-]\d{2}:\d{2})?)");
    return std::regex_match(lexical.begin(), lexical.end(), pattern);
  }
  if (is_numeric_datatype(datatype)) {
    if (!is_integer_lexical(lexical)) return false;
    bool negative = lexical[0] == '-';
    bool zero = lexical.find_first_not_of("+-0") == std::string_view::npos;
    if (local == "nonNegativeInteger" || local.substr(0, 8) == "unsigned")
      return !negative || zero;
    if (local == "positiveInteger") return !negative && !zero;
    if (local == "negativeInteger") return negative && !zero;
    if (local == "nonPositiveInteger") return negative || zero;
    return true;
  }
  return true;
}

}  // namespace ldq
