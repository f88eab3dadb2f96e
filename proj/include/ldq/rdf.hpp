#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ldq {

namespace ns {
inline constexpr std::string_view rdf =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view xsd = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view owl = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view dqv = "http://www.w3.org/ns/dqv#";
inline constexpr std::string_view eldv = "urn:eldv#";

inline std::string rdf_(std::string_view local) {
  return std::string(rdf) + std::string(local);
}
inline std::string rdfs_(std::string_view local) {
  return std::string(rdfs) + std::string(local);
}
inline std::string xsd_(std::string_view local) {
  return std::string(xsd) + std::string(local);
}
inline std::string owl_(std::string_view local) {
  return std::string(owl) + std::string(local);
}
inline std::string dqv_(std::string_view local) {
  return std::string(dqv) + std::string(local);
}
inline std::string eldv_(std::string_view local) {
  return std::string(eldv) + std::string(local);
}
}  // namespace ns

enum class TermKind : std::uint8_t { Iri, Blank, Literal };

// An RDF term. Immutable; equality and ordering follow the canonical
// N-Triples text, which is computed once at construction.
class Term {
 public:
  static Term iri(std::string value);
  static Term blank(std::string label);
  // Plain literals default to xsd:string.
  static Term literal(std::string lexical, std::string datatype = {});
  static Term lang_literal(std::string lexical, std::string language);

  TermKind kind() const { return kind_; }
  bool is_iri() const { return kind_ == TermKind::Iri; }
  bool is_blank() const { return kind_ == TermKind::Blank; }
  bool is_literal() const { return kind_ == TermKind::Literal; }

  // IRI string, blank label, or literal lexical form.
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::string& language() const { return language_; }

  // N-Triples surface syntax.
  const std::string& text() const { return text_; }

  friend bool operator==(const Term& a, const Term& b) {
    return a.text_ == b.text_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    return a.text_ <=> b.text_;
  }

 private:
  Term(TermKind kind, std::string value, std::string datatype,
       std::string language);

  TermKind kind_;
  std::string value_;
  std::string datatype_;
  std::string language_;
  std::string text_;
};

bool is_valid_iri(std::string_view iri);
bool is_valid_blank_label(std::string_view label);
bool is_valid_language_tag(std::string_view tag);

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  // Validates the positional constraints; throws TermError.
  Triple(Term s, Term p, Term o);

  friend bool operator==(const Triple&, const Triple&) = default;
  friend std::strong_ordering operator<=>(const Triple& a, const Triple& b) {
    if (auto c = a.subject <=> b.subject; c != 0) return c;
    if (auto c = a.predicate <=> b.predicate; c != 0) return c;
    return a.object <=> b.object;
  }

  // "<s> <p> <o> ."
  std::string text() const;
};

// Orders triples; also compares against a bare subject term so that a
// subject's statements can be found with lower_bound.
struct TripleOrder {
  using is_transparent = void;
  bool operator()(const Triple& a, const Triple& b) const { return a < b; }
  bool operator()(const Triple& a, const Term& subject) const {
    return a.subject < subject;
  }
  bool operator()(const Term& subject, const Triple& b) const {
    return subject < b.subject;
  }
};

// A set of triples plus the number of statements seen at ingestion time.
class Graph {
 public:
  using TripleSet = std::set<Triple, TripleOrder>;
  using const_iterator = TripleSet::const_iterator;

  Graph() = default;

  // Records one ingested statement. Returns false when it was a duplicate.
  bool add(const Triple& triple);
  bool add(Term s, Term p, Term o) {
    return add(Triple(std::move(s), std::move(p), std::move(o)));
  }
  // Removes a triple; the duplicate surplus (raw - size) is preserved.
  bool remove(const Triple& triple);
  bool contains(const Triple& triple) const {
    return triples_.count(triple) != 0;
  }

  const TripleSet& triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  const_iterator begin() const { return triples_.begin(); }
  const_iterator end() const { return triples_.end(); }

  std::uint64_t raw_statement_count() const { return raw_count_; }
  // Throws TermError when count < size().
  void set_raw_statement_count(std::uint64_t count);
  // Drops the duplicate surplus: raw count becomes size().
  void compact() { raw_count_ = triples_.size(); }

  // Iterator range of every triple whose subject is `subject`.
  std::pair<const_iterator, const_iterator> subject_range(
      const Term& subject) const;

  std::optional<std::string> graph_iri;

  // Set equality on triples; ingestion counters and graph IRI are metadata.
  friend bool operator==(const Graph& a, const Graph& b) {
    return a.triples_ == b.triples_;
  }

 private:
  TripleSet triples_;
  std::uint64_t raw_count_ = 0;
};

struct TriplePattern {
  std::optional<Term> subject;
  std::optional<Term> predicate;
  std::optional<Term> object;

  bool matches(const Triple& t) const {
    return (!subject || t.subject == *subject) &&
           (!predicate || t.predicate == *predicate) &&
           (!object || t.object == *object);
  }
};

// Matching triples in serialization order.
std::vector<Triple> match(const Graph& g, const TriplePattern& pattern);

// Throws EncodingError (invalid UTF-8) or SyntaxError.
Graph parse_ntriples(std::string_view input);

// One statement per line, sorted by canonical text.
std::string serialize_ntriples(const Graph& g);

using PrefixMap = std::map<std::string, std::string>;

// Accepts @prefix, prefixed names, <IRI>s, "literals" with ^^ or @, labelled
// blank nodes, the "a" keyword, ";" and "," continuations, "." terminators
// and # comments. Throws SyntaxError, UnknownPrefix, EncodingError.
Graph parse_turtle_subset(std::string_view input);

// Writes a document readable by parse_turtle_subset, abbreviating IRIs with
// the given prefixes where the local part is a plain name.
std::string serialize_turtle(const Graph& g, const PrefixMap& prefixes);

// Prefixes used for every Turtle file the tools write.
const PrefixMap& standard_prefixes();

// Throws EncodingError at the first invalid byte.
void validate_utf8(std::string_view input);

// Datatype helpers.
bool is_numeric_datatype(std::string_view datatype);
// Lexical-space check for the xsd datatypes we know; unknown datatypes pass.
bool lexical_conforms(std::string_view lexical, std::string_view datatype);

// Groups triples by subject (in serialization order) and calls fn(subject,
// triples) once per distinct subject.
void for_each_subject(
    const Graph& g,
    const std::function<void(const Term&, const std::vector<const Triple*>&)>&
        fn);

}  // namespace ldq
