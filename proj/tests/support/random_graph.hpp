#pragma once

#include <random>
#include <string>

#include "ldq/rdf.hpp"

namespace ldq::test {

// Random graphs exercising escapes, non-ASCII text, language tags, typed
// literals and blank nodes.
class RandomGraphs {
 public:
  explicit RandomGraphs(std::uint64_t seed) : rng_(seed) {}

  Graph make(std::size_t triples) {
    Graph g;
    while (g.size() < triples) g.add(triple());
    return g;
  }

  Triple triple() {
    Term s = pick(4) == 0 ? blank() : iri();
    Term p = Term::iri("http://example.org/p/" + word(1 + pick(6)));
    Term o = [&] {
      switch (pick(4)) {
        case 0:
          return iri();
        case 1:
          return blank();
        default:
          return literal();
      }
    }();
    return Triple(s, p, o);
  }

 private:
  std::size_t pick(std::size_t n) { return rng_() % n; }

  std::string word(std::size_t len) {
    static const std::string alphabet =
        "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
    std::string out;
    for (std::size_t i = 0; i < len; ++i) out += alphabet[pick(alphabet.size())];
    return out;
  }

  Term iri() {
    static const char* schemes[] = {"http://example.org/", "urn:x:",
                                    "https://data.example.com/a/b#"};
    std::string tail = word(1 + pick(10));
    if (pick(5) == 0) tail += "{|}^`\\";
    if (pick(6) == 0) tail += "\xC3\xA9t\xC3\xA9";  // été
    return Term::iri(schemes[pick(3)] + tail);
  }

  Term blank() { return Term::blank("b" + word(1 + pick(4))); }

  Term literal() {
    std::string lexical = word(pick(12));
    switch (pick(6)) {
      case 0:
        lexical += "\"quoted\" \\ back\nnew\rret\ttab";
        break;
      case 1:
        lexical += "\xE2\x82\xAC \xF0\x9F\x98\x80";  // € and an emoji
        break;
      case 2:
        lexical += std::string("\x01\x7F", 2);
        break;
      default:
        break;
    }
    switch (pick(4)) {
      case 0:
        return Term::lang_literal(lexical, pick(2) ? "en" : "de-CH");
      case 1:
        return Term::literal(std::to_string(pick(100000)),
                             ns::xsd_("integer"));
      case 2:
        return Term::literal(lexical, "http://example.org/dt#" + word(3));
      default:
        return Term::literal(lexical);
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace ldq::test
