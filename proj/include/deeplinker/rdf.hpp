#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace deeplinker::rdf {

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfNs = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfsNs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kRdfsComment = "http://www.w3.org/2000/01/rdf-schema#comment";
inline constexpr std::string_view kXsdNs = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view kBookmarkClass = "https://www.w3.org/2002/01/bookmark#Bookmark";
inline constexpr std::string_view kVocabNs = "http://purl.org/deeplinker/vocab#";

struct Iri {
  std::string value;
  friend auto operator<=>(const Iri&, const Iri&) = default;
};

// Only produced by parsing documents; the annotation store rejects them.
struct BlankNode {
  std::string label;
  friend auto operator<=>(const BlankNode&, const BlankNode&) = default;
};

struct Literal {
  std::string lexical;
  std::optional<std::string> datatype;
  std::optional<std::string> language;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

using Term = std::variant<Iri, BlankNode, Literal>;

struct Triple {
  Term subject;
  Iri predicate;
  Term object;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

class RdfParseError : public std::runtime_error {
 public:
  RdfParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline bool isIri(const Term& t) { return std::holds_alternative<Iri>(t); }
inline bool isLiteral(const Term& t) { return std::holds_alternative<Literal>(t); }

// Scheme ":" followed by at least one character with no whitespace or
// characters forbidden inside an N-Triples IRI reference.
bool isAbsoluteIri(std::string_view text);

// N-Triples term syntax.
std::string toNTriples(const Term& term);
std::string toNTriples(const Triple& triple);  // no trailing newline
std::string toNTriplesDocument(const std::vector<Triple>& triples);

// Turtle subset: @prefix/PREFIX, @base-free absolute IRIs, prefixed names,
// `a`, `;` and `,` lists, short and long string literals with language tags
// or datatypes, integer/decimal/double/boolean literals, labelled blank
// nodes. N-Triples documents are accepted as-is. Collections and
// anonymous blank-node property lists are rejected.
std::vector<Triple> parseTurtle(std::string_view text,
                                std::map<std::string, std::string> prefixes = {});

// Escape body of a quoted literal (without the quotes).
std::string escapeLiteral(std::string_view text);

}  // namespace deeplinker::rdf
