#pragma once

#include "deeplinker/rdf.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace deeplinker::sparql {

class SparqlError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Binding = std::map<std::string, rdf::Term>;

struct SelectResult {
  std::vector<std::string> variables;
  std::vector<Binding> rows;  // unbound variables are absent
};

// Small SPARQL subset over an in-memory graph:
//
//   PREFIX p: <iri>
//   SELECT [DISTINCT] (?v ... | *) WHERE { triple patterns [FILTER(expr)] } [LIMIT n]
//
// Patterns use `;` and `,` lists and `a`. FILTER supports isLiteral, isIRI,
// isURI, STR, LCASE, CONTAINS, STRSTARTS, =, !=, !, && and ||. Rows come out
// in the graph's insertion order.
SelectResult select(std::string_view query, const std::vector<rdf::Triple>& graph);

// `INSERT DATA { ... }` with optional PREFIX declarations. The block body is
// parsed as Turtle.
std::vector<rdf::Triple> parseInsertData(std::string_view update);

// application/sparql-results+json.
nlohmann::ordered_json toResultsJson(const SelectResult& result);
SelectResult fromResultsJson(const nlohmann::json& json);

}  // namespace deeplinker::sparql
