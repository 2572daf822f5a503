#include "deeplinker/sparql.hpp"

#include "deeplinker/utf8.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <variant>

namespace deeplinker::sparql {

namespace {

enum class Tok { End, Var, Iri, PName, Word, String, Number, LangTag, Punct };

struct Token {
  Tok type = Tok::End;
  std::string text;
};

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

bool isNameChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
         static_cast<unsigned char>(c) >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : s_(text) { advance(); }

  const Token& peek() const { return current_; }
  std::size_t offset() const { return start_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  bool acceptPunct(std::string_view p) {
    if (current_.type == Tok::Punct && current_.text == p) {
      advance();
      return true;
    }
    return false;
  }

  bool acceptWord(std::string_view w) {
    if (current_.type == Tok::Word && iequals(current_.text, w)) {
      advance();
      return true;
    }
    return false;
  }

  void expectPunct(std::string_view p) {
    if (!acceptPunct(p)) error("expected '" + std::string(p) + "'");
  }

  [[noreturn]] void error(const std::string& message) const {
    throw SparqlError(message + " at offset " + std::to_string(start_) +
                      (current_.type == Tok::End ? " (end of input)" : " near '" + current_.text + "'"));
  }

 private:
  void skipSpace() {
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i_;
      } else if (c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  void advance() {
    skipSpace();
    start_ = i_;
    current_ = Token{};
    if (i_ >= s_.size()) return;
    const char c = s_[i_];
    if (c == '?' || c == '$') {
      ++i_;
      const auto from = i_;
      while (i_ < s_.size() && isNameChar(s_[i_])) ++i_;
      if (from == i_) error("empty variable name");
      current_ = {Tok::Var, std::string(s_.substr(from, i_ - from))};
    } else if (c == '<') {
      const auto end = s_.find('>', i_);
      if (end == std::string_view::npos) error("unterminated IRI");
      current_ = {Tok::Iri, std::string(s_.substr(i_ + 1, end - i_ - 1))};
      i_ = end + 1;
    } else if (c == '"' || c == '\'') {
      current_ = {Tok::String, readString(c)};
    } else if (c == '@') {
      ++i_;
      const auto from = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-')) ++i_;
      current_ = {Tok::LangTag, std::string(s_.substr(from, i_ - from))};
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               ((c == '+' || c == '-') && i_ + 1 < s_.size() &&
                std::isdigit(static_cast<unsigned char>(s_[i_ + 1])))) {
      const auto from = i_++;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      if (i_ + 1 < s_.size() && s_[i_] == '.' && std::isdigit(static_cast<unsigned char>(s_[i_ + 1]))) {
        ++i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      }
      current_ = {Tok::Number, std::string(s_.substr(from, i_ - from))};
    } else if (isNameChar(c) || c == ':') {
      const auto from = i_;
      while (i_ < s_.size() && isNameChar(s_[i_])) ++i_;
      if (i_ < s_.size() && s_[i_] == ':') {
        ++i_;
        while (i_ < s_.size() && (isNameChar(s_[i_]) || s_[i_] == '.')) ++i_;
        while (s_[i_ - 1] == '.') --i_;
        current_ = {Tok::PName, std::string(s_.substr(from, i_ - from))};
      } else {
        current_ = {Tok::Word, std::string(s_.substr(from, i_ - from))};
      }
    } else {
      static constexpr std::array<std::string_view, 4> kTwo{"&&", "||", "!=", "^^"};
      for (auto p : kTwo) {
        if (s_.substr(i_, 2) == p) {
          current_ = {Tok::Punct, std::string(p)};
          i_ += 2;
          return;
        }
      }
      current_ = {Tok::Punct, std::string(1, c)};
      ++i_;
    }
  }

  std::string readString(char quote) {
    std::string out;
    ++i_;
    while (true) {
      if (i_ >= s_.size()) error("unterminated string");
      const char c = s_[i_++];
      if (c == quote) return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (i_ >= s_.size()) error("unterminated escape");
      const char e = s_[i_++];
      switch (e) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case '"': out += '"'; break;
        case '\'': out += '\''; break;
        case '\\': out += '\\'; break;
        case 'u':
        case 'U': {
          const std::size_t n = e == 'u' ? 4 : 8;
          if (i_ + n > s_.size()) error("truncated \\u escape");
          const std::string hex(s_.substr(i_, n));
          if (!std::all_of(hex.begin(), hex.end(), [](char h) { return std::isxdigit(static_cast<unsigned char>(h)); })) {
            error("bad \\u escape");
          }
          utf8::append(out, static_cast<char32_t>(std::stoul(hex, nullptr, 16)));
          i_ += n;
          break;
        }
        default: error("unknown escape");
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  std::size_t start_ = 0;
  Token current_;
};

using Prefixes = std::map<std::string, std::string>;

Prefixes parsePrologue(Lexer& lex) {
  Prefixes prefixes;
  while (lex.acceptWord("PREFIX")) {
    const auto name = lex.take();
    if (name.type != Tok::PName || name.text.back() != ':') lex.error("expected prefix name");
    const auto iri = lex.take();
    if (iri.type != Tok::Iri) lex.error("expected prefix IRI");
    prefixes[name.text.substr(0, name.text.size() - 1)] = iri.text;
  }
  return prefixes;
}

std::string expand(const Lexer& lex, const Prefixes& prefixes, const std::string& pname) {
  const auto colon = pname.find(':');
  const auto it = prefixes.find(pname.substr(0, colon));
  if (it == prefixes.end()) lex.error("undeclared prefix");
  return it->second + pname.substr(colon + 1);
}

// A pattern position: a variable name or a constant term.
using Slot = std::variant<std::string, rdf::Term>;

struct Pattern {
  Slot subject;
  Slot predicate;
  Slot object;
};

struct Expr {
  enum class Op { Var, Const, And, Or, Not, Eq, Ne, Call };
  Op op = Op::Const;
  std::string name;  // variable or function
  rdf::Term constant;
  std::vector<Expr> args;
};

using Value = std::variant<bool, rdf::Term>;

class QueryParser {
 public:
  QueryParser(Lexer& lex, Prefixes prefixes) : lex_(lex), prefixes_(std::move(prefixes)) {}

  rdf::Term constantTerm() {
    auto t = lex_.take();
    switch (t.type) {
      case Tok::Iri: return rdf::Iri{t.text};
      case Tok::PName: return rdf::Iri{expand(lex_, prefixes_, t.text)};
      case Tok::Number:
        return rdf::Literal{t.text,
                            std::string(rdf::kXsdNs) +
                                (t.text.find('.') == std::string::npos ? "integer" : "decimal"),
                            std::nullopt};
      case Tok::Word:
        if (t.text == "true" || t.text == "false") {
          return rdf::Literal{t.text, std::string(rdf::kXsdNs) + "boolean", std::nullopt};
        }
        break;
      case Tok::String: {
        rdf::Literal literal{t.text, std::nullopt, std::nullopt};
        if (lex_.peek().type == Tok::LangTag) {
          literal.language = lex_.take().text;
        } else if (lex_.acceptPunct("^^")) {
          auto dt = lex_.take();
          if (dt.type == Tok::Iri) literal.datatype = dt.text;
          else if (dt.type == Tok::PName) literal.datatype = expand(lex_, prefixes_, dt.text);
          else lex_.error("expected datatype IRI");
        }
        return literal;
      }
      default: break;
    }
    lex_.error("expected a term");
  }

  Slot slot(bool predicatePosition) {
    if (lex_.peek().type == Tok::Var) return lex_.take().text;
    if (predicatePosition && lex_.peek().type == Tok::Word && lex_.peek().text == "a") {
      lex_.take();
      return rdf::Term{rdf::Iri{std::string(rdf::kRdfType)}};
    }
    return constantTerm();
  }

  void triplesBlock(std::vector<Pattern>& out) {
    const Slot subject = slot(false);
    do {
      const Slot predicate = slot(true);
      do {
        out.push_back({subject, predicate, slot(false)});
      } while (lex_.acceptPunct(","));
    } while (lex_.acceptPunct(";") && !(lex_.peek().type == Tok::Punct &&
                                        (lex_.peek().text == "." || lex_.peek().text == "}")));
  }

  Expr orExpr() {
    Expr left = andExpr();
    while (lex_.acceptPunct("||")) left = binary(Expr::Op::Or, std::move(left), andExpr());
    return left;
  }

  Expr andExpr() {
    Expr left = relational();
    while (lex_.acceptPunct("&&")) left = binary(Expr::Op::And, std::move(left), relational());
    return left;
  }

  Expr relational() {
    Expr left = unary();
    if (lex_.acceptPunct("=")) return binary(Expr::Op::Eq, std::move(left), unary());
    if (lex_.acceptPunct("!=")) return binary(Expr::Op::Ne, std::move(left), unary());
    return left;
  }

  Expr unary() {
    if (lex_.acceptPunct("!")) {
      Expr e;
      e.op = Expr::Op::Not;
      e.args.push_back(unary());
      return e;
    }
    return primary();
  }

  Expr primary() {
    if (lex_.acceptPunct("(")) {
      Expr inner = orExpr();
      lex_.expectPunct(")");
      return inner;
    }
    if (lex_.peek().type == Tok::Var) {
      Expr e;
      e.op = Expr::Op::Var;
      e.name = lex_.take().text;
      return e;
    }
    if (lex_.peek().type == Tok::Word && lex_.peek().text != "true" && lex_.peek().text != "false") {
      return call();
    }
    Expr e;
    e.constant = constantTerm();
    return e;
  }

  Expr call() {
    static constexpr std::array<std::string_view, 7> kFunctions{
        "isLiteral", "isIRI", "isURI", "STR", "LCASE", "CONTAINS", "STRSTARTS"};
    const auto name = lex_.take().text;
    const auto* fn = std::find_if(kFunctions.begin(), kFunctions.end(),
                                  [&](std::string_view f) { return iequals(f, name); });
    if (fn == kFunctions.end()) lex_.error("unsupported function " + name);
    Expr e;
    e.op = Expr::Op::Call;
    e.name = std::string(*fn);
    lex_.expectPunct("(");
    if (!lex_.acceptPunct(")")) {
      do {
        e.args.push_back(orExpr());
      } while (lex_.acceptPunct(","));
      lex_.expectPunct(")");
    }
    const std::size_t arity = (e.name == "CONTAINS" || e.name == "STRSTARTS") ? 2 : 1;
    if (e.args.size() != arity) lex_.error(e.name + " takes " + std::to_string(arity) + " argument(s)");
    return e;
  }

 private:
  static Expr binary(Expr::Op op, Expr left, Expr right) {
    Expr e;
    e.op = op;
    e.args.push_back(std::move(left));
    e.args.push_back(std::move(right));
    return e;
  }

  Lexer& lex_;
  Prefixes prefixes_;
};

std::optional<bool> effectiveBoolean(const std::optional<Value>& v) {
  if (!v) return std::nullopt;
  if (const auto* b = std::get_if<bool>(&*v)) return *b;
  const auto* literal = std::get_if<rdf::Literal>(&std::get<rdf::Term>(*v));
  if (!literal) return std::nullopt;
  if (literal->datatype == std::string(rdf::kXsdNs) + "boolean") return literal->lexical == "true";
  if (!literal->datatype || *literal->datatype == std::string(rdf::kXsdNs) + "string") {
    return !literal->lexical.empty();
  }
  return std::nullopt;
}

const rdf::Literal* asLiteral(const std::optional<Value>& v) {
  if (!v || !std::holds_alternative<rdf::Term>(*v)) return nullptr;
  return std::get_if<rdf::Literal>(&std::get<rdf::Term>(*v));
}

std::optional<Value> evaluate(const Expr& e, const Binding& row) {
  switch (e.op) {
    case Expr::Op::Var: {
      const auto it = row.find(e.name);
      if (it == row.end()) return std::nullopt;
      return Value{it->second};
    }
    case Expr::Op::Const: return Value{e.constant};
    case Expr::Op::And: {
      const auto a = effectiveBoolean(evaluate(e.args[0], row));
      const auto b = effectiveBoolean(evaluate(e.args[1], row));
      if (a == false || b == false) return Value{false};
      if (!a || !b) return std::nullopt;
      return Value{true};
    }
    case Expr::Op::Or: {
      const auto a = effectiveBoolean(evaluate(e.args[0], row));
      const auto b = effectiveBoolean(evaluate(e.args[1], row));
      if (a == true || b == true) return Value{true};
      if (!a || !b) return std::nullopt;
      return Value{false};
    }
    case Expr::Op::Not: {
      const auto a = effectiveBoolean(evaluate(e.args[0], row));
      if (!a) return std::nullopt;
      return Value{!*a};
    }
    case Expr::Op::Eq:
    case Expr::Op::Ne: {
      const auto a = evaluate(e.args[0], row);
      const auto b = evaluate(e.args[1], row);
      if (!a || !b) return std::nullopt;
      const bool same = *a == *b;
      return Value{e.op == Expr::Op::Eq ? same : !same};
    }
    case Expr::Op::Call: break;
  }

  const auto arg = evaluate(e.args[0], row);
  if (!arg) return std::nullopt;
  const auto* term = std::get_if<rdf::Term>(&*arg);
  if (e.name == "isLiteral") return term ? std::optional<Value>(rdf::isLiteral(*term)) : std::nullopt;
  if (e.name == "isIRI" || e.name == "isURI") {
    return term ? std::optional<Value>(rdf::isIri(*term)) : std::nullopt;
  }
  if (e.name == "STR") {
    if (!term) return std::nullopt;
    if (const auto* iri = std::get_if<rdf::Iri>(term)) return Value{rdf::Literal{iri->value, {}, {}}};
    if (const auto* lit = std::get_if<rdf::Literal>(term)) return Value{rdf::Literal{lit->lexical, {}, {}}};
    return std::nullopt;
  }
  const auto* literal = asLiteral(arg);
  if (!literal) return std::nullopt;
  if (e.name == "LCASE") {
    rdf::Literal folded = *literal;
    folded.lexical = utf8::foldCase(literal->lexical);
    return Value{folded};
  }
  const auto* needle = asLiteral(evaluate(e.args[1], row));
  if (!needle) return std::nullopt;
  if (e.name == "CONTAINS") return Value{literal->lexical.find(needle->lexical) != std::string::npos};
  return Value{literal->lexical.starts_with(needle->lexical)};
}

bool bindSlot(const Slot& slot, const rdf::Term& value, Binding& row) {
  if (const auto* constant = std::get_if<rdf::Term>(&slot)) return *constant == value;
  const auto& name = std::get<std::string>(slot);
  const auto [it, inserted] = row.emplace(name, value);
  return inserted || it->second == value;
}

void noteVariable(const Slot& slot, std::vector<std::string>& seen) {
  if (const auto* name = std::get_if<std::string>(&slot)) {
    if (std::find(seen.begin(), seen.end(), *name) == seen.end()) seen.push_back(*name);
  }
}

nlohmann::ordered_json termJson(const rdf::Term& term) {
  nlohmann::ordered_json out;
  if (const auto* iri = std::get_if<rdf::Iri>(&term)) {
    out["type"] = "uri";
    out["value"] = iri->value;
  } else if (const auto* blank = std::get_if<rdf::BlankNode>(&term)) {
    out["type"] = "bnode";
    out["value"] = blank->label;
  } else {
    const auto& literal = std::get<rdf::Literal>(term);
    out["type"] = "literal";
    out["value"] = literal.lexical;
    if (literal.language) out["xml:lang"] = *literal.language;
    if (literal.datatype) out["datatype"] = *literal.datatype;
  }
  return out;
}

rdf::Term termFromJson(const nlohmann::json& json) {
  const auto type = json.at("type").get<std::string>();
  const auto value = json.at("value").get<std::string>();
  if (type == "uri") return rdf::Iri{value};
  if (type == "bnode") return rdf::BlankNode{value};
  if (type != "literal" && type != "typed-literal") throw SparqlError("unknown binding type " + type);
  rdf::Literal literal{value, std::nullopt, std::nullopt};
  if (json.contains("xml:lang")) literal.language = json["xml:lang"].get<std::string>();
  if (json.contains("datatype")) {
    auto dt = json["datatype"].get<std::string>();
    // Some endpoints spell out xsd:string or rdf:langString on plain literals.
    if (dt != std::string(rdf::kXsdNs) + "string" &&
        dt != std::string(rdf::kRdfNs) + "langString") {
      literal.datatype = std::move(dt);
    }
  }
  return literal;
}

}  // namespace

SelectResult select(std::string_view query, const std::vector<rdf::Triple>& graph) {
  Lexer lex(query);
  QueryParser parser(lex, parsePrologue(lex));
  if (!lex.acceptWord("SELECT")) lex.error("only SELECT queries are supported");
  const bool distinct = lex.acceptWord("DISTINCT") || lex.acceptWord("REDUCED");

  std::vector<std::string> projected;
  bool star = false;
  if (lex.acceptPunct("*")) {
    star = true;
  } else {
    while (lex.peek().type == Tok::Var) projected.push_back(lex.take().text);
    if (projected.empty()) lex.error("expected variables or *");
  }
  lex.acceptWord("WHERE");
  lex.expectPunct("{");

  std::vector<Pattern> patterns;
  std::vector<Expr> filters;
  while (!lex.acceptPunct("}")) {
    if (lex.peek().type == Tok::End) lex.error("unterminated group");
    if (lex.acceptWord("FILTER")) {
      filters.push_back(lex.peek().type == Tok::Word ? parser.call() : parser.primary());
    } else {
      parser.triplesBlock(patterns);
    }
    lex.acceptPunct(".");
  }

  std::optional<std::size_t> limit;
  if (lex.acceptWord("LIMIT")) {
    const auto n = lex.take();
    if (n.type != Tok::Number || n.text.find_first_not_of("0123456789") != std::string::npos) {
      lex.error("expected LIMIT count");
    }
    limit = std::stoull(n.text);
  }
  if (lex.peek().type != Tok::End) lex.error("unsupported trailing query text");

  if (star) {
    for (const auto& p : patterns) {
      noteVariable(p.subject, projected);
      noteVariable(p.predicate, projected);
      noteVariable(p.object, projected);
    }
  }

  std::vector<Binding> rows{Binding{}};
  for (const auto& pattern : patterns) {
    std::vector<Binding> next;
    for (const auto& row : rows) {
      for (const auto& triple : graph) {
        Binding extended = row;
        if (bindSlot(pattern.subject, triple.subject, extended) &&
            bindSlot(pattern.predicate, rdf::Term{triple.predicate}, extended) &&
            bindSlot(pattern.object, triple.object, extended)) {
          next.push_back(std::move(extended));
        }
      }
    }
    rows = std::move(next);
  }

  SelectResult result;
  result.variables = projected;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    const bool keep = std::all_of(filters.begin(), filters.end(), [&](const Expr& f) {
      return effectiveBoolean(evaluate(f, row)) == true;
    });
    if (!keep) continue;
    Binding out;
    std::string key;
    for (const auto& v : projected) {
      const auto it = row.find(v);
      if (it == row.end()) {
        key += "\x01|";
        continue;
      }
      out.emplace(v, it->second);
      key += rdf::toNTriples(it->second) + "|";
    }
    if (distinct && !seen.insert(key).second) continue;
    result.rows.push_back(std::move(out));
    if (limit && result.rows.size() >= *limit) break;
  }
  return result;
}

std::vector<rdf::Triple> parseInsertData(std::string_view update) {
  Lexer lex(update);
  auto prefixes = parsePrologue(lex);
  if (!lex.acceptWord("INSERT") || !lex.acceptWord("DATA")) {
    lex.error("only INSERT DATA updates are supported");
  }
  if (lex.peek().type != Tok::Punct || lex.peek().text != "{") lex.error("expected '{'");
  const auto open = lex.offset();
  const auto close = update.rfind('}');
  if (close == std::string_view::npos || close < open) throw SparqlError("unterminated INSERT DATA block");
  if (update.substr(close + 1).find_first_not_of(" \t\r\n;") != std::string_view::npos) {
    throw SparqlError("unsupported text after INSERT DATA block");
  }
  std::string body(update.substr(open + 1, close - open - 1));
  const auto last = body.find_last_not_of(" \t\r\n");
  if (last == std::string::npos) return {};
  if (body[last] != '.') body += " .";
  try {
    return rdf::parseTurtle(body, prefixes);
  } catch (const rdf::RdfParseError& e) {
    throw SparqlError(std::string("INSERT DATA: ") + e.what());
  }
}

nlohmann::ordered_json toResultsJson(const SelectResult& result) {
  nlohmann::ordered_json out;
  out["head"]["vars"] = result.variables;
  auto bindings = nlohmann::ordered_json::array();
  for (const auto& row : result.rows) {
    nlohmann::ordered_json b = nlohmann::ordered_json::object();
    for (const auto& v : result.variables) {
      const auto it = row.find(v);
      if (it != row.end()) b[v] = termJson(it->second);
    }
    bindings.push_back(std::move(b));
  }
  out["results"]["bindings"] = std::move(bindings);
  return out;
}

SelectResult fromResultsJson(const nlohmann::json& json) {
  SelectResult result;
  try {
    result.variables = json.at("head").at("vars").get<std::vector<std::string>>();
    for (const auto& b : json.at("results").at("bindings")) {
      Binding row;
      for (const auto& item : b.items()) row.emplace(item.key(), termFromJson(item.value()));
      result.rows.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SparqlError(std::string("malformed results: ") + e.what());
  }
  return result;
}

}  // namespace deeplinker::sparql
