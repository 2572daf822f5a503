#include "deeplinker/rdf.hpp"

#include "deeplinker/utf8.hpp"

#include <cctype>
#include <cstdio>

namespace deeplinker::rdf {

namespace {

bool forbiddenInIri(unsigned char c) {
  return c <= 0x20 || c == '<' || c == '>' || c == '"' || c == '{' || c == '}' || c == '|' ||
         c == '^' || c == '`' || c == '\\';
}

std::string escapeIri(std::string_view iri) {
  std::string out;
  for (unsigned char c : iri) {
    if (forbiddenInIri(c)) {
      char buf[8];
      std::snprintf(buf, sizeof buf, "\\u%04X", c);
      out += buf;
    } else {
      out += static_cast<char>(c);
    }
  }
  return out;
}

class TurtleParser {
 public:
  TurtleParser(std::string_view text, std::map<std::string, std::string> prefixes)
      : text_(text), prefixes_(std::move(prefixes)) {}

  std::vector<Triple> parse() {
    while (true) {
      skipWs();
      if (atEnd()) break;
      if (peek() == '@') {
        directive();
      } else if (matchKeyword("PREFIX")) {
        prefixDecl(false);
      } else if (matchKeyword("BASE")) {
        fail("BASE is not supported");
      } else {
        statement();
      }
    }
    return std::move(triples_);
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw RdfParseError(line_, message); }
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek(std::size_t k = 0) const { return pos_ + k < text_.size() ? text_[pos_ + k] : '\0'; }

  void advance() {
    if (atEnd()) return;
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skipWs() {
    while (!atEnd()) {
      const char c = peek();
      if (c == '#') {
        while (!atEnd() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else {
        break;
      }
    }
  }

  void expect(char c) {
    skipWs();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    advance();
  }

  bool matchKeyword(std::string_view keyword) {
    if (text_.size() - pos_ < keyword.size()) return false;
    for (std::size_t i = 0; i < keyword.size(); ++i) {
      if (std::toupper(static_cast<unsigned char>(text_[pos_ + i])) != keyword[i]) return false;
    }
    const char after = peek(keyword.size());
    if (std::isalnum(static_cast<unsigned char>(after)) || after == ':' || after == '_') return false;
    pos_ += keyword.size();
    return true;
  }

  void directive() {
    advance();  // '@'
    if (text_.substr(pos_, 6) == "prefix") {
      pos_ += 6;
      prefixDecl(true);
    } else {
      fail("unsupported directive");
    }
  }

  void prefixDecl(bool dotted) {
    skipWs();
    const auto start = pos_;
    while (!atEnd() && peek() != ':') {
      if (!isPnChar(peek())) fail("bad prefix name");
      advance();
    }
    if (atEnd()) fail("expected ':' in prefix declaration");
    std::string name(text_.substr(start, pos_ - start));
    advance();
    skipWs();
    prefixes_[name] = iriRef();
    if (dotted) expect('.');
  }

  static bool isPnChar(char c) {
    const auto u = static_cast<unsigned char>(c);
    return std::isalnum(u) || c == '_' || c == '-' || c == '.' || u >= 0x80;
  }

  void readHex(std::size_t digits, std::string& out) {
    char32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const auto c = static_cast<unsigned char>(peek());
      if (!std::isxdigit(c)) fail("bad unicode escape");
      cp = cp * 16 + static_cast<char32_t>(std::isdigit(c) ? c - '0' : std::tolower(c) - 'a' + 10);
      advance();
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("escape is not a scalar value");
    utf8::append(out, cp);
  }

  std::string iriRef() {
    if (peek() != '<') fail("expected IRI");
    advance();
    std::string out;
    while (true) {
      if (atEnd()) fail("unterminated IRI");
      const char c = peek();
      if (c == '>') { advance(); break; }
      if (c == '\\') {
        advance();
        if (peek() == 'u') { advance(); readHex(4, out); }
        else if (peek() == 'U') { advance(); readHex(8, out); }
        else fail("bad IRI escape");
        continue;
      }
      if (forbiddenInIri(static_cast<unsigned char>(c))) fail("illegal character in IRI");
      out += c;
      advance();
    }
    if (!isAbsoluteIri(out)) fail("relative IRI '" + out + "' (no base)");
    return out;
  }

  std::string prefixedName() {
    const auto start = pos_;
    while (!atEnd() && peek() != ':') {
      if (!isPnChar(peek())) fail("unexpected character");
      advance();
    }
    if (atEnd()) fail("expected prefixed name");
    std::string prefix(text_.substr(start, pos_ - start));
    advance();
    std::string local;
    while (!atEnd()) {
      const char c = peek();
      if (isPnChar(c) || c == ':') {
        local += c;
        advance();
      } else if (c == '\\' && pos_ + 1 < text_.size()) {
        advance();
        local += peek();
        advance();
      } else if (c == '%' && std::isxdigit(static_cast<unsigned char>(peek(1))) &&
                 std::isxdigit(static_cast<unsigned char>(peek(2)))) {
        local += text_.substr(pos_, 3);
        pos_ += 3;
      } else {
        break;
      }
    }
    // A trailing '.' terminates the statement rather than the name.
    while (!local.empty() && local.back() == '.') {
      local.pop_back();
      --pos_;
    }
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("undeclared prefix '" + prefix + "'");
    return it->second + local;
  }

  Iri iri() {
    skipWs();
    if (peek() == '<') return Iri{iriRef()};
    return Iri{prefixedName()};
  }

  BlankNode blankNode() {
    pos_ += 2;  // "_:"
    const auto start = pos_;
    while (!atEnd() && isPnChar(peek())) advance();
    while (pos_ > start && text_[pos_ - 1] == '.') --pos_;
    if (pos_ == start) fail("empty blank node label");
    return BlankNode{std::string(text_.substr(start, pos_ - start))};
  }

  Term subject() {
    skipWs();
    if (peek() == '_' && peek(1) == ':') return blankNode();
    if (peek() == '[' || peek() == '(') fail("blank node property lists and collections are not supported");
    return iri();
  }

  Iri predicate() {
    skipWs();
    if (peek() == 'a') {
      const char next = peek(1);
      if (next == ' ' || next == '\t' || next == '\n' || next == '\r' || next == '<' || next == '"') {
        advance();
        return Iri{std::string(kRdfType)};
      }
    }
    return iri();
  }

  std::string stringBody() {
    const char quote = peek();
    const bool isLong = peek(1) == quote && peek(2) == quote;
    pos_ += isLong ? 3 : 1;
    std::string out;
    while (true) {
      if (atEnd()) fail("unterminated string literal");
      const char c = peek();
      if (isLong) {
        if (c == quote && peek(1) == quote && peek(2) == quote) {
          pos_ += 3;
          break;
        }
      } else {
        if (c == quote) { advance(); break; }
        if (c == '\n' || c == '\r') fail("newline in short string literal");
      }
      if (c == '\\') {
        advance();
        const char e = peek();
        advance();
        switch (e) {
          case 't': out += '\t'; break;
          case 'b': out += '\b'; break;
          case 'n': out += '\n'; break;
          case 'r': out += '\r'; break;
          case 'f': out += '\f'; break;
          case '"': out += '"'; break;
          case '\'': out += '\''; break;
          case '\\': out += '\\'; break;
          case 'u': readHex(4, out); break;
          case 'U': readHex(8, out); break;
          default: fail("bad string escape");
        }
        continue;
      }
      out += c;
      advance();
    }
    return out;
  }

  Literal literal() {
    Literal lit{stringBody(), std::nullopt, std::nullopt};
    if (peek() == '@') {
      advance();
      const auto start = pos_;
      while (!atEnd() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-')) advance();
      if (pos_ == start) fail("empty language tag");
      lit.language = std::string(text_.substr(start, pos_ - start));
    } else if (peek() == '^' && peek(1) == '^') {
      pos_ += 2;
      lit.datatype = iri().value;
    }
    return lit;
  }

  Literal numeric() {
    const auto start = pos_;
    if (peek() == '+' || peek() == '-') advance();
    bool dot = false;
    bool exponent = false;
    while (!atEnd()) {
      const char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '.' && !dot && !exponent && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        dot = true;
        advance();
      } else if ((c == 'e' || c == 'E') && !exponent) {
        exponent = true;
        advance();
        if (peek() == '+' || peek() == '-') advance();
      } else {
        break;
      }
    }
    std::string lexical(text_.substr(start, pos_ - start));
    if (lexical.empty() || lexical == "+" || lexical == "-") fail("bad numeric literal");
    const char* type = exponent ? "double" : dot ? "decimal" : "integer";
    return Literal{lexical, std::string(kXsdNs) + type, std::nullopt};
  }

  Term object() {
    skipWs();
    const char c = peek();
    if (c == '"' || c == '\'') return literal();
    if (c == '_' && peek(1) == ':') return blankNode();
    if (c == '[' || c == '(') fail("blank node property lists and collections are not supported");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
      return numeric();
    }
    for (std::string_view word : {std::string_view("true"), std::string_view("false")}) {
      const char next = peek(word.size());
      const bool boundary = !(std::isalnum(static_cast<unsigned char>(next)) || next == '_' ||
                              next == '-' || next == ':');
      if (text_.substr(pos_, word.size()) == word && boundary) {
        pos_ += word.size();
        return Literal{std::string(word), std::string(kXsdNs) + "boolean", std::nullopt};
      }
    }
    return iri();
  }

  void statement() {
    const Term subj = subject();
    while (true) {
      const Iri pred = predicate();
      while (true) {
        triples_.push_back(Triple{subj, pred, object()});
        skipWs();
        if (peek() != ',') break;
        advance();
      }
      skipWs();
      if (peek() != ';') break;
      while (peek() == ';') {
        advance();
        skipWs();
      }
      if (peek() == '.') break;
    }
    expect('.');
  }

  std::string_view text_;
  std::map<std::string, std::string> prefixes_;
  std::vector<Triple> triples_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

}  // namespace

bool isAbsoluteIri(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 >= text.size()) return false;
  if (!std::isalpha(static_cast<unsigned char>(text[0]))) return false;
  for (std::size_t i = 1; i < colon; ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (!std::isalnum(c) && c != '+' && c != '-' && c != '.') return false;
  }
  for (unsigned char c : text) {
    if (forbiddenInIri(c)) return false;
  }
  return true;
}

std::string escapeLiteral(std::string_view text) {
  std::string out;
  for (unsigned char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04X", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string toNTriples(const Term& term) {
  if (const auto* iri = std::get_if<Iri>(&term)) return "<" + escapeIri(iri->value) + ">";
  if (const auto* blank = std::get_if<BlankNode>(&term)) return "_:" + blank->label;
  const auto& lit = std::get<Literal>(term);
  std::string out = "\"" + escapeLiteral(lit.lexical) + "\"";
  if (lit.language) out += "@" + *lit.language;
  else if (lit.datatype) out += "^^<" + escapeIri(*lit.datatype) + ">";
  return out;
}

std::string toNTriples(const Triple& triple) {
  return toNTriples(triple.subject) + " " + toNTriples(Term{triple.predicate}) + " " +
         toNTriples(triple.object) + " .";
}

std::string toNTriplesDocument(const std::vector<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {
    out += toNTriples(t);
    out += '\n';
  }
  return out;
}

std::vector<Triple> parseTurtle(std::string_view text, std::map<std::string, std::string> prefixes) {
  return TurtleParser(text, std::move(prefixes)).parse();
}

}  // namespace deeplinker::rdf
