#include "deeplinker/xml.hpp"

#include "deeplinker/utf8.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace deeplinker {

namespace {

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool isNameStart(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalpha(u) || c == '_' || c == ':' || u >= 0x80;
}

bool isNameChar(char c) {
  const auto u = static_cast<unsigned char>(c);
  return isNameStart(c) || std::isdigit(u) || c == '-' || c == '.';
}

std::string toLower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool startsWithNoCase(std::string_view text, std::size_t pos, std::string_view prefix) {
  if (text.size() - std::min(pos, text.size()) < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(text[pos + i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

constexpr std::array<std::pair<std::string_view, char32_t>, 14> kNamedEntities{{
    {"amp", '&'}, {"lt", '<'}, {"gt", '>'}, {"quot", '"'}, {"apos", '\''},
    {"nbsp", 0xA0}, {"copy", 0xA9}, {"reg", 0xAE}, {"hellip", 0x2026},
    {"mdash", 0x2014}, {"ndash", 0x2013}, {"laquo", 0xAB}, {"raquo", 0xBB},
    {"middot", 0xB7},
}};

// Decodes character references. Strict mode only knows the five XML
// entities and fails on anything else; lenient mode passes unknown
// references through verbatim.
std::string decodeEntities(std::string_view raw, bool strict, std::size_t offset) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out += raw[i];
      continue;
    }
    const auto semi = raw.find(';', i + 1);
    const bool plausible = semi != std::string_view::npos && semi - i <= 12;
    if (plausible) {
      const auto body = raw.substr(i + 1, semi - i - 1);
      if (!body.empty() && body[0] == '#') {
        char32_t cp = 0;
        bool ok = body.size() > 1;
        const bool hex = ok && (body[1] == 'x' || body[1] == 'X');
        for (std::size_t k = hex ? 2 : 1; ok && k < body.size(); ++k) {
          const auto c = static_cast<unsigned char>(body[k]);
          int digit = -1;
          if (std::isdigit(c)) digit = c - '0';
          else if (hex && std::isxdigit(c)) digit = std::tolower(c) - 'a' + 10;
          if (digit < 0 || cp > 0x10FFFF) { ok = false; break; }
          cp = cp * (hex ? 16 : 10) + static_cast<char32_t>(digit);
        }
        if (hex && body.size() == 2) ok = false;
        if (ok && cp != 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
          utf8::append(out, cp);
          i = semi;
          continue;
        }
      } else {
        const auto* it = std::find_if(kNamedEntities.begin(), kNamedEntities.end(),
                                      [&](const auto& e) { return e.first == body; });
        const bool known = it != kNamedEntities.end() && (!strict || it - kNamedEntities.begin() < 5);
        if (known) {
          utf8::append(out, it->second);
          i = semi;
          continue;
        }
      }
    }
    if (strict) throw XmlParseError(offset + i, "invalid entity reference");
    out += '&';
  }
  return out;
}

// ---------------------------------------------------------------- strict XML

class XmlParser {
 public:
  explicit XmlParser(std::string_view src) : src_(src) {}

  XmlNode parse() {
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    skipMisc();
    if (peek() != '<' || !isNameStart(peekAt(1))) fail("expected root element");
    XmlNode root = parseElementTree();
    skipMisc();
    if (pos_ != src_.size()) fail("content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw XmlParseError(pos_, msg); }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }
  char peekAt(std::size_t k) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }
  bool startsWith(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }
  void skipSpace() { while (pos_ < src_.size() && isSpace(src_[pos_])) ++pos_; }

  void skipPast(std::string_view terminator, const char* what) {
    const auto end = src_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  void skipDoctype() {
    int bracket = 0;
    while (pos_ < src_.size()) {
      const char c = src_[pos_++];
      if (c == '[') ++bracket;
      else if (c == ']') --bracket;
      else if (c == '>' && bracket <= 0) return;
    }
    fail("unterminated DOCTYPE");
  }

  void skipMisc() {
    while (true) {
      skipSpace();
      if (startsWith("<?")) skipPast("?>", "processing instruction");
      else if (startsWith("<!--")) skipPast("-->", "comment");
      else if (startsWith("<!DOCTYPE")) skipDoctype();
      else return;
    }
  }

  std::string parseName() {
    if (!isNameStart(peek())) fail("expected name");
    const auto start = pos_;
    while (pos_ < src_.size() && isNameChar(src_[pos_])) ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  // Parses "<name attrs" through ">" or "/>". Returns true when self-closed.
  bool parseStartTag(XmlNode& node) {
    ++pos_;  // '<'
    node.name = parseName();
    while (true) {
      const bool hadSpace = pos_ < src_.size() && isSpace(src_[pos_]);
      skipSpace();
      if (startsWith("/>")) { pos_ += 2; return true; }
      if (peek() == '>') { ++pos_; return false; }
      if (!hadSpace) fail("expected whitespace before attribute");
      auto key = parseName();
      skipSpace();
      if (peek() != '=') fail("expected '=' after attribute name");
      ++pos_;
      skipSpace();
      const char quote = peek();
      if (quote != '"' && quote != '\'') fail("attribute value must be quoted");
      ++pos_;
      const auto valueStart = pos_;
      const auto end = src_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      const auto raw = src_.substr(valueStart, end - valueStart);
      if (raw.find('<') != std::string_view::npos) fail("'<' in attribute value");
      pos_ = end + 1;
      if (node.attribute(key)) fail("duplicate attribute '" + key + "'");
      node.attributes.emplace_back(std::move(key), decodeEntities(raw, true, valueStart));
    }
  }

  XmlNode parseElementTree() {
    XmlNode root;
    const auto rootStart = pos_;
    if (parseStartTag(root)) {
      root.sourceSpan = {rootStart, pos_};
      return root;
    }
    root.sourceSpan = {rootStart, 0};
    std::vector<XmlNode*> stack{&root};
    while (!stack.empty()) {
      if (pos_ >= src_.size()) fail("unexpected end of input inside <" + stack.back()->name + ">");
      XmlNode& top = *stack.back();
      if (startsWith("</")) {
        pos_ += 2;
        const auto name = parseName();
        skipSpace();
        if (peek() != '>') fail("expected '>' in end tag");
        ++pos_;
        if (name != top.name) fail("mismatched end tag </" + name + "> for <" + top.name + ">");
        top.sourceSpan->second = pos_;
        stack.pop_back();
      } else if (startsWith("<!--")) {
        skipPast("-->", "comment");
      } else if (startsWith("<![CDATA[")) {
        pos_ += 9;
        const auto end = src_.find("]]>", pos_);
        if (end == std::string_view::npos) fail("unterminated CDATA section");
        appendText(top, std::string(src_.substr(pos_, end - pos_)));
        pos_ = end + 3;
      } else if (startsWith("<?")) {
        skipPast("?>", "processing instruction");
      } else if (peek() == '<') {
        const auto start = pos_;
        XmlNode child;
        const bool closed = parseStartTag(child);
        child.sourceSpan = {start, closed ? pos_ : 0};
        top.children.push_back(std::move(child));
        if (!closed) stack.push_back(&top.children.back());
      } else {
        const auto start = pos_;
        const auto end = std::min(src_.find('<', pos_), src_.size());
        pos_ = end;
        appendText(top, decodeEntities(src_.substr(start, end - start), true, start));
      }
    }
    return root;
  }

  static void appendText(XmlNode& parent, std::string text) {
    if (text.empty()) return;
    if (!parent.children.empty() && !parent.children.back().isElement()) {
      parent.children.back().text += text;
    } else {
      parent.children.push_back(XmlNode::textNode(std::move(text)));
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

// --------------------------------------------------------------- lenient HTML

bool isRawTextElement(std::string_view name) { return name == "script" || name == "style"; }

bool closesParagraph(std::string_view name) {
  static constexpr std::array<std::string_view, 20> kBlocks{
      "address", "article", "aside", "blockquote", "div", "dl", "fieldset", "footer", "form", "h1",
      "h2", "h3", "h4", "h5", "h6", "header", "nav", "ol", "p", "ul"};
  return std::find(kBlocks.begin(), kBlocks.end(), name) != kBlocks.end() || name == "pre" ||
         name == "section" || name == "table" || name == "hr";
}

class HtmlParser {
 public:
  explicit HtmlParser(std::string_view src) : src_(src) {}

  XmlNode parse() {
    XmlNode document = XmlNode::element("#document");
    stack_.push_back(&document);
    if (src_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        const char next = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
        if (src_.substr(pos_, 4) == "<!--") { skipComment(); continue; }
        if (next == '!' || next == '?') { skipTo('>'); continue; }
        if (next == '/' && pos_ + 2 < src_.size() &&
            std::isalpha(static_cast<unsigned char>(src_[pos_ + 2]))) {
          endTag();
          continue;
        }
        if (std::isalpha(static_cast<unsigned char>(next))) { startTag(); continue; }
      }
      text();
    }
    while (stack_.size() > 1) closeTop(src_.size());
    return finish(std::move(document));
  }

 private:
  XmlNode& top() { return *stack_.back(); }

  void skipComment() {
    const auto end = src_.find("-->", pos_ + 4);
    pos_ = end == std::string_view::npos ? src_.size() : end + 3;
  }

  void skipTo(char c) {
    const auto end = src_.find(c, pos_);
    pos_ = end == std::string_view::npos ? src_.size() : end + 1;
  }

  void closeTop(std::size_t at) {
    XmlNode& node = top();
    if (node.sourceSpan) node.sourceSpan->second = at;
    stack_.pop_back();
  }

  std::string readName() {
    const auto start = pos_;
    while (pos_ < src_.size() && !isSpace(src_[pos_]) && src_[pos_] != '>' &&
           src_[pos_] != '/' && src_[pos_] != '=') {
      ++pos_;
    }
    return toLower(src_.substr(start, pos_ - start));
  }

  void skipSpace() { while (pos_ < src_.size() && isSpace(src_[pos_])) ++pos_; }

  void applyImpliedEnds(const std::string& name) {
    const auto topIs = [&](std::initializer_list<std::string_view> names) {
      return stack_.size() > 1 && std::find(names.begin(), names.end(), top().name) != names.end();
    };
    if (name == "li" && topIs({"li"})) closeTop(pos_);
    if ((name == "dt" || name == "dd") && topIs({"dt", "dd"})) closeTop(pos_);
    if (name == "option" && topIs({"option"})) closeTop(pos_);
    if ((name == "td" || name == "th" || name == "tr") && topIs({"td", "th"})) closeTop(pos_);
    if (name == "tr" && topIs({"tr"})) closeTop(pos_);
    if (closesParagraph(name) && topIs({"p"})) closeTop(pos_);
  }

  void startTag() {
    const auto start = pos_;
    ++pos_;
    XmlNode node = XmlNode::element(readName());
    bool selfClosing = false;
    while (pos_ < src_.size()) {
      skipSpace();
      if (pos_ >= src_.size()) break;
      if (src_[pos_] == '>') { ++pos_; break; }
      if (src_[pos_] == '/') {
        ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '>') { selfClosing = true; ++pos_; break; }
        continue;
      }
      auto key = readName();
      if (key.empty()) { ++pos_; continue; }
      skipSpace();
      std::string value;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        skipSpace();
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          const char quote = src_[pos_++];
          const auto end = src_.find(quote, pos_);
          const auto stop = end == std::string_view::npos ? src_.size() : end;
          value = decodeEntities(src_.substr(pos_, stop - pos_), false, pos_);
          pos_ = std::min(stop + 1, src_.size());
        } else {
          const auto vstart = pos_;
          while (pos_ < src_.size() && !isSpace(src_[pos_]) && src_[pos_] != '>') ++pos_;
          value = decodeEntities(src_.substr(vstart, pos_ - vstart), false, vstart);
        }
      }
      if (!node.attribute(key)) node.attributes.emplace_back(std::move(key), std::move(value));
    }

    applyImpliedEnds(node.name);
    node.sourceSpan = {start, pos_};
    const bool isVoid = isHtmlVoidElement(node.name) || selfClosing;
    const bool rawText = isRawTextElement(node.name);
    top().children.push_back(std::move(node));
    XmlNode& added = top().children.back();
    if (isVoid) return;
    if (rawText) {
      const std::string closer = "</" + added.name;
      auto end = pos_;
      while (end < src_.size() && !startsWithNoCase(src_, end, closer)) ++end;
      if (end > pos_) added.children.push_back(XmlNode::textNode(std::string(src_.substr(pos_, end - pos_))));
      pos_ = end;
      skipTo('>');
      added.sourceSpan->second = pos_;
      return;
    }
    stack_.push_back(&added);
  }

  void endTag() {
    pos_ += 2;
    const auto name = readName();
    skipTo('>');
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->name == name) {
        while (stack_.size() > i) closeTop(pos_);
        return;
      }
    }
    // Stray end tag: ignored.
  }

  void text() {
    const auto start = pos_;
    auto end = src_.find('<', pos_ + 1);
    if (end == std::string_view::npos) end = src_.size();
    pos_ = end;
    auto decoded = decodeEntities(src_.substr(start, end - start), false, start);
    auto& children = top().children;
    if (!children.empty() && !children.back().isElement()) {
      children.back().text += decoded;
    } else {
      children.push_back(XmlNode::textNode(std::move(decoded)));
    }
  }

  static bool isBlank(const XmlNode& node) {
    return !node.isElement() &&
           std::all_of(node.text.begin(), node.text.end(), [](char c) { return isSpace(c); });
  }

  // Builds html > (head?, body) around whatever was parsed.
  static XmlNode finish(XmlNode document) {
    XmlNode html = XmlNode::element("html");
    const XmlNode* onlyHtml = nullptr;
    int elements = 0;
    for (const auto& child : document.children) {
      if (child.isElement()) {
        ++elements;
        if (child.name == "html") onlyHtml = &child;
      } else if (!isBlank(child)) {
        ++elements;
      }
    }
    if (elements == 1 && onlyHtml) {
      html = *onlyHtml;
    } else {
      for (auto& child : document.children) {
        if (child.isElement() && child.name == "html") {
          for (auto& inner : child.children) html.children.push_back(std::move(inner));
          html.attributes = child.attributes;
        } else {
          html.children.push_back(std::move(child));
        }
      }
    }
    const bool hasBody = std::any_of(html.children.begin(), html.children.end(),
                                     [](const XmlNode& n) { return n.isElement() && n.name == "body"; });
    if (!hasBody) {
      XmlNode body = XmlNode::element("body");
      std::vector<XmlNode> kept;
      for (auto& child : html.children) {
        if (child.isElement() && child.name == "head") kept.push_back(std::move(child));
        else if (!isBlank(child) || !body.children.empty()) body.children.push_back(std::move(child));
      }
      kept.push_back(std::move(body));
      html.children = std::move(kept);
    }
    return html;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<XmlNode*> stack_;
};

void serializeInto(std::string& out, const XmlNode& node, const SerializeOptions& options,
                   bool rawText) {
  if (!node.isElement()) {
    out += rawText ? node.text : escapeXmlText(node.text);
    return;
  }
  const bool marked = options.mark == &node;
  if (marked) out += options.markBefore;
  out += '<';
  out += node.name;
  for (const auto& [key, value] : node.attributes) {
    out += ' ';
    out += key;
    out += "=\"";
    out += escapeXmlAttribute(value);
    out += '"';
  }
  const bool html = options.mode == XmlMode::Html;
  if (html && isHtmlVoidElement(node.name)) {
    out += '>';
  } else if (!html && node.children.empty()) {
    out += "/>";
  } else {
    out += '>';
    const bool childRaw = html && isRawTextElement(node.name);
    for (const auto& child : node.children) serializeInto(out, child, options, childRaw);
    out += "</";
    out += node.name;
    out += '>';
  }
  if (marked) out += options.markAfter;
}

}  // namespace

const std::string* XmlNode::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

void XmlNode::setAttribute(std::string key, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  attributes.emplace_back(std::move(key), std::move(value));
}

std::vector<const XmlNode*> XmlNode::elementChildren() const {
  std::vector<const XmlNode*> out;
  for (const auto& child : children) {
    if (child.isElement()) out.push_back(&child);
  }
  return out;
}

const XmlNode* XmlNode::firstChild(std::string_view childName) const {
  for (const auto& child : children) {
    if (child.isElement() && child.name == childName) return &child;
  }
  return nullptr;
}

std::string XmlNode::textContent() const {
  if (!isElement()) return text;
  std::string out;
  for (const auto& child : children) out += child.textContent();
  return out;
}

XmlParseError::XmlParseError(std::size_t offset, std::string message)
    : offset_(offset), what_(std::move(message) + " at offset " + std::to_string(offset)) {}

XmlNode parseXml(std::string_view source) { return XmlParser(source).parse(); }

XmlNode parseHtml(std::string_view source) { return HtmlParser(source).parse(); }

std::string escapeXmlText(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escapeXmlAttribute(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\n': out += "&#10;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string serializeXml(const XmlNode& node, const SerializeOptions& options) {
  std::string out;
  serializeInto(out, node, options, false);
  return out;
}

bool isHtmlVoidElement(std::string_view name) {
  static constexpr std::array<std::string_view, 14> kVoid{
      "area", "base", "br", "col", "embed", "hr", "img",
      "input", "link", "meta", "param", "source", "track", "wbr"};
  return std::find(kVoid.begin(), kVoid.end(), name) != kVoid.end();
}

}  // namespace deeplinker
