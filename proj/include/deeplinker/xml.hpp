#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace deeplinker {

enum class XmlMode {
  Xml,   // well-formedness required, names case-sensitive
  Html,  // tolerant, names lower-cased
};

struct XmlNode {
  enum class Type { Element, Text };

  Type type = Type::Element;
  std::string name;  // element name; empty for text
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<XmlNode> children;
  std::string text;  // text nodes only
  // Byte range [first, second) of the element in the parsed source.
  std::optional<std::pair<std::size_t, std::size_t>> sourceSpan;

  bool isElement() const { return type == Type::Element; }
  const std::string* attribute(std::string_view key) const;
  void setAttribute(std::string key, std::string value);

  static XmlNode element(std::string name) {
    XmlNode node;
    node.name = std::move(name);
    return node;
  }
  static XmlNode textNode(std::string text) {
    XmlNode node;
    node.type = Type::Text;
    node.text = std::move(text);
    return node;
  }

  // Element children in order; text nodes skipped.
  std::vector<const XmlNode*> elementChildren() const;
  // First element child with the given name, or nullptr.
  const XmlNode* firstChild(std::string_view name) const;
  // Concatenated text of all descendant text nodes.
  std::string textContent() const;
};

class XmlParseError : public std::exception {
 public:
  XmlParseError(std::size_t offset, std::string message);
  const char* what() const noexcept override { return what_.c_str(); }
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
  std::string what_;
};

// Strict XML 1.0 subset: elements, attributes, text, CDATA, comments,
// processing instructions and a skipped DOCTYPE. Returns the root element.
XmlNode parseXml(std::string_view source);

// Tolerant HTML: optional quotes, void elements, implied end tags for a few
// common elements, raw-text script/style, implied html/body wrappers.
XmlNode parseHtml(std::string_view source);

std::string escapeXmlText(std::string_view text);
std::string escapeXmlAttribute(std::string_view text);

struct SerializeOptions {
  XmlMode mode = XmlMode::Xml;
  // When set, the serialization of this node is wrapped in before/after.
  const XmlNode* mark = nullptr;
  std::string markBefore;
  std::string markAfter;
};

std::string serializeXml(const XmlNode& node, const SerializeOptions& options = {});

bool isHtmlVoidElement(std::string_view name);

}  // namespace deeplinker
