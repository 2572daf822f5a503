#include "deeplinker/selector.hpp"

#include <algorithm>
#include <cctype>

namespace deeplinker {

namespace {

bool isSpace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

bool isIdentChar(char c) {
  const auto u = static_cast<unsigned char>(c);
  return std::isalnum(u) || c == '-' || c == '_' || u >= 0x80;
}

bool equalsNoCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view text) : text_(text) {}

  Selector parse() {
    Selector selector;
    skipSpace();
    if (atEnd()) fail("empty selector");
    selector.compounds.push_back(compound());
    while (true) {
      const bool hadSpace = skipSpace();
      if (atEnd()) break;
      if (peek() == '>') {
        ++pos_;
        skipSpace();
        selector.combinators.push_back(Combinator::Child);
      } else if (hadSpace) {
        selector.combinators.push_back(Combinator::Descendant);
      } else {
        fail("unexpected character");
      }
      if (atEnd()) fail("selector ends with a combinator");
      selector.compounds.push_back(compound());
    }
    return selector;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw SelectorParseError(pos_, message);
  }
  bool atEnd() const { return pos_ >= text_.size(); }
  char peek() const { return atEnd() ? '\0' : text_[pos_]; }

  bool skipSpace() {
    const auto start = pos_;
    while (!atEnd() && isSpace(text_[pos_])) ++pos_;
    return pos_ != start;
  }

  std::string ident() {
    const auto start = pos_;
    while (!atEnd() && isIdentChar(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string attributeValue() {
    const char quote = peek();
    if (quote == '"' || quote == '\'') {
      const auto end = text_.find(quote, pos_ + 1);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      auto value = std::string(text_.substr(pos_ + 1, end - pos_ - 1));
      pos_ = end + 1;
      return value;
    }
    return ident();
  }

  CompoundSelector compound() {
    CompoundSelector out;
    const auto start = pos_;
    if (peek() == '*') {
      ++pos_;
    } else if (isIdentChar(peek())) {
      out.type = ident();
    }
    while (!atEnd()) {
      const char c = peek();
      if (c == '#') {
        ++pos_;
        out.ids.push_back(ident());
      } else if (c == '.') {
        ++pos_;
        out.classes.push_back(ident());
      } else if (c == '[') {
        ++pos_;
        skipSpace();
        AttributeTest test{ident(), std::nullopt};
        skipSpace();
        if (peek() == '=') {
          ++pos_;
          skipSpace();
          test.value = attributeValue();
          skipSpace();
        }
        if (peek() != ']') fail("expected ']'");
        ++pos_;
        out.attributes.push_back(std::move(test));
      } else if (c == ':') {
        static constexpr std::string_view kNth = ":nth-child(";
        if (text_.substr(pos_, kNth.size()) != kNth) fail("unsupported pseudo-class");
        pos_ += kNth.size();
        skipSpace();
        const auto digitsStart = pos_;
        unsigned long long k = 0;
        while (!atEnd() && std::isdigit(static_cast<unsigned char>(peek()))) {
          k = k * 10 + static_cast<unsigned>(peek() - '0');
          if (k > 1'000'000'000ULL) fail(":nth-child index too large");
          ++pos_;
        }
        if (pos_ == digitsStart) fail("expected positive integer in :nth-child");
        if (k == 0) {
          pos_ = digitsStart;
          fail(":nth-child index must be positive");
        }
        skipSpace();
        if (peek() != ')') fail("expected ')'");
        ++pos_;
        out.nthChild.push_back(static_cast<unsigned>(k));
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected selector");
    return out;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool matchesFrom(const Selector& selector, std::size_t i, const XmlNode& node,
                 const XmlTreeIndex& index, XmlMode mode) {
  if (!matchesCompound(selector.compounds[i], node, index, mode)) return false;
  if (i == 0) return true;
  const XmlNode* parent = index.parent(node);
  if (selector.combinators[i - 1] == Combinator::Child) {
    return parent && matchesFrom(selector, i - 1, *parent, index, mode);
  }
  for (const XmlNode* a = parent; a; a = index.parent(*a)) {
    if (matchesFrom(selector, i - 1, *a, index, mode)) return true;
  }
  return false;
}

bool hasClassToken(std::string_view classes, std::string_view token) {
  std::size_t i = 0;
  while (i < classes.size()) {
    while (i < classes.size() && isSpace(classes[i])) ++i;
    const auto start = i;
    while (i < classes.size() && !isSpace(classes[i])) ++i;
    if (i > start && classes.substr(start, i - start) == token) return true;
  }
  return false;
}

bool isPlainIdent(std::string_view name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), isIdentChar);
}

}  // namespace

SelectorParseError::SelectorParseError(std::size_t position, std::string message)
    : position_(position),
      what_(std::move(message) + " at position " + std::to_string(position)) {}

Selector parseSelector(std::string_view text) { return SelectorParser(text).parse(); }

std::string toString(const Selector& selector) {
  std::string out;
  for (std::size_t i = 0; i < selector.compounds.size(); ++i) {
    if (i > 0) out += selector.combinators[i - 1] == Combinator::Child ? " > " : " ";
    const auto& c = selector.compounds[i];
    const bool bare = c.ids.empty() && c.classes.empty() && c.attributes.empty() && c.nthChild.empty();
    if (c.type) out += *c.type;
    else if (bare) out += '*';
    for (const auto& id : c.ids) out += "#" + id;
    for (const auto& cls : c.classes) out += "." + cls;
    for (const auto& attr : c.attributes) {
      out += "[" + attr.name;
      if (attr.value) out += "=\"" + *attr.value + "\"";
      out += "]";
    }
    for (unsigned k : c.nthChild) out += ":nth-child(" + std::to_string(k) + ")";
  }
  return out;
}

XmlTreeIndex::XmlTreeIndex(const XmlNode& root) : root_(&root) { build(root, nullptr); }

void XmlTreeIndex::build(const XmlNode& root, const XmlNode* rootParent) {
  struct Frame {
    const XmlNode* node;
    const XmlNode* parent;
    unsigned position;
  };
  std::vector<Frame> stack{{&root, rootParent, 1}};
  while (!stack.empty()) {
    const Frame frame = stack.back();
    stack.pop_back();
    parents_[frame.node] = frame.parent;
    positions_[frame.node] = frame.position;
    order_.push_back(frame.node);
    std::vector<Frame> kids;
    unsigned position = 0;
    for (const auto& child : frame.node->children) {
      if (child.isElement()) kids.push_back({&child, frame.node, ++position});
    }
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(*it);
  }
}

const XmlNode* XmlTreeIndex::parent(const XmlNode& node) const {
  const auto it = parents_.find(&node);
  return it == parents_.end() ? nullptr : it->second;
}

unsigned XmlTreeIndex::elementPosition(const XmlNode& node) const {
  const auto it = positions_.find(&node);
  return it == positions_.end() ? 1 : it->second;
}

bool XmlTreeIndex::contains(const XmlNode& ancestor, const XmlNode& node) const {
  for (const XmlNode* n = &node; n; n = parent(*n)) {
    if (n == &ancestor) return true;
  }
  return false;
}

bool matchesCompound(const CompoundSelector& compound, const XmlNode& node,
                     const XmlTreeIndex& index, XmlMode mode) {
  if (!node.isElement()) return false;
  const bool html = mode == XmlMode::Html;
  if (compound.type) {
    if (html ? !equalsNoCase(*compound.type, node.name) : *compound.type != node.name) return false;
  }
  const auto findAttribute = [&](std::string_view key) -> const std::string* {
    if (!html) return node.attribute(key);
    for (const auto& [k, v] : node.attributes) {
      if (equalsNoCase(k, key)) return &v;
    }
    return nullptr;
  };
  for (const auto& id : compound.ids) {
    const auto* value = findAttribute("id");
    if (!value || *value != id) return false;
  }
  for (const auto& cls : compound.classes) {
    const auto* value = findAttribute("class");
    if (!value || !hasClassToken(*value, cls)) return false;
  }
  for (const auto& test : compound.attributes) {
    const auto* value = findAttribute(test.name);
    if (!value || (test.value && *value != *test.value)) return false;
  }
  for (unsigned k : compound.nthChild) {
    if (index.elementPosition(node) != k) return false;
  }
  return true;
}

bool matches(const Selector& selector, const XmlNode& node, const XmlTreeIndex& index,
             XmlMode mode) {
  if (selector.compounds.empty()) return false;
  return matchesFrom(selector, selector.compounds.size() - 1, node, index, mode);
}

const XmlNode* selectFirst(const XmlTreeIndex& index, const Selector& selector, XmlMode mode,
                           const XmlNode* scope) {
  const auto& order = index.elements();
  auto it = order.begin();
  if (scope) {
    it = std::find(order.begin(), order.end(), scope);
    if (it == order.end()) return nullptr;
  }
  for (; it != order.end(); ++it) {
    // Preorder: the first node outside the scope ends the subtree.
    if (scope && !index.contains(*scope, **it)) break;
    if (matches(selector, **it, index, mode)) return *it;
  }
  return nullptr;
}

std::string pathSelector(const XmlTreeIndex& index, const XmlNode& node) {
  std::vector<const XmlNode*> chain;
  for (const XmlNode* n = &node; n; n = index.parent(*n)) chain.push_back(n);
  std::string out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    if (!out.empty()) out += " > ";
    out += isPlainIdent((*it)->name) ? (*it)->name : "*";
    if (index.parent(**it)) out += ":nth-child(" + std::to_string(index.elementPosition(**it)) + ")";
  }
  return out;
}

}  // namespace deeplinker
