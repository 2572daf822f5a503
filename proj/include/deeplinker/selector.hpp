#pragma once

// CSS selector subset used by the `cssSelector` segment:
//
//   selector  = compound *( combinator compound )
//   combinator= ">" | whitespace
//   compound  = [ type | "*" ] *( "#" ident | "." ident | "[" ident [ "=" value ] "]"
//                                | ":nth-child(" positive-int ")" )
//
// :nth-child is one-based and counts element siblings only.

#include "deeplinker/xml.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace deeplinker {

struct AttributeTest {
  std::string name;
  std::optional<std::string> value;  // nullopt: presence only

  friend bool operator==(const AttributeTest&, const AttributeTest&) = default;
};

struct CompoundSelector {
  std::optional<std::string> type;  // nullopt matches any element ("*")
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<AttributeTest> attributes;
  std::vector<unsigned> nthChild;

  friend bool operator==(const CompoundSelector&, const CompoundSelector&) = default;
};

enum class Combinator { Descendant, Child };

struct Selector {
  std::vector<CompoundSelector> compounds;
  // combinators[i] joins compounds[i] and compounds[i + 1].
  std::vector<Combinator> combinators;

  friend bool operator==(const Selector&, const Selector&) = default;
};

class SelectorParseError : public std::exception {
 public:
  SelectorParseError(std::size_t position, std::string message);
  const char* what() const noexcept override { return what_.c_str(); }
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
  std::string what_;
};

Selector parseSelector(std::string_view text);
std::string toString(const Selector& selector);

// Parent links and sibling positions for an immutable tree.
class XmlTreeIndex {
 public:
  explicit XmlTreeIndex(const XmlNode& root);

  const XmlNode& root() const { return *root_; }
  const XmlNode* parent(const XmlNode& node) const;
  // One-based position among element siblings; a parentless element is 1.
  unsigned elementPosition(const XmlNode& node) const;
  // All elements in depth-first document order.
  const std::vector<const XmlNode*>& elements() const { return order_; }
  bool contains(const XmlNode& ancestor, const XmlNode& node) const;

 private:
  void build(const XmlNode& node, const XmlNode* parent);

  const XmlNode* root_;
  std::unordered_map<const XmlNode*, const XmlNode*> parents_;
  std::unordered_map<const XmlNode*, unsigned> positions_;
  std::vector<const XmlNode*> order_;
};

bool matchesCompound(const CompoundSelector& compound, const XmlNode& node,
                     const XmlTreeIndex& index, XmlMode mode);
bool matches(const Selector& selector, const XmlNode& node, const XmlTreeIndex& index,
             XmlMode mode);

// First element in document order within `scope` (inclusive; defaults to the
// root) that matches. Ancestors outside the scope still count for
// combinators and sibling positions. Returns nullptr when nothing matches.
const XmlNode* selectFirst(const XmlTreeIndex& index, const Selector& selector, XmlMode mode,
                           const XmlNode* scope = nullptr);

// A selector that picks out `node`: its ancestry from the root, each step
// pinned with :nth-child.
std::string pathSelector(const XmlTreeIndex& index, const XmlNode& node);

}  // namespace deeplinker
