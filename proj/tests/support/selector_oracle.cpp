#include "selector_oracle.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <unordered_map>

namespace testsupport {

using deeplinker::XmlNode;

namespace {

const char* const kNames[] = {"div", "span", "g", "p", "li", "ul"};
const char* const kClasses[] = {"x", "y", "z", "main_nav"};
const char* const kIds[] = {"a1", "a2", "w3c_nav", "n"};

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct Flat {
  std::vector<const XmlNode*> order;
  std::unordered_map<const XmlNode*, const XmlNode*> parent;
  std::unordered_map<const XmlNode*, unsigned> position;
};

void flatten(const XmlNode& node, const XmlNode* parent, unsigned position, Flat& out) {
  out.order.push_back(&node);
  out.parent[&node] = parent;
  out.position[&node] = position;
  unsigned k = 0;
  for (const auto& child : node.children) {
    if (child.type == XmlNode::Type::Element) flatten(child, &node, ++k, out);
  }
}

const std::string* findAttr(const XmlNode& node, const std::string& key, bool html) {
  for (const auto& [k, v] : node.attributes) {
    if (html ? lower(k) == lower(key) : k == key) return &v;
  }
  return nullptr;
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

bool compoundHolds(const OracleCompound& c, const XmlNode& node, unsigned position, bool html) {
  if (c.type && (html ? lower(*c.type) != lower(node.name) : *c.type != node.name)) return false;
  for (const auto& id : c.ids) {
    const auto* v = findAttr(node, "id", html);
    if (!v || *v != id) return false;
  }
  for (const auto& cls : c.classes) {
    const auto* v = findAttr(node, "class", html);
    if (!v) return false;
    const auto t = tokens(*v);
    if (std::find(t.begin(), t.end(), cls) == t.end()) return false;
  }
  for (const auto& [name, value] : c.attributes) {
    const auto* v = findAttr(node, name, html);
    if (!v || (value && *v != *value)) return false;
  }
  for (unsigned n : c.nthChild) {
    if (position != n) return false;
  }
  return true;
}

void buildRandom(std::mt19937& rng, XmlNode& node, std::size_t& budget, int depth, bool mixedCase) {
  std::uniform_int_distribution<int> pct(0, 99);
  const int fanout = depth > 5 ? 0 : std::uniform_int_distribution<int>(0, 4)(rng);
  for (int i = 0; i < fanout && budget > 0; ++i) {
    if (pct(rng) < 20) node.children.push_back(XmlNode::textNode(" t "));
    std::string name = kNames[rng() % std::size(kNames)];
    if (mixedCase && pct(rng) < 30) name[0] = static_cast<char>(std::toupper(name[0]));
    auto child = XmlNode::element(name);
    if (pct(rng) < 30) child.setAttribute("id", kIds[rng() % std::size(kIds)]);
    if (pct(rng) < 50) {
      std::string cls;
      const int n = 1 + static_cast<int>(rng() % 3);
      for (int k = 0; k < n; ++k) {
        if (k) cls += pct(rng) < 50 ? " " : "  ";
        cls += kClasses[rng() % std::size(kClasses)];
      }
      child.setAttribute("class", cls);
    }
    if (pct(rng) < 25) child.setAttribute("data-k", std::to_string(rng() % 3));
    --budget;
    buildRandom(rng, child, budget, depth + 1, mixedCase);
    node.children.push_back(std::move(child));
  }
}

OracleCompound sampleCompound(std::mt19937& rng, const XmlNode& node, unsigned position, bool html) {
  std::uniform_int_distribution<int> pct(0, 99);
  OracleCompound c;
  if (pct(rng) < 60) {
    c.type = node.name;
    if (html && pct(rng) < 30) c.type = lower(node.name), (*c.type)[0] = static_cast<char>(std::toupper((*c.type)[0]));
  }
  if (const auto* id = node.attribute("id"); id && pct(rng) < 50) c.ids.push_back(*id);
  if (const auto* cls = node.attribute("class"); cls && pct(rng) < 60) {
    const auto t = tokens(*cls);
    c.classes.push_back(t[rng() % t.size()]);
  }
  if (const auto* k = node.attribute("data-k"); k && pct(rng) < 50) {
    c.attributes.emplace_back("data-k", pct(rng) < 50 ? std::optional<std::string>(*k) : std::nullopt);
  }
  if (pct(rng) < 40) c.nthChild.push_back(position);
  return c;
}

void perturb(std::mt19937& rng, OracleCompound& c) {
  switch (rng() % 5) {
    case 0: c.type = kNames[rng() % std::size(kNames)]; break;
    case 1: c.ids.push_back(kIds[rng() % std::size(kIds)]); break;
    case 2: c.classes.push_back(kClasses[rng() % std::size(kClasses)]); break;
    case 3: c.attributes.emplace_back("data-k", std::to_string(rng() % 3)); break;
    default: c.nthChild.push_back(1 + static_cast<unsigned>(rng() % 4)); break;
  }
}

}  // namespace

std::string OracleSelector::text() const {
  std::string out;
  for (std::size_t i = 0; i < compounds.size(); ++i) {
    if (i > 0) out += child[i - 1] ? " > " : " ";
    const auto& c = compounds[i];
    std::string part = c.type ? *c.type : std::string();
    for (const auto& id : c.ids) part += "#" + id;
    for (const auto& cls : c.classes) part += "." + cls;
    for (const auto& [name, value] : c.attributes) {
      part += "[" + name + (value ? "=" + *value : std::string()) + "]";
    }
    for (unsigned n : c.nthChild) part += ":nth-child(" + std::to_string(n) + ")";
    out += part.empty() ? "*" : part;
  }
  return out;
}

std::vector<const XmlNode*> allElements(const XmlNode& root) {
  Flat flat;
  flatten(root, nullptr, 1, flat);
  return flat.order;
}

XmlNode randomTree(std::mt19937& rng, std::size_t maxNodes, bool mixedCase) {
  auto root = XmlNode::element("svg");
  std::size_t budget = maxNodes > 0 ? maxNodes - 1 : 0;
  buildRandom(rng, root, budget, 0, mixedCase);
  return root;
}

OracleSelector randomSelector(std::mt19937& rng, const XmlNode& root, bool html) {
  Flat flat;
  flatten(root, nullptr, 1, flat);
  const XmlNode* target = flat.order[rng() % flat.order.size()];
  std::vector<const XmlNode*> chain;
  for (const XmlNode* n = target; n; n = flat.parent[n]) chain.push_back(n);
  std::reverse(chain.begin(), chain.end());

  // Keep the target plus a random subset of its ancestors.
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (rng() % 3 == 0) picked.push_back(i);
  }
  picked.push_back(chain.size() - 1);
  while (picked.size() > 4) picked.erase(picked.begin() + static_cast<long>(rng() % (picked.size() - 1)));

  OracleSelector sel;
  for (std::size_t k = 0; k < picked.size(); ++k) {
    const XmlNode* node = chain[picked[k]];
    sel.compounds.push_back(sampleCompound(rng, *node, flat.position[node], html));
    if (k > 0) {
      const bool adjacent = picked[k] == picked[k - 1] + 1;
      sel.child.push_back(adjacent ? rng() % 2 == 0 : rng() % 8 == 0);
    }
  }
  if (rng() % 4 == 0) perturb(rng, sel.compounds[rng() % sel.compounds.size()]);
  return sel;
}

const XmlNode* oracleSelectFirst(const XmlNode& root, const OracleSelector& selector, bool html,
                                 const XmlNode* scope) {
  Flat flat;
  flatten(root, nullptr, 1, flat);
  std::set<const XmlNode*> current;
  for (const auto* e : flat.order) {
    if (compoundHolds(selector.compounds[0], *e, flat.position[e], html)) current.insert(e);
  }
  for (std::size_t i = 1; i < selector.compounds.size(); ++i) {
    std::set<const XmlNode*> next;
    for (const auto* e : flat.order) {
      if (!compoundHolds(selector.compounds[i], *e, flat.position[e], html)) continue;
      bool linked = false;
      if (selector.child[i - 1]) {
        linked = current.count(flat.parent[e]) > 0;
      } else {
        for (const XmlNode* a = flat.parent[e]; a && !linked; a = flat.parent[a]) linked = current.count(a) > 0;
      }
      if (linked) next.insert(e);
    }
    current = std::move(next);
  }
  const XmlNode* base = scope ? scope : &root;
  for (const auto* e : flat.order) {
    if (!current.count(e)) continue;
    for (const XmlNode* a = e; a; a = flat.parent[a]) {
      if (a == base) return e;
    }
  }
  return nullptr;
}

}  // namespace testsupport
