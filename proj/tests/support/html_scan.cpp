#include "html_scan.hpp"

#include <cctype>
#include <sstream>
#include <utility>

namespace testsupport {

namespace {

struct Tag {
  std::string name;
  Attributes attributes;
};

std::vector<Tag> scanAll(std::string_view html) {
  std::vector<Tag> out;
  std::size_t i = 0;
  while ((i = html.find('<', i)) != std::string_view::npos) {
    ++i;
    if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) continue;
    Tag tag;
    while (i < html.size() && (std::isalnum(static_cast<unsigned char>(html[i])) || html[i] == '-' || html[i] == ':')) {
      tag.name += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
    }
    while (i < html.size() && html[i] != '>') {
      if (std::isspace(static_cast<unsigned char>(html[i])) || html[i] == '/') {
        ++i;
        continue;
      }
      std::string key;
      while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '=' &&
             html[i] != '>' && html[i] != '/') {
        key += static_cast<char>(std::tolower(static_cast<unsigned char>(html[i++])));
      }
      std::string value;
      if (i < html.size() && html[i] == '=') {
        ++i;
        if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
          const char q = html[i++];
          const auto end = html.find(q, i);
          if (end == std::string_view::npos) return out;
          value = decodeEntities(html.substr(i, end - i));
          i = end + 1;
        } else {
          const auto start = i;
          while (i < html.size() && !std::isspace(static_cast<unsigned char>(html[i])) && html[i] != '>') ++i;
          value = decodeEntities(html.substr(start, i - start));
        }
      }
      if (!key.empty()) tag.attributes.emplace(std::move(key), std::move(value));
    }
    out.push_back(std::move(tag));
  }
  return out;
}

}  // namespace

std::string decodeEntities(std::string_view text) {
  static const std::pair<std::string_view, char> kNamed[] = {
      {"&amp;", '&'}, {"&lt;", '<'}, {"&gt;", '>'}, {"&quot;", '"'}, {"&#39;", '\''}, {"&apos;", '\''}};
  std::string out;
  for (std::size_t i = 0; i < text.size();) {
    bool done = false;
    if (text[i] == '&') {
      for (const auto& [entity, ch] : kNamed) {
        if (text.substr(i, entity.size()) == entity) {
          out += ch;
          i += entity.size();
          done = true;
          break;
        }
      }
    }
    if (!done) out += text[i++];
  }
  return out;
}

std::vector<Attributes> scanTags(std::string_view html, std::string_view tag) {
  std::vector<Attributes> out;
  for (auto& t : scanAll(html)) {
    if (t.name == tag) out.push_back(std::move(t.attributes));
  }
  return out;
}

std::vector<std::pair<std::string, Attributes>> tagsWithClass(std::string_view html,
                                                              std::string_view token) {
  std::vector<std::pair<std::string, Attributes>> out;
  for (auto& t : scanAll(html)) {
    const auto it = t.attributes.find("class");
    if (it == t.attributes.end()) continue;
    std::istringstream in(it->second);
    for (std::string cls; in >> cls;) {
      if (cls == token) {
        out.emplace_back(t.name, std::move(t.attributes));
        break;
      }
    }
  }
  return out;
}

std::vector<std::string> childLinks(std::string_view html) {
  std::vector<std::string> out;
  for (const auto& a : scanTags(html, "a")) {
    const auto rel = a.find("rel");
    const auto href = a.find("href");
    if (rel == a.end() || href == a.end()) continue;
    std::istringstream in(rel->second);
    for (std::string r; in >> r;) {
      if (r == "child") {
        out.push_back(href->second);
        break;
      }
    }
  }
  return out;
}

}  // namespace testsupport
