#include "deeplinker/render.hpp"
#include "deeplinker/resolver.hpp"

#include "fixtures.hpp"
#include "harness.hpp"
#include "html_scan.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <set>

using namespace deeplinker;
namespace fs = std::filesystem;

namespace {

class RenderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    fs::create_directories(state / "cache");
    for (const auto& e : fs::directory_iterator(testsupport::fixtureCache())) {
      fs::copy_file(e.path(), state / "cache" / e.path().filename());
    }
    resolver = std::make_unique<Resolver>(
        ResolverConfig{testsupport::fixtureTree(), state / "uploads", state / "cache", "http://h"}, nullptr,
        std::make_shared<testsupport::OfflineFetcher>());
  }

  std::string html(std::string_view link, const std::vector<rdf::Triple>& annotations = {}) const {
    const auto parsed = parseDeepLink(link);
    return renderHtml(resolver->resolve(parsed), parsed, annotations).body;
  }

  testsupport::TempDir state;
  std::unique_ptr<Resolver> resolver;
};

std::size_t highlights(const std::string& body) { return testsupport::tagsWithClass(body, "highlight").size(); }

}  // namespace

TEST(Negotiate, FirstApplicableRangeWins) {
  EXPECT_EQ(negotiate("", ResourceKind::File), Format::Html);
  EXPECT_EQ(negotiate("*/*", ResourceKind::File), Format::Html);
  EXPECT_EQ(negotiate("application/json", ResourceKind::Rect), Format::Json);
  EXPECT_EQ(negotiate("text/turtle", ResourceKind::File), Format::Turtle);
  EXPECT_EQ(negotiate("text/turtle", ResourceKind::String), Format::Html);
  EXPECT_EQ(negotiate("text/turtle, application/json", ResourceKind::String), Format::Json);
  EXPECT_EQ(negotiate("text/html;q=0.1, application/json;q=1", ResourceKind::File), Format::Html);
  EXPECT_EQ(negotiate("image/png, Application/JSON ; charset=utf-8", ResourceKind::Image), Format::Json);
  EXPECT_EQ(negotiate("image/png", ResourceKind::Image), Format::Html);
}

TEST_F(RenderTest, SampleLinksHaveOneHighlight) {
  for (const char* link : {testsupport::kRectLink, testsupport::kSlideLink, testsupport::kLineLink,
                           testsupport::kDownloadLink}) {
    EXPECT_EQ(highlights(html(link)), 1u) << link;
  }
  EXPECT_EQ(highlights(html("/filesystem/c.txt/content/to@string")), 0u);
  EXPECT_EQ(highlights(html("/filesystem/c.txt/content/to@string/substring@2,6")), 1u);
  EXPECT_EQ(highlights(html("/filesystem/web/logo.svg/content/to@xml")), 0u);
}

TEST_F(RenderTest, HighlightCarriesTheFragment) {
  const auto line = testsupport::tagsWithClass(html(testsupport::kLineLink), "highlight");
  EXPECT_EQ(line.at(0).first, "li");
  const auto rect = testsupport::tagsWithClass(html(testsupport::kRectLink), "highlight").at(0).second;
  EXPECT_EQ(rect.at("data-x"), "600");
  EXPECT_EQ(rect.at("data-y"), "109");
  EXPECT_EQ(rect.at("data-w"), "188");
  EXPECT_EQ(rect.at("data-h"), "36");
  const auto body = html(testsupport::kDownloadLink);
  EXPECT_NE(body.find("Participate"), std::string::npos);
}

TEST_F(RenderTest, AnchorContract) {
  const rdf::Triple note{rdf::Iri{"http://h/filesystem/c.txt"}, rdf::Iri{std::string(rdf::kRdfsComment)},
                         rdf::Literal{"<b>&", std::nullopt, std::nullopt}};
  const auto body = html("/filesystem/c.txt", {note});
  const auto code = testsupport::scanTags(body, "code");
  ASSERT_FALSE(code.empty());
  EXPECT_EQ(code[0].at("id"), "deeplink");
  EXPECT_NE(body.find(">/filesystem/c.txt</code>"), std::string::npos);

  std::map<std::string, testsupport::Attributes> forms;
  for (const auto& f : testsupport::scanTags(body, "form")) {
    if (f.count("id")) forms[f.at("id")] = f;
  }
  ASSERT_TRUE(forms.count("annotation-form"));
  EXPECT_EQ(forms["annotation-form"].at("action"), "/annotations");
  EXPECT_EQ(forms["annotation-form"].at("method"), "post");
  ASSERT_TRUE(forms.count("bookmark"));
  EXPECT_EQ(forms["bookmark"].at("action"), "/bookmarks");

  std::set<std::string> inputs;
  for (const auto& i : testsupport::scanTags(body, "input")) {
    if (i.count("name")) inputs.insert(i.at("name"));
  }
  for (const auto& i : testsupport::scanTags(body, "select")) inputs.insert(i.at("name"));
  for (const char* name : {"subject", "predicate", "object", "type", "q"}) EXPECT_TRUE(inputs.count(name)) << name;

  EXPECT_EQ(testsupport::scanTags(body, "ul").size() >= 1, true);
  EXPECT_NE(body.find("id=\"triples\""), std::string::npos);
  EXPECT_NE(body.find("&lt;b&gt;&amp;"), std::string::npos);
  EXPECT_EQ(body.find("<b>&"), std::string::npos);

  const auto stylesheets = testsupport::scanTags(body, "link");
  ASSERT_FALSE(stylesheets.empty());
  EXPECT_EQ(stylesheets[0].at("href"), "/assets/deeplinker.css");
}

TEST_F(RenderTest, ChildAnchorsMatchChildLinks) {
  for (const char* link : {"/filesystem", "/filesystem/c.txt", "/filesystem/data/sample.json/content/to@json",
                           "/filesystem/presentations/b.pptx/content/to@powerpoint"}) {
    const auto parsed = parseDeepLink(link);
    const auto resource = resolver->resolve(parsed);
    std::vector<std::string> expected;
    for (const auto& c : childLinks(resource, parsed)) expected.push_back(serializeDeepLink(c.link));
    EXPECT_EQ(testsupport::childLinks(renderHtml(resource, parsed, {}).body), expected) << link;
  }
}

TEST_F(RenderTest, JsonShape) {
  for (const char* link : {"/filesystem", testsupport::kRectLink, testsupport::kSlideLink, testsupport::kLineLink,
                           testsupport::kDownloadLink, "/filesystem/data/notes.ttl/content/to@rdf",
                           "/filesystem/docs/two-pages.pdf/content/to@pdf"}) {
    const auto parsed = parseDeepLink(link);
    const auto rep = renderJson(resolver->resolve(parsed), parsed);
    EXPECT_EQ(rep.mediaType.rfind("application/json", 0), 0u);
    const auto json = nlohmann::json::parse(rep.body);
    EXPECT_EQ(json.at("link"), serializeDeepLink(parsed)) << link;
    EXPECT_TRUE(json.at("properties").is_object());
    EXPECT_TRUE(json.at("children").is_array());
  }
  const auto rect = nlohmann::json::parse(
      renderJson(resolver->resolve(parseDeepLink(testsupport::kRectLink)), parseDeepLink(testsupport::kRectLink)).body);
  EXPECT_EQ(rect.at("kind"), "Rect");
  EXPECT_EQ(rect.at("x"), 600);
  EXPECT_EQ(rect.at("h"), 36);
}

TEST_F(RenderTest, TurtleReparsesToMetadataAndAnnotations) {
  const auto resource = resolver->resolve(parseDeepLink("/filesystem/c.txt"));
  const std::string subject = "http://h/filesystem/c.txt";
  const std::vector<rdf::Triple> annotations{
      {rdf::Iri{subject}, rdf::Iri{std::string(rdf::kRdfsComment)}, rdf::Literal{"quote \" and\nnewline", std::nullopt, "en"}},
      {rdf::Iri{subject}, rdf::Iri{"http://p/x"}, rdf::Iri{"http://o/y"}}};
  const auto rep = renderTurtle(resource, subject, annotations);
  EXPECT_EQ(rep.mediaType.rfind("text/turtle", 0), 0u);
  const auto parsed = rdf::parseTurtle(rep.body);

  const auto& meta = resource.as<FilePayload>().meta;
  const std::string dl = "http://purl.org/deeplinker/vocab#";
  const std::string xsd = "http://www.w3.org/2001/XMLSchema#";
  std::set<rdf::Triple> expected{annotations.begin(), annotations.end()};
  const auto add = [&](const std::string& p, rdf::Literal o) { expected.insert({rdf::Iri{subject}, rdf::Iri{dl + p}, o}); };
  add("name", {"c.txt", std::nullopt, std::nullopt});
  add("path", {meta.absolutePath, std::nullopt, std::nullopt});
  add("size", {std::to_string(fs::file_size(testsupport::fixtureTree() / "c.txt")), xsd + "integer", std::nullopt});
  add("modified", {formatTimestamp(meta.modifiedMs), xsd + "dateTime", std::nullopt});
  add("mediaType", {"text/plain", std::nullopt, std::nullopt});
  add("isDirectory", {"false", xsd + "boolean", std::nullopt});
  EXPECT_EQ(std::set<rdf::Triple>(parsed.begin(), parsed.end()), expected);
}

TEST(RenderPage, EscapesTitle) {
  const auto page = htmlPage("<x>", "<p>body</p>");
  EXPECT_NE(page.find("<title>&lt;x&gt;</title>"), std::string::npos);
  EXPECT_EQ(escapeHtml("a<b>&\"'"), "a&lt;b&gt;&amp;\"'");
}
