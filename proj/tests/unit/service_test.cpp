#include "deeplinker/hash.hpp"
#include "deeplinker/service.hpp"

#include "fixtures.hpp"
#include "harness.hpp"
#include "html_scan.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <fstream>

using namespace deeplinker;
namespace fs = std::filesystem;
using testsupport::ServiceRunner;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override { runner = std::make_unique<ServiceRunner>(testsupport::fixtureConfig(state)); }

  httplib::Result get(const std::string& path, const std::string& accept = "text/html") {
    auto c = runner->client();
    return testsupport::get(c, path, accept);
  }

  httplib::Result postForm(const std::string& path, const httplib::Params& params,
                           const std::string& accept = "text/html") {
    auto c = runner->client();
    return c.Post(path, httplib::Headers{{"Accept", accept}}, params);
  }

  testsupport::TempDir state;
  std::unique_ptr<ServiceRunner> runner;
};

nlohmann::json errorBody(const httplib::Result& res) { return nlohmann::json::parse(res->body); }

}  // namespace

TEST_F(ServiceTest, IndexListsEntries) {
  const auto res = get("/");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(testsupport::childLinks(res->body), (std::vector<std::string>{"/filesystem", "/remote", "/bookmarks"}));
}

TEST_F(ServiceTest, SampleLinksOverHttp) {
  for (const char* link : {testsupport::kRectLink, testsupport::kSlideLink, testsupport::kLineLink,
                           testsupport::kDownloadLink}) {
    const auto res = get(link);
    ASSERT_TRUE(res) << link;
    EXPECT_EQ(res->status, 200) << link;
    EXPECT_EQ(testsupport::tagsWithClass(res->body, "highlight").size(), 1u) << link;
    EXPECT_EQ(res->get_header_value("Content-Type"), "text/html; charset=utf-8");
  }
}

TEST_F(ServiceTest, StatusMapping) {
  const std::vector<std::pair<std::string, int>> cases{
      {"/filesystem/c.txt/content/to@string/bogus@1", 400},
      {"/filesystem/c.txt/content/to@string/line@1,2", 400},
      {"/filesystem/c.txt/content/to@string/line@x", 400},
      {"/filesystem//c.txt", 400},
      {"/filesystem/%zz", 400},
      {"/filesystem/missing", 404},
      {"/filesystem/c.txt/content/to@string/line@9", 404},
      {"/filesystem/web/w3c.html/content/to@html/cssSelector@video", 404},
      {"/filesystem/c.txt/content/to@image", 422},
      {"/filesystem/c.txt/line@0", 422},
      {"/filesystem/..", 403},
      {"/remote/download@http%253A%252F%252Fnot-cached.example", 502},
  };
  for (const auto& [link, status] : cases) {
    const auto res = get(link, "application/json");
    ASSERT_TRUE(res) << link;
    EXPECT_EQ(res->status, status) << link;
    const auto body = errorBody(res);
    EXPECT_EQ(body.at("status"), status) << link;
    EXPECT_TRUE(body.at("code").is_string());
  }
  const auto html = get("/filesystem/c.txt/content/to@string/line@9");
  const auto errors = testsupport::tagsWithClass(html->body, "error");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].second.at("data-code"), "IndexOutOfRange");
  EXPECT_EQ(errors[0].second.at("data-segment"), "4");
}

TEST_F(ServiceTest, Negotiation) {
  const auto json = get("/filesystem/c.txt", "application/json");
  EXPECT_EQ(json->status, 200);
  EXPECT_EQ(nlohmann::json::parse(json->body).at("kind"), "File");
  const auto turtle = get("/filesystem/c.txt", "text/turtle");
  EXPECT_EQ(turtle->get_header_value("Content-Type"), "text/turtle; charset=utf-8");
  EXPECT_NO_THROW(rdf::parseTurtle(turtle->body));
  const auto fallback = get(testsupport::kLineLink, "text/turtle");
  EXPECT_EQ(fallback->status, 200);
  EXPECT_EQ(fallback->get_header_value("Content-Type"), "text/html; charset=utf-8");
  EXPECT_EQ(json->get_header_value("Vary"), "Accept");
}

TEST_F(ServiceTest, AnnotationPostRedirectsAndShowsTriple) {
  const auto res = postForm("/annotations", {{"subject", testsupport::kRectLink},
                                             {"predicate", "rdfs:comment"},
                                             {"object", "Artificial"},
                                             {"type", "literal"}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 303);
  EXPECT_EQ(res->get_header_value("Location"), testsupport::kRectLink);
  const auto page = get(testsupport::kRectLink);
  EXPECT_NE(page->body.find("Artificial"), std::string::npos);

  const auto turtle = get("/filesystem/c.txt", "text/turtle");
  EXPECT_EQ(turtle->body.find("Artificial"), std::string::npos);
}

TEST_F(ServiceTest, AnnotationPostJson) {
  const auto base = runner->service().config().baseIri;
  const auto res = postForm("/annotations",
                            {{"subject", base + "/filesystem/c.txt"},
                             {"predicate", "http://purl.org/dc/terms/subject"},
                             {"object", "http://dbpedia.org/resource/Text"},
                             {"type", "iri"}},
                            "application/json");
  ASSERT_EQ(res->status, 201);
  const auto body = nlohmann::json::parse(res->body);
  EXPECT_EQ(body.at("subject"), base + "/filesystem/c.txt");
  EXPECT_EQ(body.at("object"), "<http://dbpedia.org/resource/Text>");
  EXPECT_EQ(body.at("objectText"), "http://dbpedia.org/resource/Text");
  const auto lang = postForm("/annotations",
                             {{"subject", "/filesystem/c.txt"}, {"predicate", "rdfs:label"}, {"object", "Text"},
                              {"lang", "de"}},
                             "application/json");
  EXPECT_EQ(nlohmann::json::parse(lang->body).at("object"), "\"Text\"@de");
}

TEST_F(ServiceTest, AnnotationPostRejections) {
  const std::vector<httplib::Params> bad{
      {{"predicate", "rdfs:comment"}, {"object", "x"}},
      {{"subject", "/filesystem/c.txt"}, {"object", "x"}},
      {{"subject", "/filesystem/c.txt"}, {"predicate", "rdfs:comment"}},
      {{"subject", "not a link"}, {"predicate", "rdfs:comment"}, {"object", "x"}},
      {{"subject", "/filesystem/c.txt"}, {"predicate", "comment"}, {"object", "x"}},
      {{"subject", "/filesystem/c.txt"}, {"predicate", "rdfs:comment"}, {"object", "rel"}, {"type", "iri"}},
      {{"subject", "/filesystem/c.txt"}, {"predicate", "rdfs:comment"}, {"object", "x"}, {"type", "blank"}},
      {{"subject", "/filesystem/c.txt"}, {"predicate", "rdfs:comment"}, {"object", "x"}, {"lang", "en"},
       {"datatype", "xsd:string"}},
  };
  for (const auto& params : bad) {
    const auto res = postForm("/annotations", params, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400) << res->body;
  }
  EXPECT_EQ(runner->service().store().searchLiteral("x").size(), 0u);
}

TEST_F(ServiceTest, BookmarksListedOnce) {
  for (int i = 0; i < 2; ++i) {
    const auto res = postForm("/bookmarks", {{"subject", testsupport::kLineLink}});
    EXPECT_EQ(res->status, 303);
  }
  const auto page = get("/bookmarks");
  EXPECT_EQ(page->status, 200);
  EXPECT_EQ(testsupport::childLinks(page->body), std::vector<std::string>{testsupport::kLineLink});
  const auto followed = get("/bookmarks/index@0", "application/json");
  EXPECT_EQ(nlohmann::json::parse(followed->body).at("text"), "line three");
  const auto marked = get(testsupport::kLineLink);
  const auto forms = testsupport::scanTags(marked->body, "form");
  const auto it = std::find_if(forms.begin(), forms.end(), [](const auto& f) { return f.count("id") && f.at("id") == "bookmark"; });
  ASSERT_NE(it, forms.end());
  EXPECT_EQ(it->at("data-bookmarked"), "true");
}

TEST_F(ServiceTest, Search) {
  postForm("/annotations", {{"subject", testsupport::kRectLink}, {"predicate", "rdfs:comment"}, {"object", "Artificial"}});
  const auto json = get("/search?q=artificial", "application/json");
  ASSERT_EQ(json->status, 200);
  const auto hits = nlohmann::json::parse(json->body);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].at("link"), testsupport::kRectLink);
  const auto html = get("/search?q=ARTI+FICIAL");
  EXPECT_EQ(html->status, 200);
  const auto none = testsupport::scanTags(html->body, "ul");
  EXPECT_EQ(testsupport::scanTags(get("/search?q=artif")->body, "a").size(),
            testsupport::scanTags(get("/search?q=zzz")->body, "a").size() + 1);
  EXPECT_EQ(get("/search")->status, 400);
  EXPECT_EQ(get("/search?q=", "application/json")->status, 400);
}

TEST_F(ServiceTest, Assets) {
  const auto css = get("/assets/deeplinker.css");
  EXPECT_EQ(css->status, 200);
  EXPECT_EQ(css->get_header_value("Content-Type"), "text/css; charset=utf-8");
  EXPECT_FALSE(css->body.empty());
  const auto js = get("/assets/deeplinker.js");
  EXPECT_EQ(js->status, 200);
  EXPECT_NE(js->body.find("annotation-form"), std::string::npos);
  EXPECT_EQ(get("/assets/missing.js")->status, 404);
  EXPECT_EQ(get("/assets/..%2Fservice.cpp")->status, 404);
  EXPECT_EQ(get("/assets/.hidden")->status, 404);
}

TEST(ServiceAssets, DirectoryOverridesBuiltIns) {
  testsupport::TempDir state;
  auto config = testsupport::fixtureConfig(state);
  fs::create_directories(state / "assets");
  std::ofstream(state / "assets" / "deeplinker.css") << "body{color:red}";
  config.assetsDir = state / "assets";
  ServiceRunner runner(config);
  auto c = runner.client();
  EXPECT_EQ(testsupport::get(c, "/assets/deeplinker.css")->body, "body{color:red}");
  EXPECT_EQ(testsupport::get(c, "/assets/deeplinker.js")->status, 200);
}

TEST(ServiceUpload, StoresByHashAndEnforcesLimit) {
  testsupport::TempDir state;
  auto config = testsupport::fixtureConfig(state);
  config.maxUploadBytes = 1024;
  ServiceRunner runner(config);
  auto c = runner.client();

  const httplib::MultipartFormDataItems items{{"file", "line a\nline b\n", "notes.txt", "text/plain"}};
  const auto res = c.Post("/remote", items);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_EQ(res->body, "/remote/" + sha256Hex("line a\nline b\n"));
  EXPECT_EQ(res->get_header_value("Location"), res->body);
  const auto line = testsupport::get(c, res->body + "/content/to@string/line@1", "application/json");
  EXPECT_EQ(nlohmann::json::parse(line->body).at("text"), "line b");
  EXPECT_EQ(c.Post("/remote", items)->status, 201);
  EXPECT_EQ(fs::directory_iterator(config.uploadDir) == fs::directory_iterator(), false);

  const httplib::MultipartFormDataItems big{{"file", std::string(2048, 'x'), "big.bin", "application/octet-stream"}};
  EXPECT_EQ(c.Post("/remote", big)->status, 413);
  const httplib::MultipartFormDataItems noFile{{"field", "value", "", ""}};
  EXPECT_EQ(c.Post("/remote", noFile)->status, 400);
  EXPECT_EQ(c.Post("/remote", "raw", "text/plain")->status, 400);
  const auto remote = testsupport::get(c, "/remote", "application/json");
  EXPECT_EQ(nlohmann::json::parse(remote->body).at("uploads").size(), 1u);
}

TEST_F(ServiceTest, SparqlMount) {
  auto c = runner->client();
  const auto update = c.Post("/fuseki/annotation",
                             "INSERT DATA { <http://x/s> <http://www.w3.org/2000/01/rdf-schema#comment> \"hello\" }",
                             "application/sparql-update");
  EXPECT_EQ(update->status, 204);
  const auto query = c.Post("/fuseki/annotation", "SELECT ?o WHERE { <http://x/s> ?p ?o }", "application/sparql-query");
  ASSERT_EQ(query->status, 200);
  EXPECT_EQ(query->get_header_value("Content-Type"), "application/sparql-results+json");
  const auto results = nlohmann::json::parse(query->body);
  EXPECT_EQ(results["results"]["bindings"][0]["o"]["value"], "hello");
  const auto viaGet = get("/fuseki/annotation?query=SELECT+%3Fs+WHERE+%7B+%3Fs+%3Fp+%3Fo+%7D");
  EXPECT_EQ(viaGet->status, 200);
  EXPECT_EQ(c.Post("/fuseki/annotation", "SELEKT", "application/sparql-query")->status, 400);
}

// The same operations through the SPARQL client and directly on an embedded
// store give the same answers.
TEST(ServiceExternalStore, MatchesEmbeddedStore) {
  testsupport::TempDir endpointState;
  ServiceRunner endpoint(testsupport::fixtureConfig(endpointState));
  testsupport::TempDir clientState;
  auto clientConfig = testsupport::fixtureConfig(clientState);
  clientConfig.sparqlEndpoint = endpoint.baseUrl() + "/fuseki/annotation";
  clientConfig.baseIri = "http://links.example";
  ServiceRunner client(clientConfig);

  testsupport::TempDir localState;
  auto localConfig = testsupport::fixtureConfig(localState);
  localConfig.baseIri = "http://links.example";
  ServiceRunner local(localConfig);

  for (auto* runner : {&client, &local}) {
    auto c = runner->client();
    const std::vector<httplib::Params> posts{
        {{"subject", testsupport::kRectLink}, {"predicate", "rdfs:comment"}, {"object", "Artificial"}},
        {{"subject", testsupport::kRectLink}, {"predicate", "rdfs:comment"}, {"object", "Artificial"}},
        {{"subject", testsupport::kLineLink}, {"predicate", "rdfs:label"}, {"object", "Zeile \"drei\""}, {"lang", "de"}},
        {{"subject", testsupport::kLineLink}, {"predicate", "dl:seeAlso"}, {"object", "http://example.org/x"}, {"type", "iri"}},
    };
    for (const auto& p : posts) ASSERT_EQ(c.Post("/annotations", p)->status, 303);
    ASSERT_EQ(c.Post("/bookmarks", httplib::Params{{"subject", testsupport::kSlideLink}})->status, 303);
    ASSERT_EQ(c.Post("/bookmarks", httplib::Params{{"subject", testsupport::kSlideLink}})->status, 303);
  }
  for (const char* subject : {testsupport::kRectLink, testsupport::kLineLink, testsupport::kSlideLink}) {
    const auto iri = std::string("http://links.example") + subject;
    EXPECT_EQ(client.service().store().listBySubject(iri), local.service().store().listBySubject(iri)) << subject;
  }
  EXPECT_EQ(client.service().store().searchLiteral("ARTIF"), local.service().store().searchLiteral("ARTIF"));
  EXPECT_EQ(client.service().store().searchLiteral("drei"), local.service().store().searchLiteral("drei"));
  EXPECT_EQ(client.service().store().listBookmarks(), local.service().store().listBookmarks());
  auto cc = client.client();
  auto lc = local.client();
  for (const char* path : {testsupport::kLineLink, "/bookmarks", "/search?q=artificial"}) {
    EXPECT_EQ(testsupport::get(cc, path)->body, testsupport::get(lc, path)->body) << path;
  }
  EXPECT_EQ(testsupport::get(cc, "/fuseki/annotation?query=x")->status, 404);
}

TEST(ServiceExternalStore, UnreachableEndpointIs502) {
  testsupport::TempDir state;
  auto config = testsupport::fixtureConfig(state);
  config.sparqlEndpoint = "http://127.0.0.1:1/sparql";
  ServiceRunner runner(config);
  auto c = runner.client();
  EXPECT_EQ(testsupport::get(c, testsupport::kLineLink)->status, 502);
  EXPECT_EQ(testsupport::get(c, "/search?q=x")->status, 502);
  EXPECT_EQ(c.Post("/annotations", httplib::Params{{"subject", "/filesystem"}, {"predicate", "rdfs:comment"},
                                                   {"object", "x"}})->status,
            502);
  EXPECT_EQ(testsupport::get(c, "/filesystem/c.txt", "application/json")->status, 200);
}

TEST(ServiceConfig, Validation) {
  ServiceConfig missing;
  missing.rootDir = "/definitely/not/here";
  EXPECT_THROW(missing.finalize(), std::invalid_argument);
  testsupport::TempDir state;
  auto config = testsupport::fixtureConfig(state);
  config.port = 70000;
  EXPECT_THROW(config.finalize(), std::invalid_argument);
  config.port = 8080;
  config.bindAddress = "0.0.0.0";
  config.finalize();
  EXPECT_EQ(config.baseIri, "http://0.0.0.0:8080");
  config.baseIri = "https://links.example/";
  config.finalize();
  EXPECT_EQ(config.baseIri, "https://links.example");
  config.baseIri = "relative";
  EXPECT_THROW(config.finalize(), std::invalid_argument);
}

TEST(QueryString, PlusAndPercent) {
  const auto fields = parseQueryString("q=a+b%2Bc&empty&x=%zz&q=2");
  EXPECT_EQ(fields.count("q"), 2u);
  EXPECT_EQ(fields.find("q")->second, "a b+c");
  EXPECT_EQ(fields.find("empty")->second, "");
  EXPECT_EQ(fields.find("x")->second, "%zz");
}
