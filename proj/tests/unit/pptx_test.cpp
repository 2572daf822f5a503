#include "deeplinker/pptx.hpp"
#include "deeplinker/selector.hpp"

#include "fixtures.hpp"
#include "zip_builder.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

using namespace deeplinker;

namespace {

pptx::Presentation fixtureDeck() {
  static const auto bytes = testsupport::readFile(testsupport::fixtureTree() / "presentations" / "b.pptx");
  return pptx::loadPresentation(bytes);
}

}  // namespace

TEST(Pptx, SlidesOrderedNumerically) {
  const auto oracle = nlohmann::json::parse(testsupport::readFile(testsupport::fixturesDir() / "oracle.json"));
  const auto deck = fixtureDeck();
  ASSERT_EQ(deck.slides.size(), oracle["pptx"]["slideCount"].get<std::size_t>());
  for (std::size_t i = 0; i < deck.slides.size(); ++i) {
    EXPECT_EQ(deck.slides[i].partName, "ppt/slides/slide" + std::to_string(i + 1) + ".xml");
  }
}

TEST(Pptx, SlideFourShapes) {
  const auto oracle = nlohmann::json::parse(testsupport::readFile(testsupport::fixturesDir() / "oracle.json"));
  const auto shapes = pptx::slideShapes(*fixtureDeck().slides.at(3).xml);
  ASSERT_EQ(shapes.size(), oracle["pptx"]["slide4ShapeCount"].get<std::size_t>());
  EXPECT_EQ(shapes[0].name, "Kachel 1");
  EXPECT_EQ(shapes[42].name, "Fehler vermeiden");
  EXPECT_EQ(shapes[42].paragraphs, std::vector<std::string>{"Fehler vermeiden"});
  EXPECT_GT(shapes[42].width, 0);
}

TEST(Pptx, SvgProjection) {
  const auto deck = fixtureDeck();
  const auto svg = pptx::slideToSvg(*deck.slides.at(3).xml, 4, deck.widthEmu, deck.heightEmu);
  EXPECT_EQ(svg.name, "svg");
  const auto groups = svg.elementChildren();
  ASSERT_EQ(groups.size(), 1u);
  EXPECT_EQ(groups[0]->name, "g");
  EXPECT_EQ(groups[0]->elementChildren().size(), 48u);
  EXPECT_EQ(*groups[0]->elementChildren()[42]->attribute("data-shape-name"), "Fehler vermeiden");
}

TEST(Pptx, EmuToPx) {
  EXPECT_EQ(pptx::emuToPx(9525), "1");
  EXPECT_EQ(pptx::emuToPx(12192000), "1280");
  EXPECT_EQ(pptx::emuToPx(4762), "0.5");
  EXPECT_EQ(pptx::emuToPx(1), "0");
  EXPECT_EQ(pptx::emuToPx(3175), "0.333");
}

TEST(Pptx, DefaultSizeAndErrors) {
  const auto minimal = testsupport::ZipBuilder()
                           .add("[Content_Types].xml", "<Types/>")
                           .add("ppt/presentation.xml", "<p:presentation xmlns:p=\"x\"/>")
                           .add("ppt/slides/slide2.xml", "<p:sld xmlns:p=\"x\"><p:cSld><p:spTree/></p:cSld></p:sld>")
                           .add("ppt/slides/slide10.xml", "<p:sld xmlns:p=\"x\"><p:cSld><p:spTree/></p:cSld></p:sld>")
                           .build();
  const auto deck = pptx::loadPresentation(minimal);
  EXPECT_EQ(deck.widthEmu, pptx::kDefaultSlideWidth);
  ASSERT_EQ(deck.slides.size(), 2u);
  EXPECT_EQ(deck.slides[1].partName, "ppt/slides/slide10.xml");
  EXPECT_THROW(pptx::loadPresentation(testsupport::ZipBuilder().add("a", "b").build()), pptx::PptxError);
  EXPECT_THROW(pptx::loadPresentation("nope"), std::exception);
}
