#include "deeplinker/zip.hpp"

#include "fixtures.hpp"
#include "zip_builder.hpp"

#include <gtest/gtest.h>

using namespace deeplinker;

TEST(Zip, ReadsStoredAndDeflated) {
  std::string big(100000, 'x');
  for (std::size_t i = 0; i < big.size(); i += 7) big[i] = static_cast<char>('a' + i % 26);
  const auto bytes = testsupport::ZipBuilder().add("stored.txt", "hello", false).add("dir/big.txt", big).build();
  const ZipArchive zip(bytes);
  EXPECT_EQ(zip.names(), (std::vector<std::string>{"stored.txt", "dir/big.txt"}));
  EXPECT_TRUE(zip.contains("dir/big.txt"));
  EXPECT_EQ(zip.read("stored.txt"), "hello");
  EXPECT_EQ(zip.read("dir/big.txt"), big);
  EXPECT_THROW(zip.read("missing"), ZipError);
}

TEST(Zip, DetectsCorruption) {
  auto bytes = testsupport::ZipBuilder().add("a.txt", "payload", false).build();
  const auto at = bytes.find("payload");
  bytes[at] = 'P';
  const ZipArchive zip(bytes);
  EXPECT_THROW(zip.read("a.txt"), ZipError);
}

TEST(Zip, RejectsGarbage) {
  EXPECT_THROW(ZipArchive("not a zip at all"), ZipError);
  const auto bytes = testsupport::ZipBuilder().add("a", "b").build();
  EXPECT_THROW(ZipArchive(std::string_view(bytes).substr(0, bytes.size() - 10)), ZipError);
}

// Listing and CRC frozen from Python's zipfile module.
TEST(Zip, FixturePresentation) {
  const auto bytes = testsupport::readFile(testsupport::fixtureTree() / "presentations" / "b.pptx");
  const ZipArchive zip(bytes);
  EXPECT_EQ(zip.names().size(), 16u);
  EXPECT_EQ(zip.names().front(), "[Content_Types].xml");
  EXPECT_EQ(zip.read("ppt/slides/slide4.xml").size(), 16853u);
}
