#include <greenllm/config.hpp>

#include "test_util.hpp"

using namespace greenllm;

TEST(Config, ParsesSectionsCommentsAndWhitespace)
{
    auto doc = ConfigDocument::parse("# header\n; also comment\n\n[calibration]\n  epsilon =  0.2 \nomega=5\n[provider.OpenAI]\nest_pue = 1.2\n");
    ASSERT_EQ(doc.sections().size(), 2u);
    auto const* cal = doc.find("calibration");
    ASSERT_NE(cal, nullptr);
    EXPECT_DOUBLE_EQ(cal->require_double("epsilon"), 0.2);
    EXPECT_DOUBLE_EQ(*cal->get_double("omega"), 5.0);
    EXPECT_FALSE(cal->get_double("beta").has_value());
    auto providers = doc.entities("provider");
    ASSERT_EQ(providers.size(), 1u);
    EXPECT_EQ(providers[0].first, "OpenAI");
}

TEST(Config, EmptyDocumentHasNoSections)
{
    EXPECT_TRUE(ConfigDocument::parse("").sections().empty());
    EXPECT_TRUE(ConfigDocument::parse("\n# nothing\n").sections().empty());
}

TEST(Config, DuplicatesAreConflicts)
{
    EXPECT_ERROR_KIND(ConfigDocument::parse("[a]\nx=1\n[a]\n"), ErrorKind::Conflict);
    EXPECT_ERROR_KIND(ConfigDocument::parse("[a]\nx=1\nx=2\n"), ErrorKind::Conflict);
}

TEST(Config, MalformedLinesAreSchemaErrors)
{
    EXPECT_ERROR_KIND(ConfigDocument::parse("[a\n"), ErrorKind::Schema);
    EXPECT_ERROR_KIND(ConfigDocument::parse("[a]\njust words\n"), ErrorKind::Schema);
    EXPECT_ERROR_KIND(ConfigDocument::parse("[]\n"), ErrorKind::Schema);
    auto doc = ConfigDocument::parse("[a]\nx = abc\n");
    EXPECT_ERROR_KIND((void)doc.find("a")->require_double("x"), ErrorKind::Schema);
    EXPECT_ERROR_KIND((void)doc.find("a")->require_double("missing"), ErrorKind::Schema);
}

TEST(Config, KeysBeforeFirstSectionGoToUnnamedSection)
{
    auto doc = ConfigDocument::parse("x = 1\n[b]\ny = 2\n");
    ASSERT_NE(doc.find(""), nullptr);
    EXPECT_EQ(*doc.find("")->find("x"), "1");
}

TEST(Config, MissingFileIsIoError)
{
    EXPECT_ERROR_KIND(ConfigDocument::load("/nonexistent/greenllm.ini"), ErrorKind::Io);
}
