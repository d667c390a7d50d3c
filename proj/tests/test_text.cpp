#include "pisynth/random.hpp"
#include "pisynth/text.hpp"

#include <gtest/gtest.h>

#include <regex>
#include <string>

using namespace pisynth;

TEST(Text, SplitWhitespace) {
    EXPECT_EQ(text::split_whitespace("  a \t b\nc  "), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(text::split_whitespace("   ").empty());
}

TEST(Text, WordTokensPeelPunctuation) {
    EXPECT_EQ(text::word_tokens("Walk past the sofa, then stop."),
              (std::vector<std::string>{"Walk", "past", "the", "sofa", ",", "then", "stop", "."}));
    EXPECT_EQ(text::word_tokens("(kitchen)"), (std::vector<std::string>{"(", "kitchen", ")"}));
}

TEST(Text, DetokenizeAttachesClosingPunctuation) {
    EXPECT_EQ(text::detokenize({"walk", "past", "the", "sofa", ",", "then", "stop", "."}),
              "walk past the sofa, then stop.");
}

TEST(Text, CollapseWhitespace) {
    EXPECT_EQ(text::collapse_whitespace("  cozy \t\n bedroom  "), "cozy bedroom");
    EXPECT_TRUE(text::is_blank(" \t\n"));
    EXPECT_FALSE(text::is_blank(" x "));
}

TEST(NormalizeCaption, CaseWhitespaceAndTrailingPunctuation) {
    EXPECT_EQ(text::normalize_caption("  Cozy   Bedroom. "), "cozy bedroom");
    EXPECT_EQ(text::normalize_caption("Nice view!?"), "nice view");
    EXPECT_EQ(text::normalize_caption("Room 1.5"), "room 1.5");
}

TEST(NormalizeCaption, UnicodeCompositionAndCase) {
    // "e" + combining acute vs precomposed "é".
    EXPECT_EQ(text::normalize_caption("Caf\x65\xcc\x81"), text::normalize_caption("caf\xc3\xa9"));
    EXPECT_EQ(text::normalize_caption("\xc3\x89TAGE"), "\xc3\xa9tage");
}

TEST(Email, Examples) {
    EXPECT_TRUE(text::contains_email("Contact bob@x.com for keys"));
    EXPECT_TRUE(text::contains_email("HOST@EXAMPLE.ORG"));
    EXPECT_FALSE(text::contains_email("bob@x"));
    EXPECT_FALSE(text::contains_email("@x.com"));
    EXPECT_FALSE(text::contains_email("price 5@home"));
}

TEST(Url, Examples) {
    EXPECT_TRUE(text::contains_url("see http://x"));
    EXPECT_TRUE(text::contains_url("HTTPS://pics.example.net"));
    EXPECT_TRUE(text::contains_url("visit www.a.com"));
    EXPECT_FALSE(text::contains_url("http:// spaced"));
    EXPECT_FALSE(text::contains_url("www. "));
    EXPECT_FALSE(text::contains_url("wwwhat"));
}

// Random strings over a small alphabet rich in pattern characters, checked against std::regex.
TEST(PatternMatchers, AgreeWithRegexOracle) {
    const std::regex email(R"([A-Za-z0-9._%+\-]+@[A-Za-z0-9.\-]+\.[A-Za-z]{2,})", std::regex::icase);
    const std::regex url(R"((https?://|www\.)\S)", std::regex::icase);
    const std::string alphabet = "abZ09.@_%+- :/wWhHtTpPsS\t";
    RandomStream rng(1234);
    std::size_t email_hits = 0, url_hits = 0;
    for (int i = 0; i < 20000; ++i) {
        std::string s;
        const auto len = uniform_int(rng, 0, 18);
        for (std::int64_t k = 0; k < len; ++k) s += alphabet[bounded_uniform(rng, alphabet.size())];
        if (bounded_uniform(rng, 4) == 0) s.insert(bounded_uniform(rng, s.size() + 1), "www.");
        if (bounded_uniform(rng, 4) == 0) s.insert(bounded_uniform(rng, s.size() + 1), "a@b.");
        const bool e = std::regex_search(s, email);
        const bool u = std::regex_search(s, url);
        ASSERT_EQ(text::contains_email(s), e) << '"' << s << '"';
        ASSERT_EQ(text::contains_url(s), u) << '"' << s << '"';
        email_hits += e;
        url_hits += u;
    }
    EXPECT_GT(email_hits, 100u);
    EXPECT_GT(url_hits, 100u);
}

TEST(Text, NaiveSingular) {
    EXPECT_EQ(text::naive_singular("Chairs"), "chair");
    EXPECT_EQ(text::naive_singular("s"), "s");
    EXPECT_EQ(text::naive_singular("table"), "table");
}
