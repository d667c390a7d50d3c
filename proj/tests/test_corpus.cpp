#include "fixtures.hpp"

#include "pisynth/corpus.hpp"
#include "pisynth/errors.hpp"
#include "pisynth/text.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <set>

using namespace pisynth;
using namespace pisynth::testing;

namespace {

const char* kThreePhotoLine =
    R"({"schema_version":1,"listing_id":"L1","photos":[)"
    R"({"photo_id":"p1","caption":"Cozy bedroom","scene_scores":[{"category":"bedroom","prob":0.9}],"feature_ref":"f1","region_count":3},)"
    R"({"photo_id":"p2","caption":null,"scene_scores":[{"category":"kitchen","prob":0.6},{"category":"dining_room","prob":0.3}]},)"
    R"({"photo_id":"p3","scene_scores":[{"category":"patio","prob":0.8}],"extra":"ignored"}]})";

ListingRecord single(std::vector<PhotoRecord> photos) {
    ListingRecord l;
    l.listing_id = "L";
    l.photos = std::move(photos);
    return l;
}

}  // namespace

TEST(ParseListings, ValidLine) {
    const auto corpus = parse_listings(std::string(kThreePhotoLine));
    ASSERT_EQ(corpus.size(), 1u);
    ASSERT_EQ(corpus[0].photos.size(), 3u);
    EXPECT_EQ(*corpus[0].photos[0].caption, "Cozy bedroom");
    EXPECT_FALSE(corpus[0].photos[1].caption.has_value());
    EXPECT_EQ(corpus[0].photos[0].region_count, 3u);
    EXPECT_EQ(corpus[0].photos[1].top_category(), "kitchen");
}

TEST(ParseListings, MissingListingIdReportsLine) {
    const std::string text = std::string(kThreePhotoLine) + "\n" + R"({"schema_version":1,"photos":[]})" + "\n";
    try {
        parse_listings(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("listing_id"), std::string::npos);
    }
}

TEST(ParseListings, DuplicateListingId) {
    const std::string text = std::string(kThreePhotoLine) + "\n" + kThreePhotoLine + "\n";
    try {
        parse_listings(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
    }
}

TEST(ParseListings, SchemaViolations) {
    EXPECT_THROW(parse_listings(R"({"listing_id":"a","photos":[]})"), ParseError);
    EXPECT_THROW(parse_listings(R"({"schema_version":1,"listing_id":"a"})"), ParseError);
    EXPECT_THROW(parse_listings("not json"), ParseError);
    EXPECT_THROW(parse_listings(
                     R"({"schema_version":1,"listing_id":"a","photos":[{"photo_id":"x","scene_scores":[{"category":"k","prob":1.5}]}]})"),
                 ParseError);
    EXPECT_THROW(parse_listings(
                     R"({"schema_version":1,"listing_id":"a","photos":[{"photo_id":"x","scene_scores":[{"category":"k","prob":0.1},{"category":"b","prob":0.2}]}]})"),
                 ParseError);
}

TEST(ParseListings, SerializationRoundTrip) {
    const auto corpus = abundant_corpus(5, 3);
    const auto again = parse_listings(to_jsonl(corpus));
    ASSERT_EQ(again.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) EXPECT_EQ(listing_to_json(again[i]), listing_to_json(corpus[i]));
}

TEST(TopCategory, TiesResolveToSmallestName) {
    PhotoRecord p;
    p.scene_scores = std::vector<SceneScore>{{"kitchen", 0.4}, {"bedroom", 0.4}, {"attic", 0.2}};
    EXPECT_EQ(p.top_category(), "bedroom");
}

TEST(FilterOutdoor, DropsOutdoorKeepsIndoor) {
    CleanReport d;
    const auto out = filter_outdoor(single({make_photo("a", "x", "patio"), make_photo("b", "y", "kitchen")}),
                                    fixture_policy(), d);
    ASSERT_EQ(out.photos.size(), 1u);
    EXPECT_EQ(out.photos[0].photo_id, "b");
    EXPECT_EQ(d.removed_outdoor, 1u);
}

TEST(FilterOutdoor, UnscoredPhotoLenientKeepsWithWarning) {
    PhotoRecord p = make_photo("a", "x", "kitchen");
    p.scene_scores.reset();
    CleanReport d;
    EXPECT_EQ(filter_outdoor(single({p}), fixture_policy(false), d).photos.size(), 1u);
    EXPECT_EQ(d.warn_unscored, 1u);

    CleanReport s;
    EXPECT_TRUE(filter_outdoor(single({p}), fixture_policy(true), s).photos.empty());
    EXPECT_EQ(s.removed_unscored, 1u);
}

TEST(FilterOutdoor, UnknownCategory) {
    const auto l = single({make_photo("a", "x", "ballroom")});
    CleanReport d;
    EXPECT_EQ(filter_outdoor(l, fixture_policy(false), d).photos.size(), 1u);
    EXPECT_EQ(d.warn_unknown_category, 1u);
    try {
        filter_outdoor(l, fixture_policy(true), d);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("ballroom"), std::string::npos);
    }
}

TEST(FilterOutdoor, CaptionsUntouched) {
    CleanReport d;
    const auto out = filter_outdoor(single({make_photo("a", "mail me a@b.com", "kitchen")}), fixture_policy(), d);
    EXPECT_EQ(*out.photos[0].caption, "mail me a@b.com");
}

TEST(IndoorMap, Parse) {
    const auto p = parse_indoor_map(R"({"kitchen":"indoor","patio":"outdoor"})", true);
    EXPECT_TRUE(p.strict);
    EXPECT_EQ(p.categories.at("patio"), RoomKind::outdoor);
    EXPECT_THROW(parse_indoor_map(R"({"kitchen":"inside"})", false), DataError);
    EXPECT_THROW(parse_indoor_map("[1]", false), DataError);
}

TEST(CleanCaptions, Examples) {
    CaptionCleaner cleaner;
    CleanReport d;
    const auto out = cleaner.clean(single({make_photo("a", "Contact bob@x.com for keys", "kitchen"),
                                           make_photo("b", "   ", "kitchen"), make_photo("c", "Cozy bedroom", "bedroom"),
                                           make_photo("d", "Cozy bedroom", "bedroom"),
                                           make_photo("e", "see www.x.org", "bedroom")}),
                                   d);
    ASSERT_EQ(out.photos.size(), 5u);
    EXPECT_FALSE(out.photos[0].caption);
    EXPECT_FALSE(out.photos[1].caption);
    EXPECT_EQ(*out.photos[2].caption, "Cozy bedroom");
    EXPECT_FALSE(out.photos[3].caption);
    EXPECT_FALSE(out.photos[4].caption);
    EXPECT_EQ(d.removed_email, 1u);
    EXPECT_EQ(d.removed_empty, 1u);
    EXPECT_EQ(d.removed_duplicate, 1u);
    EXPECT_EQ(d.removed_url, 1u);
    EXPECT_EQ(d.kept_captioned, 1u);
    EXPECT_EQ(d.kept_captionless, 4u);
}

TEST(CleanCaptions, ClassifyOrder) {
    EXPECT_EQ(classify_caption(""), CaptionVerdict::empty);
    EXPECT_EQ(classify_caption("a@b.co www.x.com"), CaptionVerdict::email);
    EXPECT_EQ(classify_caption("http://x"), CaptionVerdict::url);
    EXPECT_EQ(classify_caption("Cozy bedroom"), CaptionVerdict::keep);
}

TEST(CleanCorpus, CleaningFixtureCounts) {
    const auto cleaned = clean_corpus(parse_listings(cleaning_fixture_jsonl()), fixture_policy(), 2);
    const auto& r = cleaned.report;
    EXPECT_EQ(r.removed_email, 5u);
    EXPECT_EQ(r.removed_url, 5u);
    EXPECT_EQ(r.removed_duplicate, 4u);
    EXPECT_EQ(r.removed_empty, 3u);
    EXPECT_EQ(r.removed_outdoor, 1u);
    std::set<std::string> keys;
    for (const auto& l : cleaned.listings) {
        for (const auto& p : l.photos) {
            if (!p.caption) continue;
            EXPECT_EQ(classify_caption(*p.caption), CaptionVerdict::keep);
            EXPECT_TRUE(keys.insert(text::normalize_caption(*p.caption)).second);
        }
    }
}

TEST(CleanCorpus, IdempotentAndWorkerIndependent) {
    auto corpus = parse_listings(cleaning_fixture_jsonl());
    const auto extra = abundant_corpus(30, 9);
    corpus.insert(corpus.end(), extra.begin(), extra.end());
    // Reuse captions across listings so duplicates span workers.
    corpus[5].photos[0].caption = corpus[7].photos[3].caption;

    const auto once = clean_corpus(corpus, fixture_policy(), 1);
    const auto par = clean_corpus(corpus, fixture_policy(), 8);
    EXPECT_EQ(to_jsonl(once.listings), to_jsonl(par.listings));
    EXPECT_EQ(once.report, par.report);

    const auto twice = clean_corpus(once.listings, fixture_policy(), 4);
    EXPECT_EQ(to_jsonl(twice.listings), to_jsonl(once.listings));
    EXPECT_EQ(twice.report.removed_duplicate + twice.report.removed_email + twice.report.removed_url +
                  twice.report.removed_empty + twice.report.removed_outdoor,
              0u);
}

TEST(CleanCorpus, PhotoConservation) {
    const auto corpus = parse_listings(cleaning_fixture_jsonl());
    std::size_t before = 0;
    for (const auto& l : corpus) before += l.photos.size();
    const auto r = clean_corpus(corpus, fixture_policy()).report;
    EXPECT_EQ(before, r.removed_outdoor + r.removed_unscored + r.kept_captioned + r.kept_captionless);
}

TEST(CorpusStats, Examples) {
    std::vector<ListingRecord> corpus = {make_listing("a", 2, 1), make_listing("b", 3, 2)};
    for (auto& l : corpus)
        for (auto& p : l.photos)
            if (p.caption) p.caption = "one two three four";
    const auto s = corpus_stats(corpus);
    EXPECT_EQ(s.listings, 2u);
    EXPECT_EQ(s.photos, 8u);
    EXPECT_EQ(s.captions, 5u);
    EXPECT_EQ(s.images_per_listing, (Histogram{{3, 1}, {5, 1}}));
    EXPECT_EQ(s.caption_token_length, (Histogram{{4, 5}}));
    std::size_t total = 0;
    for (const auto& [cat, n] : s.scene_category_distribution) total += n;
    EXPECT_EQ(total, s.photos);
    EXPECT_THROW(corpus_stats({}), DataError);
}

TEST(CorpusStats, UnscoredBucket) {
    auto l = make_listing("a", 1, 0);
    l.photos[0].scene_scores.reset();
    const auto s = corpus_stats({l});
    EXPECT_EQ(s.scene_category_distribution.at(std::string(kUnscoredCategory)), 1u);
}
