#pragma once

#include "pisynth/shards.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pisynth {

struct SceneScore {
    std::string category;
    double prob = 0.0;
};

struct PhotoRecord {
    std::string photo_id;
    std::optional<std::string> caption;
    std::optional<std::vector<SceneScore>> scene_scores;  // sorted by prob, descending
    std::string feature_ref;
    std::size_t region_count = 0;

    bool has_caption() const { return caption.has_value(); }
    /// Highest-probability category; equal probabilities resolve to the smallest name.
    std::optional<std::string> top_category() const;
};

struct ListingRecord {
    std::string listing_id;
    std::optional<std::string> location;
    std::optional<std::string> description;
    std::optional<std::vector<std::string>> amenities;
    std::vector<PhotoRecord> photos;

    std::size_t captioned_count() const;
};

struct CleanReport {
    std::size_t removed_outdoor = 0;
    std::size_t removed_unscored = 0;  // strict policy only
    std::size_t removed_email = 0;
    std::size_t removed_url = 0;
    std::size_t removed_duplicate = 0;
    std::size_t removed_empty = 0;
    std::size_t kept_captioned = 0;
    std::size_t kept_captionless = 0;
    std::size_t warn_unscored = 0;          // kept without scene scores (lenient)
    std::size_t warn_unknown_category = 0;  // kept with unmapped top category (lenient)

    CleanReport& operator+=(const CleanReport& other);
    bool operator==(const CleanReport&) const = default;
};

enum class RoomKind { indoor, outdoor };

struct IndoorPolicy {
    std::map<std::string, RoomKind> categories;
    /// Strict: unmapped categories are an error and unscored photos are dropped.
    bool strict = false;
};

/// Parses an indoor map file: a JSON object {category: "indoor" | "outdoor"}.
IndoorPolicy parse_indoor_map(std::string_view json_text, bool strict);

/// One listing per line. Throws ParseError with the line number on schema violations,
/// including duplicate listing ids.
std::vector<ListingRecord> parse_listings(const std::vector<InputLine>& lines);
std::vector<ListingRecord> parse_listings(std::string_view jsonl);

/// Stable-key-order single-line JSON for one listing.
std::string listing_to_json(const ListingRecord& listing);

/// Drops photos whose top-1 category is outdoor. Captions are never touched.
ListingRecord filter_outdoor(const ListingRecord& listing, const IndoorPolicy& policy, CleanReport& delta);

/// Removes invalid captions (empty, email, URL, duplicate). Duplicate detection spans every
/// listing passed through the same cleaner, in call order.
class CaptionCleaner {
public:
    ListingRecord clean(const ListingRecord& listing, CleanReport& delta);

private:
    std::unordered_set<std::string> seen_;
};

enum class CaptionVerdict { keep, empty, email, url };

/// Classification that does not depend on other captions (no duplicate check).
CaptionVerdict classify_caption(std::string_view caption);

struct CleanedCorpus {
    std::vector<ListingRecord> listings;
    CleanReport report;
};

/// filter_outdoor then clean_captions over the whole corpus in file order. Per-listing work
/// runs on `workers` threads; the duplicate pass is sequential, so output is worker-independent.
CleanedCorpus clean_corpus(const std::vector<ListingRecord>& corpus, const IndoorPolicy& policy,
                           std::size_t workers = 1);

using Histogram = std::map<std::size_t, std::size_t>;

struct StatsReport {
    std::size_t listings = 0;
    std::size_t photos = 0;
    std::size_t captions = 0;
    Histogram images_per_listing;
    std::map<std::string, std::size_t> scene_category_distribution;  // top-1, "(none)" if unscored
    Histogram caption_token_length;
    std::optional<Histogram> instruction_token_length;
};

inline constexpr std::string_view kUnscoredCategory = "(none)";

/// Throws DataError on an empty corpus.
StatsReport corpus_stats(const std::vector<ListingRecord>& corpus);

std::string clean_report_to_json(const CleanReport& report);
std::string stats_report_to_json(const StatsReport& report);

}  // namespace pisynth
