#include "pisynth/corpus.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/parallel.hpp"
#include "pisynth/text.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <unordered_set>

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace pisynth {

std::optional<std::string> PhotoRecord::top_category() const {
    if (!scene_scores || scene_scores->empty()) return std::nullopt;
    const auto& scores = *scene_scores;
    const std::string* best = &scores.front().category;
    for (std::size_t i = 1; i < scores.size() && scores[i].prob == scores.front().prob; ++i) {
        if (scores[i].category < *best) best = &scores[i].category;
    }
    return *best;
}

std::size_t ListingRecord::captioned_count() const {
    std::size_t n = 0;
    for (const auto& p : photos) n += p.has_caption() ? 1 : 0;
    return n;
}

CleanReport& CleanReport::operator+=(const CleanReport& o) {
    removed_outdoor += o.removed_outdoor;
    removed_unscored += o.removed_unscored;
    removed_email += o.removed_email;
    removed_url += o.removed_url;
    removed_duplicate += o.removed_duplicate;
    removed_empty += o.removed_empty;
    kept_captioned += o.kept_captioned;
    kept_captionless += o.kept_captionless;
    warn_unscored += o.warn_unscored;
    warn_unknown_category += o.warn_unknown_category;
    return *this;
}

IndoorPolicy parse_indoor_map(std::string_view json_text, bool strict) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("indoor map: ") + e.what());
    }
    if (!j.is_object()) throw DataError("indoor map: expected a JSON object");
    IndoorPolicy policy;
    policy.strict = strict;
    for (const auto& [category, kind] : j.items()) {
        if (kind == "indoor") {
            policy.categories[category] = RoomKind::indoor;
        } else if (kind == "outdoor") {
            policy.categories[category] = RoomKind::outdoor;
        } else {
            throw DataError("indoor map: category '" + category + "' must map to \"indoor\" or \"outdoor\"");
        }
    }
    return policy;
}

namespace {

std::optional<std::string> optional_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::string required_string(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) throw std::invalid_argument(std::string("missing field '") + key + "'");
    if (!it->is_string()) throw std::invalid_argument(std::string("field '") + key + "' must be a string");
    std::string v = it->get<std::string>();
    if (v.empty()) throw std::invalid_argument(std::string("field '") + key + "' is empty");
    return v;
}

PhotoRecord parse_photo(const json& p) {
    if (!p.is_object()) throw std::invalid_argument("photo entries must be objects");
    PhotoRecord photo;
    photo.photo_id = required_string(p, "photo_id");
    photo.caption = optional_string(p, "caption");
    photo.feature_ref = optional_string(p, "feature_ref").value_or("");
    if (auto it = p.find("region_count"); it != p.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 0) {
            throw std::invalid_argument("photo '" + photo.photo_id + "': region_count must be a non-negative integer");
        }
        photo.region_count = it->get<std::size_t>();
    }
    if (auto it = p.find("scene_scores"); it != p.end() && !it->is_null()) {
        if (!it->is_array()) throw std::invalid_argument("photo '" + photo.photo_id + "': scene_scores must be an array");
        std::vector<SceneScore> scores;
        for (const auto& s : *it) {
            if (!s.is_object()) throw std::invalid_argument("photo '" + photo.photo_id + "': scene score must be an object");
            SceneScore score;
            score.category = required_string(s, "category");
            auto prob = s.find("prob");
            if (prob == s.end() || !prob->is_number()) {
                throw std::invalid_argument("photo '" + photo.photo_id + "': scene score needs numeric 'prob'");
            }
            score.prob = prob->get<double>();
            if (!(score.prob >= 0.0 && score.prob <= 1.0)) {
                throw std::invalid_argument("photo '" + photo.photo_id + "': prob outside [0,1]");
            }
            if (!scores.empty() && score.prob > scores.back().prob) {
                throw std::invalid_argument("photo '" + photo.photo_id + "': scene_scores not sorted by prob descending");
            }
            scores.push_back(std::move(score));
        }
        photo.scene_scores = std::move(scores);
    }
    return photo;
}

ListingRecord parse_listing(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
    auto version = j.find("schema_version");
    if (version == j.end()) throw std::invalid_argument("missing field 'schema_version'");
    if (!version->is_number_integer() || version->get<long long>() != kSchemaVersion) {
        throw std::invalid_argument("unsupported schema_version " + version->dump());
    }
    ListingRecord listing;
    listing.listing_id = required_string(j, "listing_id");
    listing.location = optional_string(j, "location");
    listing.description = optional_string(j, "description");
    if (auto it = j.find("amenities"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw std::invalid_argument("field 'amenities' must be an array");
        std::vector<std::string> amenities;
        for (const auto& a : *it) {
            if (!a.is_string()) throw std::invalid_argument("amenities must be strings");
            amenities.push_back(a.get<std::string>());
        }
        listing.amenities = std::move(amenities);
    }
    auto photos = j.find("photos");
    if (photos == j.end() || !photos->is_array()) throw std::invalid_argument("missing array field 'photos'");
    std::unordered_set<std::string> ids;
    for (const auto& p : *photos) {
        PhotoRecord photo = parse_photo(p);
        if (!ids.insert(photo.photo_id).second) {
            throw std::invalid_argument("duplicate photo_id '" + photo.photo_id + "'");
        }
        listing.photos.push_back(std::move(photo));
    }
    return listing;
}

}  // namespace

std::vector<ListingRecord> parse_listings(const std::vector<InputLine>& lines) {
    std::vector<ListingRecord> out;
    out.reserve(lines.size());
    std::unordered_set<std::string> ids;
    for (const auto& line : lines) {
        ListingRecord listing;
        try {
            listing = parse_listing(json::parse(line.text));
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
        if (!ids.insert(listing.listing_id).second) {
            throw ParseError(line.number, "duplicate listing_id '" + listing.listing_id + "'");
        }
        out.push_back(std::move(listing));
    }
    return out;
}

std::vector<ListingRecord> parse_listings(std::string_view jsonl) {
    std::vector<InputLine> lines;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (!text::is_blank(line)) lines.push_back({n, line});
    }
    return parse_listings(lines);
}

std::string listing_to_json(const ListingRecord& listing) {
    ojson j;
    j["schema_version"] = kSchemaVersion;
    j["listing_id"] = listing.listing_id;
    if (listing.location) j["location"] = *listing.location;
    if (listing.description) j["description"] = *listing.description;
    if (listing.amenities) j["amenities"] = *listing.amenities;
    j["photos"] = ojson::array();
    for (const auto& p : listing.photos) {
        ojson pj;
        pj["photo_id"] = p.photo_id;
        if (p.caption) pj["caption"] = *p.caption;
        if (p.scene_scores) {
            pj["scene_scores"] = ojson::array();
            for (const auto& s : *p.scene_scores) pj["scene_scores"].push_back({{"category", s.category}, {"prob", s.prob}});
        }
        pj["feature_ref"] = p.feature_ref;
        pj["region_count"] = p.region_count;
        j["photos"].push_back(std::move(pj));
    }
    return j.dump();
}

ListingRecord filter_outdoor(const ListingRecord& listing, const IndoorPolicy& policy, CleanReport& delta) {
    ListingRecord out = listing;
    out.photos.clear();
    for (const auto& photo : listing.photos) {
        const auto top = photo.top_category();
        if (!top) {
            if (policy.strict) {
                ++delta.removed_unscored;
                continue;
            }
            ++delta.warn_unscored;
            out.photos.push_back(photo);
            continue;
        }
        auto it = policy.categories.find(*top);
        if (it == policy.categories.end()) {
            if (policy.strict) {
                throw DataError("listing '" + listing.listing_id + "', photo '" + photo.photo_id +
                                "': scene category '" + *top + "' missing from indoor map");
            }
            ++delta.warn_unknown_category;
            out.photos.push_back(photo);
            continue;
        }
        if (it->second == RoomKind::outdoor) {
            ++delta.removed_outdoor;
            continue;
        }
        out.photos.push_back(photo);
    }
    return out;
}

CaptionVerdict classify_caption(std::string_view caption) {
    if (text::is_blank(caption)) return CaptionVerdict::empty;
    if (text::contains_email(caption)) return CaptionVerdict::email;
    if (text::contains_url(caption)) return CaptionVerdict::url;
    return CaptionVerdict::keep;
}

namespace {

struct CaptionPlan {
    std::vector<CaptionVerdict> verdicts;  // per photo; keep for captionless photos
    std::vector<std::string> keys;         // dedup key when verdict is keep
};

CaptionPlan plan_captions(const ListingRecord& listing) {
    CaptionPlan plan;
    plan.verdicts.reserve(listing.photos.size());
    plan.keys.resize(listing.photos.size());
    for (std::size_t i = 0; i < listing.photos.size(); ++i) {
        const auto& p = listing.photos[i];
        if (!p.caption) {
            plan.verdicts.push_back(CaptionVerdict::keep);
            continue;
        }
        const CaptionVerdict v = classify_caption(*p.caption);
        plan.verdicts.push_back(v);
        if (v == CaptionVerdict::keep) plan.keys[i] = text::normalize_caption(*p.caption);
    }
    return plan;
}

ListingRecord apply_plan(const ListingRecord& listing, const CaptionPlan& plan,
                         std::unordered_set<std::string>& seen, CleanReport& delta) {
    ListingRecord out = listing;
    for (std::size_t i = 0; i < out.photos.size(); ++i) {
        auto& p = out.photos[i];
        if (p.caption) {
            switch (plan.verdicts[i]) {
                case CaptionVerdict::empty: ++delta.removed_empty; p.caption.reset(); break;
                case CaptionVerdict::email: ++delta.removed_email; p.caption.reset(); break;
                case CaptionVerdict::url: ++delta.removed_url; p.caption.reset(); break;
                case CaptionVerdict::keep:
                    if (!seen.insert(plan.keys[i]).second) {
                        ++delta.removed_duplicate;
                        p.caption.reset();
                    }
                    break;
            }
        }
        if (p.caption) {
            ++delta.kept_captioned;
        } else {
            ++delta.kept_captionless;
        }
    }
    return out;
}

}  // namespace

ListingRecord CaptionCleaner::clean(const ListingRecord& listing, CleanReport& delta) {
    return apply_plan(listing, plan_captions(listing), seen_, delta);
}

CleanedCorpus clean_corpus(const std::vector<ListingRecord>& corpus, const IndoorPolicy& policy,
                           std::size_t workers) {
    std::vector<ListingRecord> filtered(corpus.size());
    std::vector<CleanReport> deltas(corpus.size());
    std::vector<CaptionPlan> plans(corpus.size());
    parallel_for(corpus.size(), workers, [&](std::size_t i) {
        filtered[i] = filter_outdoor(corpus[i], policy, deltas[i]);
        plans[i] = plan_captions(filtered[i]);
    });

    CleanedCorpus result;
    result.listings.reserve(corpus.size());
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        result.listings.push_back(apply_plan(filtered[i], plans[i], seen, deltas[i]));
        result.report += deltas[i];
    }
    return result;
}

StatsReport corpus_stats(const std::vector<ListingRecord>& corpus) {
    if (corpus.empty()) throw DataError("corpus_stats: empty corpus");
    StatsReport r;
    r.listings = corpus.size();
    for (const auto& listing : corpus) {
        ++r.images_per_listing[listing.photos.size()];
        for (const auto& p : listing.photos) {
            ++r.photos;
            const auto top = p.top_category();
            ++r.scene_category_distribution[top ? *top : std::string(kUnscoredCategory)];
            if (p.caption) {
                ++r.captions;
                ++r.caption_token_length[text::split_whitespace(*p.caption).size()];
            }
        }
    }
    return r;
}

namespace {

ojson histogram_json(const Histogram& h) {
    ojson j = ojson::object();
    for (const auto& [bucket, count] : h) j[std::to_string(bucket)] = count;
    return j;
}

}  // namespace

std::string clean_report_to_json(const CleanReport& r) {
    ojson j;
    j["removed_outdoor"] = r.removed_outdoor;
    j["removed_unscored"] = r.removed_unscored;
    j["removed_email"] = r.removed_email;
    j["removed_url"] = r.removed_url;
    j["removed_duplicate"] = r.removed_duplicate;
    j["removed_empty"] = r.removed_empty;
    j["kept_captioned"] = r.kept_captioned;
    j["kept_captionless"] = r.kept_captionless;
    j["warn_unscored"] = r.warn_unscored;
    j["warn_unknown_category"] = r.warn_unknown_category;
    return j.dump();
}

std::string stats_report_to_json(const StatsReport& r) {
    ojson j;
    j["listings"] = r.listings;
    j["photos"] = r.photos;
    j["captions"] = r.captions;
    j["images_per_listing"] = histogram_json(r.images_per_listing);
    j["scene_category_distribution"] = ojson::object();
    for (const auto& [cat, count] : r.scene_category_distribution) j["scene_category_distribution"][cat] = count;
    j["caption_token_length"] = histogram_json(r.caption_token_length);
    if (r.instruction_token_length) j["instruction_token_length"] = histogram_json(*r.instruction_token_length);
    return j.dump();
}

}  // namespace pisynth
