#include "fixtures.hpp"

#include "pisynth/random.hpp"

#include <atomic>
#include <sstream>

namespace pisynth::testing {
namespace {

const std::vector<std::string> kRoomWord = {"bathroom", "bedroom", "dining room", "kitchen", "living room"};
const std::vector<std::string> kAdjectives = {"bright", "cozy", "spacious", "modern", "quiet", "sunny", "rustic"};
const std::vector<std::string> kObjects = {"table", "sofa", "lamp", "mirror", "rug", "chair", "plant", "desk"};

}  // namespace

IndoorPolicy fixture_policy(bool strict) {
    IndoorPolicy p;
    p.strict = strict;
    for (const auto& c : kIndoorCategories) p.categories[c] = RoomKind::indoor;
    p.categories["patio"] = RoomKind::outdoor;
    p.categories["swimming_pool"] = RoomKind::outdoor;
    return p;
}

PhotoRecord make_photo(const std::string& id, std::optional<std::string> caption, const std::string& category,
                       std::size_t regions) {
    PhotoRecord p;
    p.photo_id = id;
    p.caption = std::move(caption);
    p.scene_scores = std::vector<SceneScore>{{category, 0.7}, {"hallway", 0.2}};
    p.feature_ref = "feat/" + id + ".bin#0";
    p.region_count = regions;
    return p;
}

ListingRecord make_listing(const std::string& id, std::size_t captioned, std::size_t captionless) {
    ListingRecord l;
    l.listing_id = id;
    for (std::size_t i = 0; i < captioned; ++i) {
        const std::size_t c = i % kIndoorCategories.size();
        l.photos.push_back(make_photo(id + "_c" + std::to_string(i),
                                      kAdjectives[i % kAdjectives.size()] + " " + kRoomWord[c] + " with a " +
                                          kObjects[i % kObjects.size()] + " photo " + id + "x" + std::to_string(i),
                                      kIndoorCategories[c]));
    }
    for (std::size_t i = 0; i < captionless; ++i) {
        l.photos.push_back(make_photo(id + "_u" + std::to_string(i), std::nullopt,
                                      kIndoorCategories[(i + 2) % kIndoorCategories.size()]));
    }
    return l;
}

std::vector<ListingRecord> abundant_corpus(std::size_t listings, std::uint64_t seed) {
    RandomStream rng(seed);
    std::vector<ListingRecord> out;
    for (std::size_t i = 0; i < listings; ++i) {
        const auto captioned = static_cast<std::size_t>(uniform_int(rng, 10, 20));
        const auto captionless = static_cast<std::size_t>(uniform_int(rng, 8, 15));
        ListingRecord l = make_listing("L" + std::to_string(i), captioned, captionless);
        // Shuffle photo order so captioned and captionless photos interleave.
        const auto perm = fisher_yates(rng, l.photos.size());
        std::vector<PhotoRecord> photos;
        for (std::size_t k : perm) photos.push_back(l.photos[k]);
        l.photos = std::move(photos);
        out.push_back(std::move(l));
    }
    return out;
}

std::string to_jsonl(const std::vector<ListingRecord>& corpus) {
    std::string out;
    for (const auto& l : corpus) out += listing_to_json(l) + "\n";
    return out;
}

std::string cleaning_fixture_jsonl() {
    ListingRecord a;
    a.listing_id = "clean-A";
    auto add = [](ListingRecord& l, const std::string& id, std::optional<std::string> caption,
                  const std::string& cat = "kitchen") { l.photos.push_back(make_photo(id, std::move(caption), cat)); };
    // 5 emails
    add(a, "a1", "Contact bob@x.com for keys");
    add(a, "a2", "EMAIL: Host.Name+bnb@Example.ORG");
    add(a, "a3", "reach me at jane_doe99@mail.co.uk anytime");
    add(a, "a4", "bedroom (owner%home@my-domain.io)");
    add(a, "a5", "x@y.de");
    // 5 URLs
    add(a, "a6", "See http://example.com/tour");
    add(a, "a7", "more photos at HTTPS://pics.example.net");
    add(a, "a8", "visit www.cozyhomes.com today");
    add(a, "a9", "Book via WWW.Rentals.example");
    add(a, "a10", "link:https://t.co/abc");
    // 3 empty
    add(a, "a11", "");
    add(a, "a12", "   ");
    add(a, "a13", "\t\n");
    // first occurrences of 4 captions that get duplicated
    add(a, "a14", "Cozy bedroom");
    add(a, "a15", "Bright kitchen with island");
    add(a, "a16", "Living room with fireplace!");
    // clean captions and captionless photos
    add(a, "a17", "Sunny dining room");
    add(a, "a18", std::nullopt);
    add(a, "a19", "Garden view", "patio");  // outdoor: dropped before caption cleaning

    ListingRecord b;
    b.listing_id = "clean-B";
    add(b, "b1", "cozy   bedroom.");             // dup of a14 after normalization
    add(b, "b2", "BRIGHT KITCHEN WITH ISLAND");  // dup of a15
    add(b, "b3", "Rustic bathroom with tub");
    add(b, "b4", "Rustic bathroom with tub?");   // dup of b3
    add(b, "b5", "living room with fireplace");  // dup of a16
    add(b, "b6", std::nullopt, "bedroom");
    add(b, "b7", "Reading nook by the window");
    return to_jsonl({a, b});
}

std::vector<AnnotatedInstruction> instruction_fixture() {
    std::vector<AnnotatedInstruction> out;
    const std::vector<std::string> nouns = {"kitchen", "sofa", "hallway", "bedroom", "table",
                                            "stairs", "door", "window", "rug", "lamp"};
    for (std::size_t spans = 0; spans <= 9; ++spans) {
        AnnotatedInstruction ins;
        ins.instruction_id = "ins" + std::to_string(spans);
        ins.tokens = {"Walk"};
        for (std::size_t k = 0; k < spans; ++k) {
            ins.tokens.push_back(k == 0 ? "past" : "then");
            ins.np_spans.push_back({ins.tokens.size(), ins.tokens.size() + 2});
            ins.tokens.push_back("the");
            ins.tokens.push_back(nouns[k]);
        }
        ins.tokens.push_back("and");
        ins.tokens.push_back("stop");
        ins.tokens.push_back(".");
        out.push_back(ins);
    }
    // Same skeleton as ins2 with other nouns: same template after blanking.
    AnnotatedInstruction twin = out[2];
    twin.instruction_id = "ins2-twin";
    twin.tokens[3] = "bathroom";
    twin.tokens[6] = "closet";
    out.push_back(twin);

    AnnotatedInstruction kitchen_sofa;
    kitchen_sofa.instruction_id = "kitchen-sofa";
    kitchen_sofa.tokens = {"Walk", "past", "the", "kitchen", "and", "stop", "at", "the", "sofa"};
    kitchen_sofa.np_spans = {{2, 4}, {7, 9}};
    out.push_back(kitchen_sofa);
    return out;
}

std::vector<AnnotatedInstruction> corruption_fixture(std::size_t count, std::uint64_t seed) {
    RandomStream rng(seed);
    const std::vector<std::string> nouns = {"kitchen", "sofa",  "hallway", "bedroom", "table", "stairs",
                                            "door",    "chair", "window",  "rug",     "lamp",  "bathroom"};
    const std::vector<std::string> directions = {"left", "right", "leftmost", "rightmost", "Left", "Right", "LEFT"};
    std::vector<AnnotatedInstruction> out;
    for (std::size_t i = 0; i < count; ++i) {
        AnnotatedInstruction ins;
        ins.instruction_id = "c" + std::to_string(i);
        const auto picks = sample_without_replacement(rng, nouns.size(), 3);
        const std::string& d1 = directions[static_cast<std::size_t>(bounded_uniform(rng, directions.size()))];
        const std::string& d2 = directions[static_cast<std::size_t>(bounded_uniform(rng, directions.size()))];
        ins.tokens = {"Turn", d1, "at", "the", nouns[picks[0]], "and", "walk", "past", "the", "big", nouns[picks[1]]};
        ins.np_spans = {{3, 5}, {8, 11}};
        if (bounded_uniform(rng, 2) == 1) {
            ins.tokens.insert(ins.tokens.end(), {"then", "stop", "at", "the", d2, nouns[picks[2]]});
            ins.np_spans.push_back({ins.tokens.size() - 3, ins.tokens.size()});
        }
        ins.tokens.push_back(".");
        out.push_back(std::move(ins));
    }
    return out;
}

std::map<std::string, std::size_t> env_fixture() {
    std::map<std::string, std::size_t> envs;
    for (std::size_t i = 0; i < 61; ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "env%02zu", i);
        // Every third env among the first 51 is small: i = 0, 3, ..., 48 -> 17 envs.
        std::size_t count = 0;
        if (i % 3 == 0 && i < 51) {
            count = i == 0 ? 79 : 5 + i;  // includes the 79 boundary
        } else {
            count = i == 1 ? 80 : 80 + 7 * i;  // includes the 80 boundary
        }
        envs[name] = count;
    }
    return envs;
}

InstructionTemplate make_template(const std::vector<std::string>& slots) {
    AnnotatedInstruction ins;
    ins.instruction_id = "tmpl";
    for (const auto& s : slots) {
        if (s == kBlankToken) ins.np_spans.push_back({ins.tokens.size(), ins.tokens.size() + 1});
        ins.tokens.push_back(s);
    }
    const auto mined = mine_templates({ins});
    if (mined.size() != 1) throw std::invalid_argument("make_template: slots need 2-7 blanks");
    return mined.front();
}

std::filesystem::path temp_dir(const std::string& name) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("pisynth-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace pisynth::testing
