#include "pisynth/templates.hpp"
#include "pisynth/text.hpp"

#include <cctype>

namespace pisynth {
namespace {

constexpr std::string_view kStopwords[] = {
    // function words
    "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from", "has", "have", "here", "in",
    "into", "is", "it", "its", "of", "off", "on", "onto", "or", "out", "over", "so", "than", "that",
    "then", "there", "this", "through", "to", "toward", "towards", "under", "until", "up", "upon",
    "was", "were", "where", "which", "while", "with", "within", "without", "you", "your", "we",
    "our", "i", "my", "very", "just", "once", "when", "again", "all", "also", "if", "not", "no",
    // motion verbs and direction words
    "walk", "walking", "go", "going", "turn", "turning", "stop", "stopping", "wait", "waiting",
    "enter", "entering", "exit", "exiting", "leave", "continue", "head", "take", "move", "proceed",
    "pass", "passing", "past", "climb", "follow", "make", "face", "keep", "get", "reach", "cross",
    "left", "right", "leftmost", "rightmost", "straight", "forward", "ahead", "back", "down",
    "around", "across", "along", "between", "beside", "behind", "next", "near", "inside", "outside",
    "first", "second", "third", "end", "front", "top", "bottom", "side",
    // caption verbs
    "features", "feature", "offers", "overlooks", "includes", "comes", "equipped", "furnished",
    "enjoy", "relax", "sleeps", "view", "views", "see", "can", "will", "located",
};

constexpr std::string_view kNouns[] = {
    "apartment", "area", "armchair", "balcony", "bar", "bath", "bathroom", "bathtub", "bed", "bedroom",
    "bench", "bookcase", "bookshelf", "cabinet", "carpet", "ceiling", "chair", "closet", "corridor",
    "couch", "counter", "countertop", "cupboard", "curtain", "deck", "den", "desk", "dining", "door",
    "doorway", "dresser", "dryer", "entrance", "entry", "entryway", "fireplace", "floor", "foyer",
    "fridge", "garage", "garden", "hall", "hallway", "house", "island", "kitchen", "kitchenette",
    "lamp", "landing", "laundry", "library", "loft", "lounge", "microwave", "mirror", "nook", "office",
    "ottoman", "oven", "painting", "pantry", "patio", "piano", "picture", "pillow", "plant", "pool",
    "porch", "refrigerator", "room", "rug", "shelf", "shower", "sink", "sofa", "space", "stair",
    "staircase", "stairway", "stove", "studio", "suite", "table", "television", "terrace", "toilet",
    "towel", "tub", "tv", "vanity", "vase", "wardrobe", "washer", "window", "yard",
};

constexpr std::string_view kPreferred[] = {
    "armchair", "bathtub", "bed", "bench", "book", "bookshelf", "bottle", "bowl", "cabinet", "carpet",
    "chair", "clock", "couch", "counter", "cup", "curtain", "cushion", "desk", "door", "drawer",
    "dresser", "fan", "faucet", "fireplace", "flower", "fridge", "lamp", "microwave", "mirror", "oven",
    "painting", "picture", "pillow", "plant", "plate", "pool", "refrigerator", "rug", "shelf", "shower",
    "sink", "sofa", "stair", "stool", "stove", "table", "television", "toilet", "towel", "tub", "tv",
    "vase", "window",
};

template <std::size_t N>
std::unordered_set<std::string> to_set(const std::string_view (&words)[N]) {
    std::unordered_set<std::string> out;
    for (auto w : words) out.emplace(w);
    return out;
}

}  // namespace

Lexicon Lexicon::builtin() {
    return Lexicon{to_set(kStopwords), to_set(kNouns), to_set(kPreferred)};
}

std::unordered_set<std::string> parse_word_list(std::string_view text_in) {
    std::unordered_set<std::string> out;
    std::size_t pos = 0;
    while (pos <= text_in.size()) {
        std::size_t nl = text_in.find('\n', pos);
        if (nl == std::string_view::npos) nl = text_in.size();
        const std::string word = text::trim(text_in.substr(pos, nl - pos));
        if (!word.empty() && word.front() != '#') out.insert(text::ascii_lower(word));
        pos = nl + 1;
    }
    return out;
}

bool is_preferred_phrase(std::string_view phrase, const std::unordered_set<std::string>& preferred) {
    const auto tokens = text::word_tokens(phrase);
    for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
        if (it->size() == 1 && !std::isalnum(static_cast<unsigned char>((*it)[0]))) continue;
        const std::string head = text::ascii_lower(*it);
        return preferred.contains(head) || preferred.contains(text::naive_singular(head));
    }
    return false;
}

}  // namespace pisynth
