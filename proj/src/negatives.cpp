#include "pisynth/negatives.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

using ojson = nlohmann::ordered_json;

namespace pisynth {

std::string_view to_string(ShuffleTarget t) { return t == ShuffleTarget::images ? "images" : "captions"; }

namespace {

std::vector<std::size_t> inverse(const std::vector<std::size_t>& perm) {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
    return inv;
}

void check_permutation(const std::vector<std::size_t>& perm, std::size_t k) {
    if (perm.size() != k) throw std::invalid_argument("permutation length != K");
    std::vector<bool> hit(k, false);
    for (std::size_t v : perm) {
        if (v >= k || hit[v]) throw std::invalid_argument("not a permutation");
        hit[v] = true;
    }
}

std::uint64_t saturating_factorial(std::size_t k) {
    std::uint64_t f = 1;
    for (std::size_t i = 2; i <= k; ++i) {
        if (f > std::numeric_limits<std::uint64_t>::max() / i) return std::numeric_limits<std::uint64_t>::max();
        f *= i;
    }
    return f;
}

}  // namespace

PathInstructionPair apply_shuffle(const PathInstructionPair& pair, ShuffleTarget target,
                                  const std::vector<std::size_t>& permutation) {
    check_permutation(permutation, pair.steps.size());
    PathInstructionPair out = pair;
    if (target == ShuffleTarget::images) {
        for (std::size_t k = 0; k < permutation.size(); ++k) {
            VisualStep moved = pair.steps[permutation[k]];
            moved.caption_segment = pair.steps[k].caption_segment;
            out.steps[k] = std::move(moved);
        }
        return out;
    }

    for (std::size_t k = 0; k < permutation.size(); ++k) {
        out.steps[k].caption_segment = pair.steps[permutation[k]].caption_segment;
    }
    const Provenance& prov = pair.provenance;
    if (prov.instruction == InstructionStrategy::rephrase && prov.instruction_template) {
        // Phrases follow their caption to its new step; the template itself is unchanged.
        const auto inv = inverse(permutation);
        std::vector<PlacedPhrase> moved = prov.phrases;
        for (auto& ph : moved) ph.step = inv[ph.step];
        std::stable_sort(moved.begin(), moved.end(), [](const auto& a, const auto& b) { return a.step < b.step; });
        std::vector<std::string> texts;
        for (const auto& ph : moved) texts.push_back(ph.text);
        out.instruction = fill_in_order(*prov.instruction_template, texts);
        out.provenance.phrases = std::move(moved);
    } else {
        std::vector<std::string> segments;
        for (const auto& s : out.steps) segments.push_back(s.caption_segment);
        out.instruction = join_segments(segments, prov.connectives);
    }
    return out;
}

ShuffleNegativeSet make_shuffle_negatives(const PathInstructionPair& pair, std::size_t n, RandomStream& rng) {
    if (n == 0) throw std::invalid_argument("make_shuffle_negatives: n must be >= 1");
    const std::size_t k = pair.steps.size();
    if (k < 2) throw DataError("pair '" + pair.pair_id + "': K < 2 admits no shuffle");
    const std::uint64_t per_target = saturating_factorial(k) - 1;
    if (per_target < std::numeric_limits<std::uint64_t>::max() / 2 && 2 * per_target < n) {
        throw DataError("pair '" + pair.pair_id + "': only " + std::to_string(2 * per_target) +
                        " shuffles exist for K=" + std::to_string(k) + ", need " + std::to_string(n));
    }

    ShuffleNegativeSet set;
    set.positive = pair;
    std::set<std::vector<std::size_t>> seen_images;
    std::set<std::string> seen_instructions{pair.instruction};

    auto try_add = [&](ShuffleTarget target, const std::vector<std::size_t>& perm) {
        if (is_identity(perm)) return false;
        if (target == ShuffleTarget::images) {
            if (!seen_images.insert(perm).second) return false;
            set.negatives.push_back({target, perm, apply_shuffle(pair, target, perm)});
            return true;
        }
        PathInstructionPair neg = apply_shuffle(pair, target, perm);
        if (!seen_instructions.insert(neg.instruction).second) return false;
        set.negatives.push_back({target, perm, std::move(neg)});
        return true;
    };

    const std::size_t max_attempts = 64 * n + 1024;
    for (std::size_t attempt = 0; attempt < max_attempts && set.negatives.size() < n; ++attempt) {
        const ShuffleTarget target = bounded_uniform(rng, 2) == 0 ? ShuffleTarget::images : ShuffleTarget::captions;
        try_add(target, fisher_yates(rng, k));
    }
    if (set.negatives.size() == n) return set;

    // Rejection stalled: the pool is nearly exhausted, so enumerate what is left.
    if (k > 9) throw DataError("pair '" + pair.pair_id + "': could not find enough distinct shuffles");
    struct Option {
        ShuffleTarget target;
        std::vector<std::size_t> perm;
    };
    std::vector<Option> options;
    std::set<std::string> pending_instructions;
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    while (std::next_permutation(perm.begin(), perm.end())) {
        if (!seen_images.contains(perm)) options.push_back({ShuffleTarget::images, perm});
        const std::string instr = apply_shuffle(pair, ShuffleTarget::captions, perm).instruction;
        if (!seen_instructions.contains(instr) && pending_instructions.insert(instr).second) {
            options.push_back({ShuffleTarget::captions, perm});
        }
    }
    const std::size_t missing = n - set.negatives.size();
    if (options.size() < missing) {
        throw DataError("pair '" + pair.pair_id + "': only " + std::to_string(set.negatives.size() + options.size()) +
                        " distinct shuffles exist, need " + std::to_string(n));
    }
    for (std::size_t idx : sample_without_replacement(rng, options.size(), missing)) {
        try_add(options[idx].target, options[idx].perm);
    }
    return set;
}

std::string negative_set_to_json(const ShuffleNegativeSet& set) {
    ojson j;
    j["pair_id"] = set.positive.pair_id;
    j["positive"] = ojson::parse(pair_to_json(set.positive));
    j["negatives"] = ojson::array();
    for (const auto& neg : set.negatives) {
        ojson nj;
        nj["target"] = to_string(neg.target);
        nj["permutation"] = neg.permutation;
        if (neg.target == ShuffleTarget::captions) {
            nj["instruction"] = neg.pair.instruction;
        } else {
            std::vector<std::string> order;
            for (const auto& s : neg.pair.steps) order.push_back(s.primary_photo_id);
            nj["step_order"] = order;
        }
        j["negatives"].push_back(std::move(nj));
    }
    return j.dump();
}

std::string_view to_string(CorruptionKind kind) {
    switch (kind) {
        case CorruptionKind::replace_nouns: return "replace_nouns";
        case CorruptionKind::swap_nouns: return "swap_nouns";
        case CorruptionKind::switch_directions: return "switch_directions";
    }
    return "";
}

CorruptionKind parse_corruption_kind(std::string_view name) {
    if (name == "replace_nouns") return CorruptionKind::replace_nouns;
    if (name == "swap_nouns") return CorruptionKind::swap_nouns;
    if (name == "switch_directions") return CorruptionKind::switch_directions;
    throw std::invalid_argument("unknown corruption kind '" + std::string(name) + "'");
}

CorruptionRecord corrupt_replace_nouns(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                                       const std::vector<std::string>& noun_vocab, RandomStream& rng,
                                       std::optional<std::size_t> max_spans) {
    if (spans.empty()) throw DataError("replace_nouns: instruction has no noun phrases");
    validate_spans(spans, tokens.size());

    std::vector<std::size_t> chosen(spans.size());
    std::iota(chosen.begin(), chosen.end(), std::size_t{0});
    if (max_spans && *max_spans < spans.size()) {
        if (*max_spans == 0) throw std::invalid_argument("replace_nouns: max_spans must be >= 1");
        chosen = sample_without_replacement(rng, spans.size(), *max_spans);
        std::sort(chosen.begin(), chosen.end());
    }

    CorruptionRecord rec;
    rec.kind = CorruptionKind::replace_nouns;
    rec.original = text::join(tokens, " ");
    std::vector<std::string> out = tokens;
    for (std::size_t idx : chosen) {
        const std::size_t head = spans[idx].end - 1;
        const std::string lower = text::ascii_lower(tokens[head]);
        const std::string singular = text::naive_singular(lower);
        std::vector<const std::string*> eligible;
        for (const auto& word : noun_vocab) {
            const std::string w = text::ascii_lower(word);
            if (w != lower && w != singular && text::naive_singular(w) != singular) eligible.push_back(&word);
        }
        if (eligible.empty()) {
            throw DataError("replace_nouns: no vocabulary noun differs from '" + tokens[head] + "'");
        }
        const std::string& replacement = *eligible[static_cast<std::size_t>(bounded_uniform(rng, eligible.size()))];
        rec.edits.push_back({{head, head + 1}, tokens[head], replacement});
        out[head] = replacement;
    }
    rec.corrupted = text::join(out, " ");
    return rec;
}

CorruptionRecord corrupt_swap_nouns(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                                    RandomStream& rng) {
    if (spans.size() < 2) throw DataError("swap_nouns: need at least 2 noun phrases");
    validate_spans(spans, tokens.size());

    std::vector<std::string> span_text;
    for (const auto& s : spans) {
        span_text.push_back(text::join({tokens.begin() + static_cast<std::ptrdiff_t>(s.start),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(s.end)}, " "));
    }
    if (std::all_of(span_text.begin(), span_text.end(), [&](const auto& t) { return t == span_text.front(); })) {
        throw DataError("swap_nouns: all noun phrases are identical");
    }

    std::vector<std::size_t> perm;
    auto unchanged = [&](const std::vector<std::size_t>& p) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (span_text[p[i]] != span_text[i]) return false;
        }
        return true;
    };
    do {
        perm = fisher_yates(rng, spans.size());
    } while (unchanged(perm));

    CorruptionRecord rec;
    rec.kind = CorruptionKind::swap_nouns;
    rec.original = text::join(tokens, " ");
    std::vector<std::string> out;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                   tokens.begin() + static_cast<std::ptrdiff_t>(spans[i].start));
        const Span& src = spans[perm[i]];
        out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(src.start),
                   tokens.begin() + static_cast<std::ptrdiff_t>(src.end));
        if (perm[i] != i && span_text[perm[i]] != span_text[i]) {
            rec.edits.push_back({spans[i], span_text[i], span_text[perm[i]]});
        }
        pos = spans[i].end;
    }
    out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(pos), tokens.end());
    rec.corrupted = text::join(out, " ");
    return rec;
}

namespace {

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::string_view direction_swap(std::string_view lower) {
    if (lower == "left") return "right";
    if (lower == "right") return "left";
    if (lower == "leftmost") return "rightmost";
    if (lower == "rightmost") return "leftmost";
    return {};
}

enum class Casing { lower, capitalized, upper, mixed };

Casing casing_of(std::string_view w) {
    auto is_up = [](char c) { return c >= 'A' && c <= 'Z'; };
    const bool rest_lower = std::none_of(w.begin() + 1, w.end(), is_up);
    const bool rest_upper = std::all_of(w.begin() + 1, w.end(), is_up);
    if (!is_up(w.front()) && rest_lower) return Casing::lower;
    if (is_up(w.front()) && rest_lower) return Casing::capitalized;
    if (is_up(w.front()) && rest_upper) return Casing::upper;
    return Casing::mixed;
}

std::string apply_casing(std::string_view lower, Casing c) {
    std::string out(lower);
    if (c == Casing::capitalized) {
        out[0] = static_cast<char>(out[0] - 'a' + 'A');
    } else if (c == Casing::upper) {
        for (char& ch : out) ch = static_cast<char>(ch - 'a' + 'A');
    }
    return out;
}

}  // namespace

CorruptionRecord corrupt_switch_directions(std::string_view instruction) {
    CorruptionRecord rec;
    rec.kind = CorruptionKind::switch_directions;
    rec.original = std::string(instruction);

    std::string out;
    out.reserve(instruction.size());
    std::size_t token_index = 0;
    bool in_token = false;
    std::size_t i = 0;
    while (i < instruction.size()) {
        const char c = instruction[i];
        if (!is_ascii_alpha(c)) {
            const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
            if (space && in_token) ++token_index;
            in_token = !space;
            out += c;
            ++i;
            continue;
        }
        in_token = true;
        std::size_t j = i;
        while (j < instruction.size() && is_ascii_alpha(instruction[j])) ++j;
        const std::string_view word = instruction.substr(i, j - i);
        const std::string lower = text::ascii_lower(word);
        const std::string_view swapped = direction_swap(lower);
        const Casing casing = casing_of(word);
        if (!swapped.empty() && casing != Casing::mixed) {
            std::string replacement = apply_casing(swapped, casing);
            rec.edits.push_back({{token_index, token_index + 1}, std::string(word), replacement});
            out += replacement;
        } else {
            out += word;
        }
        i = j;
    }
    if (rec.edits.empty()) throw DataError("switch_directions: no direction words in instruction");
    rec.corrupted = std::move(out);
    return rec;
}

std::string corruption_to_json(const CorruptionRecord& r) {
    ojson j;
    j["kind"] = to_string(r.kind);
    j["original"] = r.original;
    j["corrupted"] = r.corrupted;
    j["edits"] = ojson::array();
    for (const auto& e : r.edits) {
        j["edits"].push_back({{"span", {e.span.start, e.span.end}}, {"old", e.old_text}, {"new", e.new_text}});
    }
    return j.dump();
}

std::string highlight_keywords(const std::vector<std::string>& tokens, const std::vector<Span>& spans) {
    validate_spans(spans, tokens.size());
    std::vector<std::string> out;
    out.reserve(tokens.size() + 2 * spans.size());
    std::size_t next = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (next < spans.size() && spans[next].start == i) out.emplace_back(kHighlightOpen);
        out.push_back(tokens[i]);
        if (next < spans.size() && spans[next].end == i + 1) {
            out.emplace_back(kHighlightClose);
            ++next;
        }
    }
    return text::join(out, " ");
}

CandidateMining mine_candidate_negatives(const std::vector<Candidate>& candidates,
                                         std::size_t negatives_per_positive, RandomStream& rng) {
    if (candidates.empty()) throw DataError("mine_candidate_negatives: no candidates");
    CandidateMining out;
    std::vector<std::size_t> positives, negatives;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        if (!std::isfinite(c.endpoint_distance_m) || c.endpoint_distance_m < 0.0) {
            throw DataError("candidate '" + c.id + "': endpoint distance must be finite and >= 0");
        }
        const bool pos = c.endpoint_distance_m <= kCandidateSuccessRadiusM;
        out.labels.push_back({c.id, c.endpoint_distance_m, pos ? CandidateClass::positive : CandidateClass::negative});
        (pos ? positives : negatives).push_back(i);
    }
    for (std::size_t p : positives) {
        ContrastSet cs;
        cs.positive_id = candidates[p].id;
        auto picks = sample_without_replacement(rng, negatives.size(), std::min(negatives_per_positive, negatives.size()));
        std::sort(picks.begin(), picks.end());
        for (std::size_t k : picks) cs.negative_ids.push_back(candidates[negatives[k]].id);
        out.contrast_sets.push_back(std::move(cs));
    }
    return out;
}

}  // namespace pisynth
