#include "pisynth/synth.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/parallel.hpp"
#include "pisynth/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace pisynth {

Strategies parse_strategies(std::string_view list) {
    Strategies s{false, false, false, false};
    std::size_t pos = 0;
    while (pos <= list.size()) {
        std::size_t comma = list.find(',', pos);
        if (comma == std::string_view::npos) comma = list.size();
        const std::string name = text::trim(list.substr(pos, comma - pos));
        if (name == "concat") {
            s.concat = true;
        } else if (name == "rephrase") {
            s.rephrase = true;
        } else if (name == "merge") {
            s.merge = true;
        } else if (name == "insert") {
            s.insert = true;
        } else if (!name.empty()) {
            throw std::invalid_argument("unknown strategy '" + name + "'");
        }
        pos = comma + 1;
    }
    if (!s.concat && !s.rephrase) throw std::invalid_argument("strategies need concat or rephrase");
    return s;
}

std::string strategies_to_string(const Strategies& s) {
    std::vector<std::string> names;
    if (s.concat) names.emplace_back("concat");
    if (s.rephrase) names.emplace_back("rephrase");
    if (s.merge) names.emplace_back("merge");
    if (s.insert) names.emplace_back("insert");
    return text::join(names, ",");
}

std::vector<Connective> default_connectives() {
    return {{"and", 0.25}, {"then", 0.25}, {".", 0.25}, {"", 0.25}};
}

void SynthesisConfig::validate() const {
    if (k_min < 2) throw std::invalid_argument("k_min must be >= 2");
    if (k_min > k_max) throw std::invalid_argument("k_min must be <= k_max");
    if (merge_cap < 1) throw std::invalid_argument("merge_cap must be >= 1");
    if (connectives.empty()) throw std::invalid_argument("connectives must not be empty");
    double total = 0.0;
    for (const auto& c : connectives) {
        if (!(c.weight >= 0.0)) throw std::invalid_argument("connective weights must be non-negative");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("connective weights must sum to 1");
    if (!strategies.concat && !strategies.rephrase) throw std::invalid_argument("strategies need concat or rephrase");
}

std::string join_segments(const std::vector<std::string>& segments, const std::vector<std::string>& connectives) {
    std::vector<std::string> parts;
    std::size_t gap = 0;
    for (const auto& seg : segments) {
        if (text::is_blank(seg)) continue;
        if (!parts.empty()) {
            if (gap >= connectives.size()) throw std::invalid_argument("join_segments: too few connectives");
            parts.push_back(connectives[gap++]);
        }
        parts.push_back(seg);
    }
    if (parts.empty()) throw DataError("concat_instruction: every caption segment is empty");
    if (gap != connectives.size()) throw std::invalid_argument("join_segments: connective count mismatch");
    return text::collapse_whitespace(text::join(parts, " "));
}

ConcatResult concat_instruction(const std::vector<std::string>& segments, const std::vector<Connective>& connectives,
                                RandomStream& rng) {
    std::size_t non_empty = 0;
    for (const auto& seg : segments) non_empty += text::is_blank(seg) ? 0 : 1;
    if (non_empty == 0) throw DataError("concat_instruction: every caption segment is empty");

    std::vector<double> weights;
    weights.reserve(connectives.size());
    for (const auto& c : connectives) weights.push_back(c.weight);

    ConcatResult out;
    for (std::size_t gap = 0; gap + 1 < non_empty; ++gap) {
        out.connectives.push_back(connectives[weighted_choice(rng, weights)].token);
    }
    out.text = join_segments(segments, out.connectives);
    return out;
}

VisualStep merge_images(const ListingRecord& listing, std::string_view primary_photo_id, std::size_t merge_cap,
                        RandomStream& rng, const std::vector<bool>& taken) {
    if (merge_cap < 1) throw std::invalid_argument("merge_cap must be >= 1");
    auto primary = std::find_if(listing.photos.begin(), listing.photos.end(),
                                [&](const PhotoRecord& p) { return p.photo_id == primary_photo_id; });
    if (primary == listing.photos.end()) {
        throw DataError("merge_images: photo '" + std::string(primary_photo_id) + "' not in listing '" +
                        listing.listing_id + "'");
    }
    const auto category = primary->top_category();
    if (!category) {
        throw DataError("merge_images: photo '" + std::string(primary_photo_id) + "' has no scene category");
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < listing.photos.size(); ++i) {
        const auto& p = listing.photos[i];
        if (i < taken.size() && taken[i]) continue;
        if (p.photo_id != primary_photo_id && p.top_category() == category) candidates.push_back(i);
    }
    const std::size_t take = std::min(candidates.size(), merge_cap - 1);
    std::vector<std::size_t> chosen;
    for (std::size_t k : sample_without_replacement(rng, candidates.size(), take)) chosen.push_back(candidates[k]);
    std::sort(chosen.begin(), chosen.end());

    VisualStep step;
    step.primary_photo_id = primary->photo_id;
    step.room_category = *category;
    step.feature_refs.push_back(primary->feature_ref);
    step.region_counts.push_back(primary->region_count);
    for (std::size_t i : chosen) {
        const auto& p = listing.photos[i];
        step.merged_photo_ids.push_back(p.photo_id);
        step.feature_refs.push_back(p.feature_ref);
        step.region_counts.push_back(p.region_count);
    }
    return step;
}

TemplateBank::TemplateBank(std::vector<InstructionTemplate> templates) : templates_(std::move(templates)) {
    std::stable_sort(templates_.begin(), templates_.end(),
                     [](const auto& a, const auto& b) { return a.n_blanks < b.n_blanks; });
}

const InstructionTemplate* TemplateBank::pick(std::size_t max_blanks, RandomStream& rng) const {
    const auto end = std::upper_bound(templates_.begin(), templates_.end(), max_blanks,
                                      [](std::size_t v, const InstructionTemplate& t) { return v < t.n_blanks; });
    const auto eligible = static_cast<std::size_t>(end - templates_.begin());
    if (eligible == 0) return nullptr;
    return &templates_[static_cast<std::size_t>(bounded_uniform(rng, eligible))];
}

std::vector<NounPhrase> phrase_pool(const std::vector<VisualStep>& steps, const Lexicon& lexicon) {
    std::vector<NounPhrase> pool;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        if (steps[k].caption_segment.empty()) continue;
        const auto tokens = text::word_tokens(steps[k].caption_segment);
        for (const auto& span : extract_noun_phrases(tokens, std::nullopt, lexicon)) {
            std::vector<std::string> words(tokens.begin() + static_cast<std::ptrdiff_t>(span.start),
                                           tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
            NounPhrase np;
            np.text = text::join(words, " ");
            np.source_photo_id = steps[k].primary_photo_id;
            np.source_step_index = k;
            np.in_preferred_vocab = is_preferred_phrase(np.text, lexicon.preferred);
            pool.push_back(std::move(np));
        }
    }
    return pool;
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

VisualStep single_photo_step(const PhotoRecord& p) {
    VisualStep step;
    step.primary_photo_id = p.photo_id;
    step.room_category = p.top_category().value_or("");
    step.feature_refs.push_back(p.feature_ref);
    step.region_counts.push_back(p.region_count);
    return step;
}

}  // namespace

PathInstructionPair sample_pair(const ListingRecord& listing, const TemplateBank& templates,
                                const SynthesisConfig& config, const Lexicon& lexicon, RandomStream& rng) {
    std::vector<std::size_t> captioned, captionless;
    for (std::size_t i = 0; i < listing.photos.size(); ++i) {
        const auto& c = listing.photos[i].caption;
        (c && !text::is_blank(*c) ? captioned : captionless).push_back(i);
    }
    if (captioned.size() < 2) {
        throw UnusableListing("listing '" + listing.listing_id + "' has fewer than 2 captioned photos");
    }

    PathInstructionPair pair;
    pair.listing_id = listing.listing_id;
    pair.seed_used = rng.state();
    pair.pair_id = listing.listing_id + "/" + hex64(pair.seed_used);
    pair.provenance.merge = config.strategies.merge;
    pair.provenance.insert = config.strategies.insert;

    const bool insert = config.strategies.insert;
    const std::size_t usable = insert ? listing.photos.size() : captioned.size();
    const std::size_t k_hi = std::min(config.k_max, usable);
    const std::size_t k_lo = std::min(config.k_min, k_hi);
    const auto K = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(k_lo), static_cast<std::int64_t>(k_hi)));
    const std::size_t N =
        insert ? static_cast<std::size_t>(uniform_int(rng, 2, static_cast<std::int64_t>(std::min(K, captioned.size()))))
               : K;

    // Captioned photos keep listing order.
    std::vector<std::size_t> picked;
    for (std::size_t k : sample_without_replacement(rng, captioned.size(), N)) picked.push_back(captioned[k]);
    std::sort(picked.begin(), picked.end());

    std::vector<std::size_t> path = picked;
    std::vector<bool> suppressed(listing.photos.size(), false);
    if (K > N) {
        const std::size_t need = K - N;
        std::vector<std::size_t> fillers;
        if (captionless.size() >= need) {
            for (std::size_t k : sample_without_replacement(rng, captionless.size(), need)) fillers.push_back(captionless[k]);
        } else {
            fillers = captionless;
            std::vector<std::size_t> spare;
            for (std::size_t i : captioned) {
                if (!std::binary_search(picked.begin(), picked.end(), i)) spare.push_back(i);
            }
            const std::size_t deficit = need - captionless.size();
            for (std::size_t k : sample_without_replacement(rng, spare.size(), deficit)) {
                fillers.push_back(spare[k]);
                suppressed[spare[k]] = true;
            }
            pair.provenance.drafted_captioned = deficit;
        }
        for (std::size_t f : fillers) {
            const auto at = static_cast<std::ptrdiff_t>(bounded_uniform(rng, path.size() + 1));
            path.insert(path.begin() + at, f);
        }
    }

    // A photo appears in at most one step: path photos and earlier merges are off limits.
    std::vector<bool> taken(listing.photos.size(), false);
    for (std::size_t idx : path) taken[idx] = true;
    std::map<std::string, std::size_t> position;
    for (std::size_t i = 0; i < listing.photos.size(); ++i) position.emplace(listing.photos[i].photo_id, i);
    for (std::size_t idx : path) {
        const PhotoRecord& photo = listing.photos[idx];
        VisualStep step = (config.strategies.merge && photo.top_category())
                              ? merge_images(listing, photo.photo_id, config.merge_cap, rng, taken)
                              : single_photo_step(photo);
        for (const auto& id : step.merged_photo_ids) taken[position.at(id)] = true;
        if (photo.caption && !text::is_blank(*photo.caption) && !suppressed[idx]) step.caption_segment = text::collapse_whitespace(*photo.caption);
        pair.steps.push_back(std::move(step));
    }
    pair.path_length = K;
    pair.captioned_steps = N;

    bool rephrase = config.strategies.rephrase;
    if (config.strategies.concat && config.strategies.rephrase) rephrase = bounded_uniform(rng, 2) == 1;

    if (rephrase) {
        const auto pool = phrase_pool(pair.steps, lexicon);
        const InstructionTemplate* tmpl = pool.size() >= kMinBlanks ? templates.pick(pool.size(), rng) : nullptr;
        if (tmpl != nullptr) {
            FilledTemplate filled = fill_template(*tmpl, pool, rng);
            pair.instruction = std::move(filled.text);
            pair.provenance.instruction = InstructionStrategy::rephrase;
            pair.provenance.instruction_template = *tmpl;
            for (const auto& np : filled.used) pair.provenance.phrases.push_back({np.text, np.source_step_index});
            return pair;
        }
        pair.provenance.rephrase_fallback = true;
    }

    std::vector<std::string> segments;
    segments.reserve(pair.steps.size());
    for (const auto& s : pair.steps) segments.push_back(s.caption_segment);
    ConcatResult concat = concat_instruction(segments, config.connectives, rng);
    pair.instruction = std::move(concat.text);
    pair.provenance.instruction = InstructionStrategy::concat;
    pair.provenance.connectives = std::move(concat.connectives);
    return pair;
}

EpochResult epoch_stream(const std::vector<ListingRecord>& corpus, const TemplateBank& templates,
                         const SynthesisConfig& config, const Lexicon& lexicon, std::uint64_t epoch,
                         std::size_t workers) {
    config.validate();
    std::vector<std::optional<PathInstructionPair>> slots(corpus.size());
    parallel_for(corpus.size(), workers, [&](std::size_t i) {
        RandomStream rng = substream(config.seed, corpus[i].listing_id, epoch);
        try {
            PathInstructionPair pair = sample_pair(corpus[i], templates, config, lexicon, rng);
            pair.provenance.epoch = epoch;
            slots[i] = std::move(pair);
        } catch (const UnusableListing&) {
        }
    });
    EpochResult out;
    for (auto& slot : slots) {
        if (slot) {
            out.pairs.push_back(std::move(*slot));
        } else {
            ++out.skipped;
        }
    }
    return out;
}

TokenizedPair serialize_tokens(const PathInstructionPair& pair) {
    TokenizedPair out;
    for (const auto& step : pair.steps) {
        out.visual_sequence.emplace_back(kImgToken);
        for (std::size_t f = 0; f < step.feature_refs.size(); ++f) {
            const std::size_t regions = f < step.region_counts.size() ? step.region_counts[f] : 0;
            for (std::size_t r = 0; r < regions; ++r) {
                out.visual_sequence.push_back(step.feature_refs[f] + "#" + std::to_string(r));
            }
        }
    }
    out.text_sequence.emplace_back(kClsToken);
    for (auto& w : text::split_whitespace(pair.instruction)) out.text_sequence.push_back(std::move(w));
    out.text_sequence.emplace_back(kSepToken);
    return out;
}

std::string pair_to_json(const PathInstructionPair& pair) {
    ojson j;
    j["pair_id"] = pair.pair_id;
    j["listing_id"] = pair.listing_id;
    j["K"] = pair.path_length;
    j["N"] = pair.captioned_steps;
    j["steps"] = ojson::array();
    for (const auto& s : pair.steps) {
        ojson sj;
        sj["photo_id"] = s.primary_photo_id;
        sj["merged_photo_ids"] = s.merged_photo_ids;
        sj["room_category"] = s.room_category;
        sj["feature_refs"] = s.feature_refs;
        sj["region_counts"] = s.region_counts;
        sj["caption"] = s.caption_segment;
        j["steps"].push_back(std::move(sj));
    }
    j["instruction"] = pair.instruction;
    const Provenance& p = pair.provenance;
    ojson pj;
    pj["strategy"] = p.instruction == InstructionStrategy::concat ? "concat" : "rephrase";
    pj["rephrase_fallback"] = p.rephrase_fallback;
    pj["merge"] = p.merge;
    pj["insert"] = p.insert;
    pj["drafted_captioned"] = p.drafted_captioned;
    pj["epoch"] = p.epoch;
    pj["connectives"] = p.connectives;
    if (p.instruction_template) {
        pj["template_id"] = p.instruction_template->template_id;
        pj["template_slots"] = p.instruction_template->slots;
        pj["phrases"] = ojson::array();
        for (const auto& ph : p.phrases) pj["phrases"].push_back({{"text", ph.text}, {"step", ph.step}});
    }
    j["provenance"] = std::move(pj);
    j["seed_used"] = pair.seed_used;
    return j.dump();
}

PathInstructionPair pair_from_json(std::string_view json_text) {
    const json j = json::parse(json_text);
    PathInstructionPair pair;
    pair.pair_id = j.at("pair_id").get<std::string>();
    pair.listing_id = j.at("listing_id").get<std::string>();
    pair.path_length = j.at("K").get<std::size_t>();
    pair.captioned_steps = j.at("N").get<std::size_t>();
    for (const auto& sj : j.at("steps")) {
        VisualStep s;
        s.primary_photo_id = sj.at("photo_id").get<std::string>();
        s.merged_photo_ids = sj.at("merged_photo_ids").get<std::vector<std::string>>();
        s.room_category = sj.at("room_category").get<std::string>();
        s.feature_refs = sj.at("feature_refs").get<std::vector<std::string>>();
        s.region_counts = sj.at("region_counts").get<std::vector<std::size_t>>();
        s.caption_segment = sj.at("caption").get<std::string>();
        pair.steps.push_back(std::move(s));
    }
    pair.instruction = j.at("instruction").get<std::string>();
    const json& pj = j.at("provenance");
    Provenance& p = pair.provenance;
    const auto strategy = pj.at("strategy").get<std::string>();
    if (strategy == "concat") {
        p.instruction = InstructionStrategy::concat;
    } else if (strategy == "rephrase") {
        p.instruction = InstructionStrategy::rephrase;
    } else {
        throw std::invalid_argument("unknown strategy '" + strategy + "'");
    }
    p.rephrase_fallback = pj.at("rephrase_fallback").get<bool>();
    p.merge = pj.at("merge").get<bool>();
    p.insert = pj.at("insert").get<bool>();
    p.drafted_captioned = pj.at("drafted_captioned").get<std::size_t>();
    p.epoch = pj.at("epoch").get<std::uint64_t>();
    p.connectives = pj.at("connectives").get<std::vector<std::string>>();
    if (auto it = pj.find("template_slots"); it != pj.end()) {
        InstructionTemplate t;
        t.template_id = pj.at("template_id").get<std::string>();
        t.slots = it->get<std::vector<std::string>>();
        t.n_blanks = static_cast<std::size_t>(std::count(t.slots.begin(), t.slots.end(), kBlankToken));
        p.instruction_template = std::move(t);
        for (const auto& ph : pj.at("phrases")) {
            p.phrases.push_back({ph.at("text").get<std::string>(), ph.at("step").get<std::size_t>()});
        }
    }
    pair.seed_used = j.at("seed_used").get<std::uint64_t>();

    if (pair.steps.size() != pair.path_length) throw std::invalid_argument("K does not match step count");
    std::size_t empty = 0;
    for (const auto& s : pair.steps) empty += s.caption_segment.empty() ? 1 : 0;
    if (pair.captioned_steps < 2 || pair.captioned_steps > pair.path_length ||
        empty != pair.path_length - pair.captioned_steps) {
        throw std::invalid_argument("N inconsistent with captioned steps");
    }
    return pair;
}

std::vector<PathInstructionPair> parse_pairs(const std::vector<InputLine>& lines) {
    std::vector<PathInstructionPair> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        try {
            out.push_back(pair_from_json(line.text));
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return out;
}

}  // namespace pisynth
