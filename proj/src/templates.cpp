#include "pisynth/templates.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/text.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <stdexcept>

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace pisynth {

void validate_spans(const std::vector<Span>& spans, std::size_t token_count) {
    std::size_t prev_end = 0;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const Span& s = spans[i];
        if (s.start >= s.end) throw std::invalid_argument("span " + std::to_string(i) + " is empty or reversed");
        if (s.end > token_count) throw std::invalid_argument("span " + std::to_string(i) + " exceeds token count");
        if (i > 0 && s.start < prev_end) throw std::invalid_argument("spans overlap or are unsorted");
        prev_end = s.end;
    }
}

namespace {

enum class ChunkTag { det, adj, noun, other };

ChunkTag classify_tag(std::string_view tag) {
    static const std::unordered_set<std::string_view> dets = {"DET", "DT", "PDT", "PRP$"};
    // Numerals behave like adjectives inside a chunk ("two chairs").
    static const std::unordered_set<std::string_view> adjs = {"ADJ", "JJ", "JJR", "JJS", "NUM", "CD"};
    static const std::unordered_set<std::string_view> nouns = {"NOUN", "PROPN", "NN", "NNS", "NNP", "NNPS"};
    if (dets.contains(tag)) return ChunkTag::det;
    if (adjs.contains(tag)) return ChunkTag::adj;
    if (nouns.contains(tag)) return ChunkTag::noun;
    return ChunkTag::other;
}

std::vector<Span> chunk_tagged(const std::vector<std::string>& tags) {
    std::vector<Span> spans;
    std::size_t i = 0;
    const std::size_t n = tags.size();
    while (i < n) {
        std::size_t j = i;
        if (classify_tag(tags[j]) == ChunkTag::det) ++j;
        while (j < n && classify_tag(tags[j]) == ChunkTag::adj) ++j;
        const std::size_t noun_start = j;
        while (j < n && classify_tag(tags[j]) == ChunkTag::noun) ++j;
        if (j > noun_start) {
            spans.push_back({i, j});
            i = j;
        } else {
            ++i;
        }
    }
    return spans;
}

bool is_word(const std::string& tok) {
    return std::any_of(tok.begin(), tok.end(), [](unsigned char c) { return std::isalnum(c) != 0; });
}

std::vector<Span> chunk_lexical(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
    std::vector<Span> spans;
    std::size_t i = 0;
    const std::size_t n = tokens.size();
    while (i < n) {
        const auto breaks = [&](std::size_t k) {
            return !is_word(tokens[k]) || lexicon.stopwords.contains(text::ascii_lower(tokens[k]));
        };
        if (breaks(i)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::size_t last_noun = n;
        while (j < n && !breaks(j)) {
            const std::string lower = text::ascii_lower(tokens[j]);
            if (lexicon.nouns.contains(lower) || lexicon.nouns.contains(text::naive_singular(lower))) last_noun = j;
            ++j;
        }
        if (last_noun != n) spans.push_back({i, last_noun + 1});
        i = j;
    }
    return spans;
}

std::string template_hash(const std::vector<std::string>& slots) {
    std::string joined;
    for (const auto& s : slots) {
        joined += s;
        joined += '\x1f';
    }
    char buf[24];
    std::snprintf(buf, sizeof(buf), "t%016llx", static_cast<unsigned long long>(fnv1a64(joined)));
    return buf;
}

}  // namespace

std::vector<Span> extract_noun_phrases(const std::vector<std::string>& tokens,
                                       const std::optional<std::vector<std::string>>& pos_tags,
                                       const Lexicon& lexicon) {
    if (pos_tags) {
        if (pos_tags->size() != tokens.size()) throw std::invalid_argument("pos_tags not aligned with tokens");
        return chunk_tagged(*pos_tags);
    }
    return chunk_lexical(tokens, lexicon);
}

std::vector<InstructionTemplate> mine_templates(const std::vector<AnnotatedInstruction>& instructions) {
    std::map<std::string, InstructionTemplate> by_id;
    for (const auto& ins : instructions) {
        const std::size_t k = ins.np_spans.size();
        if (k < kMinBlanks || k > kMaxBlanks) continue;
        validate_spans(ins.np_spans, ins.tokens.size());
        InstructionTemplate t;
        std::size_t pos = 0;
        for (const auto& span : ins.np_spans) {
            t.slots.insert(t.slots.end(), ins.tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                           ins.tokens.begin() + static_cast<std::ptrdiff_t>(span.start));
            t.slots.emplace_back(kBlankToken);
            pos = span.end;
        }
        t.slots.insert(t.slots.end(), ins.tokens.begin() + static_cast<std::ptrdiff_t>(pos), ins.tokens.end());
        t.n_blanks = k;
        t.template_id = template_hash(t.slots);
        by_id.try_emplace(t.template_id, std::move(t));
    }
    std::vector<InstructionTemplate> out;
    out.reserve(by_id.size());
    for (auto& [id, t] : by_id) out.push_back(std::move(t));
    return out;
}

std::string fill_in_order(const InstructionTemplate& tmpl, const std::vector<std::string>& phrases) {
    if (phrases.size() != tmpl.n_blanks) throw std::invalid_argument("fill_in_order: phrase count != n_blanks");
    std::vector<std::string> tokens;
    tokens.reserve(tmpl.slots.size());
    std::size_t next = 0;
    for (const auto& slot : tmpl.slots) tokens.push_back(slot == kBlankToken ? phrases[next++] : slot);
    return text::detokenize(tokens);
}

FilledTemplate fill_template(const InstructionTemplate& tmpl, const std::vector<NounPhrase>& pool,
                             RandomStream& rng) {
    if (pool.size() < tmpl.n_blanks) {
        throw DataError("insufficient phrases: template " + tmpl.template_id + " has " +
                        std::to_string(tmpl.n_blanks) + " blanks, pool has " + std::to_string(pool.size()));
    }

    // Per step, preferred phrases first, each class in rng order.
    std::map<std::size_t, std::vector<std::size_t>> ranked;
    {
        std::map<std::size_t, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> groups;
        for (std::size_t i = 0; i < pool.size(); ++i) {
            auto& g = groups[pool[i].source_step_index];
            (pool[i].in_preferred_vocab ? g.first : g.second).push_back(i);
        }
        for (auto& [step, g] : groups) {
            auto& order = ranked[step];
            for (auto* cls : {&g.first, &g.second}) {
                const auto perm = fisher_yates(rng, cls->size());
                for (std::size_t p : perm) order.push_back((*cls)[p]);
            }
        }
    }

    struct Pick {
        std::size_t step;
        std::size_t rank;
        std::size_t index;
    };
    std::vector<Pick> picks;
    std::size_t remaining = tmpl.n_blanks;
    for (std::size_t rank = 0; remaining > 0; ++rank) {
        std::vector<Pick> preferred, plain;
        for (const auto& [step, order] : ranked) {
            if (rank >= order.size()) continue;
            const Pick p{step, rank, order[rank]};
            (pool[p.index].in_preferred_vocab ? preferred : plain).push_back(p);
        }
        for (auto* cls : {&preferred, &plain}) {
            if (remaining == 0) break;
            if (cls->size() <= remaining) {
                picks.insert(picks.end(), cls->begin(), cls->end());
                remaining -= cls->size();
            } else {
                for (std::size_t k : sample_without_replacement(rng, cls->size(), remaining)) picks.push_back((*cls)[k]);
                remaining = 0;
            }
        }
    }
    std::sort(picks.begin(), picks.end(), [](const Pick& a, const Pick& b) {
        return a.step != b.step ? a.step < b.step : a.rank < b.rank;
    });

    FilledTemplate out;
    std::vector<std::string> phrases;
    for (const auto& p : picks) {
        out.used.push_back(pool[p.index]);
        phrases.push_back(pool[p.index].text);
    }
    out.text = fill_in_order(tmpl, phrases);
    return out;
}

std::vector<AnnotatedInstruction> parse_instructions(const std::vector<InputLine>& lines, const Lexicon& lexicon) {
    std::vector<AnnotatedInstruction> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        try {
            const json j = json::parse(line.text);
            if (!j.is_object()) throw std::invalid_argument("record must be a JSON object");
            AnnotatedInstruction ins;
            ins.instruction_id = j.at("instruction_id").get<std::string>();
            if (auto it = j.find("tokens"); it != j.end()) {
                ins.tokens = it->get<std::vector<std::string>>();
            } else if (auto txt = j.find("instruction"); txt != j.end()) {
                ins.tokens = text::word_tokens(txt->get<std::string>());
            } else {
                throw std::invalid_argument("need 'tokens' or 'instruction'");
            }
            if (auto it = j.find("pos_tags"); it != j.end() && !it->is_null()) {
                ins.pos_tags = it->get<std::vector<std::string>>();
                if (ins.pos_tags->size() != ins.tokens.size()) throw std::invalid_argument("pos_tags not aligned with tokens");
            }
            if (auto it = j.find("np_spans"); it != j.end() && !it->is_null()) {
                for (const auto& s : *it) {
                    const auto pair = s.get<std::vector<std::size_t>>();
                    if (pair.size() != 2) throw std::invalid_argument("np_spans entries must be [start, end]");
                    ins.np_spans.push_back({pair[0], pair[1]});
                }
                validate_spans(ins.np_spans, ins.tokens.size());
            } else {
                ins.np_spans = extract_noun_phrases(ins.tokens, ins.pos_tags, lexicon);
            }
            out.push_back(std::move(ins));
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return out;
}

std::vector<InstructionTemplate> parse_templates(const std::vector<InputLine>& lines) {
    std::vector<InstructionTemplate> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        try {
            const json j = json::parse(line.text);
            InstructionTemplate t;
            t.template_id = j.at("template_id").get<std::string>();
            t.slots = j.at("slots").get<std::vector<std::string>>();
            t.n_blanks = j.at("n_blanks").get<std::size_t>();
            const auto blanks = static_cast<std::size_t>(std::count(t.slots.begin(), t.slots.end(), kBlankToken));
            if (blanks != t.n_blanks) throw std::invalid_argument("n_blanks does not match blank markers");
            if (t.n_blanks < kMinBlanks || t.n_blanks > kMaxBlanks) throw std::invalid_argument("n_blanks outside [2,7]");
            if (template_hash(t.slots) != t.template_id) throw std::invalid_argument("template_id does not match content");
            out.push_back(std::move(t));
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return out;
}

std::string template_to_json(const InstructionTemplate& tmpl) {
    ojson j;
    j["template_id"] = tmpl.template_id;
    j["slots"] = tmpl.slots;
    j["n_blanks"] = tmpl.n_blanks;
    return j.dump();
}

}  // namespace pisynth
