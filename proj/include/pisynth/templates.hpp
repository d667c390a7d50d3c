#pragma once

#include "pisynth/random.hpp"
#include "pisynth/shards.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace pisynth {

/// Half-open token range [start, end).
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool operator==(const Span&) const = default;
};

/// Throws std::invalid_argument unless spans are in range, non-empty, sorted and disjoint.
void validate_spans(const std::vector<Span>& spans, std::size_t token_count);

struct AnnotatedInstruction {
    std::string instruction_id;
    std::vector<std::string> tokens;
    std::vector<Span> np_spans;
    std::optional<std::vector<std::string>> pos_tags;
};

/// Word lists driving the tagless chunker and the preferred-vocabulary check.
struct Lexicon {
    std::unordered_set<std::string> stopwords;  // includes common verbs and directions
    std::unordered_set<std::string> nouns;
    std::unordered_set<std::string> preferred;  // object categories

    /// Built-in household vocabulary.
    static Lexicon builtin();
};

/// One lowercase word per line; blank lines and lines starting with '#' are skipped.
std::unordered_set<std::string> parse_word_list(std::string_view text);

/// Noun-phrase chunks. With tags: maximal DET? ADJ* NOUN+ runs (Universal or Penn tags).
/// Without tags: maximal runs of non-stopword tokens, truncated to end at their last lexicon noun.
std::vector<Span> extract_noun_phrases(const std::vector<std::string>& tokens,
                                       const std::optional<std::vector<std::string>>& pos_tags,
                                       const Lexicon& lexicon);

inline constexpr std::string_view kBlankToken = "⟨B⟩";
inline constexpr std::size_t kMinBlanks = 2;
inline constexpr std::size_t kMaxBlanks = 7;

struct InstructionTemplate {
    std::string template_id;  // content hash of the slots
    std::vector<std::string> slots;  // literal tokens, blanks encoded as kBlankToken
    std::size_t n_blanks = 0;

    bool operator==(const InstructionTemplate&) const = default;
};

/// Blanks every noun-phrase span. Instructions with fewer than 2 or more than 7 spans are
/// skipped. Output is deduplicated and sorted by template_id.
std::vector<InstructionTemplate> mine_templates(const std::vector<AnnotatedInstruction>& instructions);

struct NounPhrase {
    std::string text;
    std::string source_photo_id;
    std::size_t source_step_index = 0;
    bool in_preferred_vocab = false;
};

/// True when the head (last) token, lowercased, or its naive singular is in `preferred`.
bool is_preferred_phrase(std::string_view phrase, const std::unordered_set<std::string>& preferred);

struct FilledTemplate {
    std::string text;
    std::vector<NounPhrase> used;  // in blank order
};

/// Fills blanks left to right with phrases in step order. Each step contributes its best
/// phrase before any step contributes a second; within a step preferred phrases come first
/// and ties are broken by `rng`. Throws DataError when the pool is too small.
FilledTemplate fill_template(const InstructionTemplate& tmpl, const std::vector<NounPhrase>& pool,
                             RandomStream& rng);

/// Fills blanks with `phrases` in exactly the given order (no selection).
std::string fill_in_order(const InstructionTemplate& tmpl, const std::vector<std::string>& phrases);

/// Records {instruction_id, tokens | instruction, np_spans?, pos_tags?}. Free text is split by
/// word_tokens. When np_spans is absent the spans come from extract_noun_phrases.
std::vector<AnnotatedInstruction> parse_instructions(const std::vector<InputLine>& lines, const Lexicon& lexicon);
std::vector<InstructionTemplate> parse_templates(const std::vector<InputLine>& lines);
std::string template_to_json(const InstructionTemplate& tmpl);

}  // namespace pisynth
