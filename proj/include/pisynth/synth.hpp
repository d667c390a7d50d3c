#pragma once

#include "pisynth/corpus.hpp"
#include "pisynth/random.hpp"
#include "pisynth/templates.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pisynth {

struct Strategies {
    bool concat = true;
    bool rephrase = false;
    bool merge = false;
    bool insert = false;

    bool operator==(const Strategies&) const = default;
};

/// Comma-separated subset of {concat, rephrase, merge, insert}.
Strategies parse_strategies(std::string_view list);
std::string strategies_to_string(const Strategies& s);

struct Connective {
    std::string token;  // "" joins with a single space
    double weight = 0.0;
};

std::vector<Connective> default_connectives();

struct SynthesisConfig {
    std::size_t k_min = 4;
    std::size_t k_max = 7;
    std::vector<Connective> connectives = default_connectives();
    Strategies strategies;
    std::size_t merge_cap = 8;
    std::uint64_t seed = 0;

    /// Throws std::invalid_argument on k bounds, connective weights or merge_cap.
    void validate() const;
};

struct VisualStep {
    std::string primary_photo_id;
    std::vector<std::string> merged_photo_ids;
    std::string room_category;
    std::vector<std::string> feature_refs;  // primary first, then merged in listing order
    std::vector<std::size_t> region_counts;  // aligned with feature_refs
    std::string caption_segment;            // empty for captionless steps

    bool operator==(const VisualStep&) const = default;
};

enum class InstructionStrategy { concat, rephrase };

struct PlacedPhrase {
    std::string text;
    std::size_t step = 0;

    bool operator==(const PlacedPhrase&) const = default;
};

struct Provenance {
    InstructionStrategy instruction = InstructionStrategy::concat;
    bool rephrase_fallback = false;  // rephrase was drawn but no template fit the phrase pool
    bool merge = false;
    bool insert = false;
    std::size_t drafted_captioned = 0;  // captioned photos used with caption suppressed
    std::uint64_t epoch = 0;
    std::vector<std::string> connectives;  // concat: one per gap between non-empty segments
    std::optional<InstructionTemplate> instruction_template;  // rephrase only
    std::vector<PlacedPhrase> phrases;                          // rephrase only, blank order

    bool operator==(const Provenance&) const = default;
};

struct PathInstructionPair {
    std::string pair_id;
    std::string listing_id;
    std::vector<VisualStep> steps;
    std::string instruction;
    std::size_t path_length = 0;      // K
    std::size_t captioned_steps = 0;  // N
    Provenance provenance;
    std::uint64_t seed_used = 0;  // rng state at the start of sampling

    bool operator==(const PathInstructionPair&) const = default;
};

struct ConcatResult {
    std::string text;
    std::vector<std::string> connectives;
};

/// Joins non-empty segments in order with one drawn connective per gap.
/// Throws DataError when every segment is empty.
ConcatResult concat_instruction(const std::vector<std::string>& segments, const std::vector<Connective>& connectives,
                                RandomStream& rng);

/// Rebuilds a concatenation with an explicit connective sequence (one per gap).
std::string join_segments(const std::vector<std::string>& segments, const std::vector<std::string>& connectives);

/// Primary photo plus up to merge_cap - 1 other photos sharing its top-1 category. Photos whose
/// listing position is set in `taken` are not candidates.
VisualStep merge_images(const ListingRecord& listing, std::string_view primary_photo_id, std::size_t merge_cap,
                        RandomStream& rng, const std::vector<bool>& taken = {});

/// Templates indexed by blank count so eligible templates form a prefix.
class TemplateBank {
public:
    TemplateBank() = default;
    explicit TemplateBank(std::vector<InstructionTemplate> templates);

    /// Uniform choice among templates with n_blanks <= max_blanks; nullptr when none fit.
    const InstructionTemplate* pick(std::size_t max_blanks, RandomStream& rng) const;
    std::size_t size() const { return templates_.size(); }
    bool empty() const { return templates_.empty(); }

private:
    std::vector<InstructionTemplate> templates_;  // stable-sorted by n_blanks
};

/// Noun phrases of each captioned step, in step order.
std::vector<NounPhrase> phrase_pool(const std::vector<VisualStep>& steps, const Lexicon& lexicon);

/// Throws UnusableListing when the listing has fewer than two captioned photos.
PathInstructionPair sample_pair(const ListingRecord& listing, const TemplateBank& templates,
                                const SynthesisConfig& config, const Lexicon& lexicon, RandomStream& rng);

struct EpochResult {
    std::vector<PathInstructionPair> pairs;
    std::size_t skipped = 0;
};

/// At most one pair per listing, in listing order. Each listing draws from
/// substream(config.seed, listing_id, epoch), so output does not depend on `workers`.
EpochResult epoch_stream(const std::vector<ListingRecord>& corpus, const TemplateBank& templates,
                         const SynthesisConfig& config, const Lexicon& lexicon, std::uint64_t epoch,
                         std::size_t workers = 1);

inline constexpr std::string_view kImgToken = "[IMG]";
inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";

struct TokenizedPair {
    std::vector<std::string> visual_sequence;
    std::vector<std::string> text_sequence;
};

/// Visual: per step an [IMG] marker then one placeholder per region ("<feature_ref>#<i>").
/// Text: [CLS], whitespace tokens of the instruction, [SEP].
TokenizedPair serialize_tokens(const PathInstructionPair& pair);

std::string pair_to_json(const PathInstructionPair& pair);
PathInstructionPair pair_from_json(std::string_view json_text);
std::vector<PathInstructionPair> parse_pairs(const std::vector<InputLine>& lines);

}  // namespace pisynth
