#pragma once

#include "pisynth/random.hpp"
#include "pisynth/synth.hpp"
#include "pisynth/templates.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pisynth {

enum class ShuffleTarget { images, captions };

std::string_view to_string(ShuffleTarget t);

struct ShuffleNegative {
    ShuffleTarget target = ShuffleTarget::images;
    std::vector<std::size_t> permutation;  // new position k takes element permutation[k]
    PathInstructionPair pair;
};

struct ShuffleNegativeSet {
    PathInstructionPair positive;
    std::vector<ShuffleNegative> negatives;
};

/// Images target: the visual content of step permutation[k] moves to position k; captions and
/// instruction stay. Captions target: caption segments move and the instruction is rebuilt
/// with the positive's connectives (concat) or template (rephrase).
PathInstructionPair apply_shuffle(const PathInstructionPair& pair, ShuffleTarget target,
                                  const std::vector<std::size_t>& permutation);

/// n distinct shuffles drawn by Fisher-Yates, rejecting the identity, repeats, and caption
/// shuffles whose rebuilt instruction equals the positive's (those would still be aligned).
/// Throws DataError when K < 2, when 2 * (K! - 1) < n, or when fewer than n distinct
/// shuffles exist.
ShuffleNegativeSet make_shuffle_negatives(const PathInstructionPair& pair, std::size_t n, RandomStream& rng);

std::string negative_set_to_json(const ShuffleNegativeSet& set);

enum class CorruptionKind { replace_nouns, swap_nouns, switch_directions };

std::string_view to_string(CorruptionKind kind);
CorruptionKind parse_corruption_kind(std::string_view name);

struct Edit {
    Span span;  // whitespace-token indices in the original instruction
    std::string old_text;
    std::string new_text;
};

struct CorruptionRecord {
    CorruptionKind kind = CorruptionKind::replace_nouns;
    std::string original;
    std::string corrupted;
    std::vector<Edit> edits;
};

/// Replaces the head (last) token of each span with a different vocabulary noun. When
/// `max_spans` is set only that many spans, chosen uniformly, are replaced.
CorruptionRecord corrupt_replace_nouns(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                                       const std::vector<std::string>& noun_vocab, RandomStream& rng,
                                       std::optional<std::size_t> max_spans = std::nullopt);

/// Reorders span contents by a uniform non-identity permutation that changes the text.
CorruptionRecord corrupt_swap_nouns(const std::vector<std::string>& tokens, const std::vector<Span>& spans,
                                    RandomStream& rng);

/// Swaps left<->right and leftmost<->rightmost everywhere at once. Matches whole words that are
/// lowercase, capitalized or all caps, and keeps that casing. Throws DataError when nothing matches.
CorruptionRecord corrupt_switch_directions(std::string_view instruction);

std::string corruption_to_json(const CorruptionRecord& record);

inline constexpr std::string_view kHighlightOpen = "⟨HL⟩";
inline constexpr std::string_view kHighlightClose = "⟨/HL⟩";

std::string highlight_keywords(const std::vector<std::string>& tokens, const std::vector<Span>& spans);

inline constexpr double kCandidateSuccessRadiusM = 3.0;

struct Candidate {
    std::string id;
    double endpoint_distance_m = 0.0;
};

enum class CandidateClass { positive, negative };

struct CandidateLabel {
    std::string candidate_id;
    double endpoint_distance_m = 0.0;
    CandidateClass label = CandidateClass::negative;
};

struct ContrastSet {
    std::string positive_id;
    std::vector<std::string> negative_ids;
};

struct CandidateMining {
    std::vector<CandidateLabel> labels;
    std::vector<ContrastSet> contrast_sets;  // one per positive, in candidate order
};

/// Positive iff the path ends within 3 m (inclusive) of the goal.
CandidateMining mine_candidate_negatives(const std::vector<Candidate>& candidates,
                                         std::size_t negatives_per_positive, RandomStream& rng);

}  // namespace pisynth
