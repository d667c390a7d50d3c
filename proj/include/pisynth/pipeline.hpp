#pragma once

#include "pisynth/corpus.hpp"
#include "pisynth/negatives.hpp"
#include "pisynth/shards.hpp"
#include "pisynth/synth.hpp"
#include "pisynth/templates.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pisynth {

struct OutputOptions {
    std::filesystem::path out_dir;
    std::size_t shard_size = 1000;
    bool gzip = false;
};

struct CleanStage {
    ShardManifest manifest;  // "listings"
    CleanReport report;      // also written to clean_report.json
};

CleanStage run_clean(const std::filesystem::path& corpus, const IndoorPolicy& policy, std::size_t workers,
                     const OutputOptions& out);

ShardManifest run_templates(const std::filesystem::path& instructions, const Lexicon& lexicon,
                            const OutputOptions& out);

struct SynthStage {
    ShardManifest manifest;  // "pairs", epoch-major, listing order within an epoch
    std::size_t pairs = 0;
    std::size_t skipped = 0;  // unusable listing-epochs
};

SynthStage run_synth(const std::filesystem::path& corpus, const std::optional<std::filesystem::path>& templates,
                     const SynthesisConfig& config, const Lexicon& lexicon, std::size_t epochs,
                     std::size_t workers, const OutputOptions& out);

struct NegativesStage {
    ShardManifest manifest;  // "negatives", ordered by pair_id
    std::size_t sets = 0;
    std::size_t skipped = 0;  // pairs admitting fewer than n shuffles (non-strict only)
};

/// Each pair draws from substream(seed, pair_id, 0). Strict mode rethrows instead of skipping.
NegativesStage run_negatives(const std::filesystem::path& pairs, std::size_t n, std::uint64_t seed, bool strict,
                             std::size_t workers, const OutputOptions& out);

struct CorruptStage {
    ShardManifest manifest;  // "corruptions", instruction order
    std::size_t produced = 0;
    std::size_t skipped = 0;
};

/// Each instruction draws from substream(seed, instruction_id, 0).
CorruptStage run_corrupt(const std::filesystem::path& instructions, CorruptionKind kind,
                         const std::vector<std::string>& noun_vocab, const Lexicon& lexicon, std::uint64_t seed,
                         bool strict, const OutputOptions& out);

StatsReport run_stats(const std::filesystem::path& corpus, const std::optional<std::filesystem::path>& pairs);

}  // namespace pisynth
