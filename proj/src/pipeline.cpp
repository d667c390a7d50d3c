#include "pisynth/pipeline.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/parallel.hpp"
#include "pisynth/text.hpp"

#include <algorithm>
#include <numeric>

namespace fs = std::filesystem;

namespace pisynth {

CleanStage run_clean(const fs::path& corpus, const IndoorPolicy& policy, std::size_t workers,
                     const OutputOptions& out) {
    const auto listings = parse_listings(read_record_lines(corpus));
    CleanedCorpus cleaned = clean_corpus(listings, policy, workers);

    std::vector<std::string> records(cleaned.listings.size());
    parallel_for(records.size(), workers, [&](std::size_t i) { records[i] = listing_to_json(cleaned.listings[i]); });

    CleanStage stage;
    stage.manifest = write_shards(records, out.out_dir, "listings", out.shard_size, out.gzip);
    stage.report = cleaned.report;
    write_file(out.out_dir / "clean_report.json", clean_report_to_json(cleaned.report) + "\n");
    return stage;
}

ShardManifest run_templates(const fs::path& instructions, const Lexicon& lexicon, const OutputOptions& out) {
    const auto parsed = parse_instructions(read_record_lines(instructions), lexicon);
    const auto templates = mine_templates(parsed);
    std::vector<std::string> records;
    records.reserve(templates.size());
    for (const auto& t : templates) records.push_back(template_to_json(t));
    return write_shards(records, out.out_dir, "templates", out.shard_size, out.gzip);
}

SynthStage run_synth(const fs::path& corpus, const std::optional<fs::path>& templates,
                     const SynthesisConfig& config, const Lexicon& lexicon, std::size_t epochs,
                     std::size_t workers, const OutputOptions& out) {
    config.validate();
    if (config.strategies.rephrase && !templates) {
        throw std::invalid_argument("the rephrase strategy needs a templates file");
    }
    const auto listings = parse_listings(read_record_lines(corpus));
    TemplateBank bank;
    if (templates) bank = TemplateBank(parse_templates(read_record_lines(*templates)));

    SynthStage stage;
    std::vector<std::string> records;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        EpochResult result = epoch_stream(listings, bank, config, lexicon, epoch, workers);
        const std::size_t base = records.size();
        records.resize(base + result.pairs.size());
        parallel_for(result.pairs.size(), workers,
                     [&](std::size_t i) { records[base + i] = pair_to_json(result.pairs[i]); });
        stage.pairs += result.pairs.size();
        stage.skipped += result.skipped;
    }
    stage.manifest = write_shards(records, out.out_dir, "pairs", out.shard_size, out.gzip);
    return stage;
}

NegativesStage run_negatives(const fs::path& pairs_path, std::size_t n, std::uint64_t seed, bool strict,
                             std::size_t workers, const OutputOptions& out) {
    auto pairs = parse_pairs(read_record_lines(pairs_path));
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return pairs[a].pair_id < pairs[b].pair_id; });

    std::vector<std::optional<std::string>> slots(pairs.size());
    parallel_for(order.size(), workers, [&](std::size_t i) {
        const auto& pair = pairs[order[i]];
        RandomStream rng = substream(seed, pair.pair_id, 0);
        try {
            slots[i] = negative_set_to_json(make_shuffle_negatives(pair, n, rng));
        } catch (const DataError&) {
            if (strict) throw;
        }
    });

    NegativesStage stage;
    std::vector<std::string> records;
    for (auto& s : slots) {
        if (s) {
            records.push_back(std::move(*s));
        } else {
            ++stage.skipped;
        }
    }
    stage.sets = records.size();
    stage.manifest = write_shards(records, out.out_dir, "negatives", out.shard_size, out.gzip);
    return stage;
}

CorruptStage run_corrupt(const fs::path& instructions, CorruptionKind kind, const std::vector<std::string>& noun_vocab,
                         const Lexicon& lexicon, std::uint64_t seed, bool strict, const OutputOptions& out) {
    const auto parsed = parse_instructions(read_record_lines(instructions), lexicon);
    CorruptStage stage;
    std::vector<std::string> records;
    for (const auto& ins : parsed) {
        RandomStream rng = substream(seed, ins.instruction_id, 0);
        try {
            CorruptionRecord rec;
            switch (kind) {
                case CorruptionKind::replace_nouns:
                    rec = corrupt_replace_nouns(ins.tokens, ins.np_spans, noun_vocab, rng);
                    break;
                case CorruptionKind::swap_nouns:
                    rec = corrupt_swap_nouns(ins.tokens, ins.np_spans, rng);
                    break;
                case CorruptionKind::switch_directions:
                    rec = corrupt_switch_directions(text::join(ins.tokens, " "));
                    break;
            }
            records.push_back(corruption_to_json(rec));
        } catch (const DataError&) {
            if (strict) throw;
            ++stage.skipped;
        }
    }
    stage.produced = records.size();
    stage.manifest = write_shards(records, out.out_dir, "corruptions", out.shard_size, out.gzip);
    return stage;
}

StatsReport run_stats(const fs::path& corpus, const std::optional<fs::path>& pairs) {
    StatsReport report = corpus_stats(parse_listings(read_record_lines(corpus)));
    if (pairs) {
        Histogram h;
        for (const auto& p : parse_pairs(read_record_lines(*pairs))) ++h[text::split_whitespace(p.instruction).size()];
        report.instruction_token_length = std::move(h);
    }
    return report;
}

}  // namespace pisynth
