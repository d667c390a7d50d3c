// pisynth: command-line front end for the path-instruction synthesis pipeline.
//
//   pisynth clean     --corpus F --indoor-map F --out DIR
//   pisynth stats     --corpus F [--pairs F]
//   pisynth templates --instructions F --out DIR
//   pisynth synth     --corpus F [--templates F] --epochs E --strategies concat,rephrase,merge,insert --out DIR
//   pisynth negatives --pairs F --n 9 --out DIR
//   pisynth corrupt   --kind replace_nouns|swap_nouns|switch_directions --instructions F --out DIR
//   pisynth eval      --task r2r|reverie --episodes F [--radius 3.0]
//   pisynth fewshot   --envs F --set-size 1|6 [--sets 5] [--min-paths 80]
//   pisynth loss      --scores F
//
// Global flags: --seed, --workers, --out, --strict. Exit codes: 0 ok, 1 usage, 2 data.

#include "pisynth/corpus.hpp"
#include "pisynth/errors.hpp"
#include "pisynth/metrics.hpp"
#include "pisynth/negatives.hpp"
#include "pisynth/pipeline.hpp"
#include "pisynth/shards.hpp"
#include "pisynth/synth.hpp"
#include "pisynth/templates.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace pisynth;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct GlobalFlags {
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out;
    bool strict = false;
    std::size_t shard_size = 1000;
    bool gzip = false;
};

struct LexiconFlags {
    std::string nouns;
    std::string stopwords;
    std::string vocab;

    Lexicon load() const {
        Lexicon lex = Lexicon::builtin();
        if (!nouns.empty()) lex.nouns = parse_word_list(read_file(nouns));
        if (!stopwords.empty()) lex.stopwords = parse_word_list(read_file(stopwords));
        if (!vocab.empty()) lex.preferred = parse_word_list(read_file(vocab));
        return lex;
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--nouns", nouns, "Noun lexicon for the tagless chunker (one word per line)");
        cmd->add_option("--stopwords", stopwords, "Stopword/verb list for the tagless chunker");
        cmd->add_option("--vocab", vocab, "Preferred object-category vocabulary (one word per line)");
    }
};

OutputOptions output_options(const GlobalFlags& g) {
    if (g.out.empty()) throw std::invalid_argument("--out DIR is required for this command");
    return OutputOptions{g.out, g.shard_size, g.gzip};
}

void emit(const GlobalFlags& g, const std::string& file_name, const std::string& json_line) {
    if (g.out.empty()) {
        std::cout << json_line << "\n";
        return;
    }
    fs::create_directories(g.out);
    write_file(fs::path(g.out) / file_name, json_line + "\n");
    std::cout << json_line << "\n";
}

ojson manifest_summary(const ShardManifest& m) {
    ojson j;
    j["name"] = m.name;
    j["total_records"] = m.total_records;
    j["shards"] = m.shards.size();
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Path-instruction dataset synthesis and evaluation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--workers", g.workers, "Worker threads (output does not depend on this)")->check(CLI::PositiveNumber);
    app.add_option("--out", g.out, "Output directory");
    app.add_flag("--strict", g.strict, "Fail on data problems instead of skipping");
    app.add_option("--shard-size", g.shard_size, "Records per output shard")->check(CLI::PositiveNumber);
    app.add_flag("--gzip", g.gzip, "Gzip output shards");

    // clean
    auto* clean = app.add_subcommand("clean", "Drop outdoor photos and invalid captions");
    std::string corpus, indoor_map;
    clean->add_option("--corpus", corpus, "Listings (JSONL, gzip, manifest or directory)")->required();
    clean->add_option("--indoor-map", indoor_map, "JSON object {category: indoor|outdoor}")->required();

    // stats
    auto* stats = app.add_subcommand("stats", "Corpus statistics");
    std::string stats_pairs;
    stats->add_option("--corpus", corpus, "Listings")->required();
    stats->add_option("--pairs", stats_pairs, "Synthesized pairs, for instruction lengths");

    // templates
    auto* templates_cmd = app.add_subcommand("templates", "Mine fill-in-the-blank instruction templates");
    std::string instructions;
    LexiconFlags lexicon_flags;
    templates_cmd->add_option("--instructions", instructions, "Annotated instructions (JSONL)")->required();
    lexicon_flags.attach(templates_cmd);

    // synth
    auto* synth = app.add_subcommand("synth", "Synthesize path-instruction pairs");
    std::string templates_path, strategies = "concat";
    std::size_t epochs = 1;
    SynthesisConfig config;
    synth->add_option("--corpus", corpus, "Cleaned listings")->required();
    synth->add_option("--templates", templates_path, "Mined templates (needed by rephrase)");
    synth->add_option("--epochs", epochs, "Epochs; one pair per usable listing per epoch");
    synth->add_option("--strategies", strategies, "Subset of concat,rephrase,merge,insert");
    synth->add_option("--k-min", config.k_min, "Minimum path length");
    synth->add_option("--k-max", config.k_max, "Maximum path length");
    synth->add_option("--merge-cap", config.merge_cap, "Photos per merged step");
    lexicon_flags.attach(synth);

    // negatives
    auto* negatives = app.add_subcommand("negatives", "Build shuffled negatives for each pair");
    std::string pairs_path;
    std::size_t n_negatives = 9;
    negatives->add_option("--pairs", pairs_path, "Synthesized pairs")->required();
    negatives->add_option("--n", n_negatives, "Negatives per pair")->check(CLI::PositiveNumber);

    // corrupt
    auto* corrupt = app.add_subcommand("corrupt", "Corrupt annotated instructions");
    std::string kind_name;
    corrupt->add_option("--kind", kind_name, "replace_nouns|swap_nouns|switch_directions")
        ->required()
        ->check(CLI::IsMember({"replace_nouns", "swap_nouns", "switch_directions"}));
    corrupt->add_option("--instructions", instructions, "Annotated instructions (JSONL)")->required();
    lexicon_flags.attach(corrupt);

    // eval
    auto* eval = app.add_subcommand("eval", "Navigation metrics");
    std::string task, episodes_path;
    double radius = kDefaultSuccessRadiusM;
    eval->add_option("--task", task, "r2r|reverie")->required()->check(CLI::IsMember({"r2r", "reverie"}));
    eval->add_option("--episodes", episodes_path, "Episodes (JSONL)")->required();
    eval->add_option("--radius", radius, "Success radius in meters (r2r)");

    // fewshot
    auto* fewshot = app.add_subcommand("fewshot", "Few-shot environment splits");
    std::string envs_path;
    std::size_t set_size = 1, n_sets = 5, min_paths = 80;
    fewshot->add_option("--envs", envs_path, "Environment table (JSONL {env_id, path_count})")->required();
    fewshot->add_option("--set-size", set_size, "Environments per set")->required();
    fewshot->add_option("--sets", n_sets, "Number of sets");
    fewshot->add_option("--min-paths", min_paths, "Minimum paths for an eligible environment");

    // loss
    auto* loss = app.add_subcommand("loss", "Shuffling loss and pick accuracy over score sets");
    std::string scores_path;
    loss->add_option("--scores", scores_path, "Score sets (JSONL {positive_score, negative_scores})")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*clean) {
            const IndoorPolicy policy = parse_indoor_map(read_file(indoor_map), g.strict);
            const CleanStage stage = run_clean(corpus, policy, g.workers, output_options(g));
            ojson j = ojson::parse(clean_report_to_json(stage.report));
            j["output"] = manifest_summary(stage.manifest);
            std::cout << j.dump() << "\n";
        } else if (*stats) {
            std::optional<fs::path> pairs;
            if (!stats_pairs.empty()) pairs = stats_pairs;
            emit(g, "stats.json", stats_report_to_json(run_stats(corpus, pairs)));
        } else if (*templates_cmd) {
            const ShardManifest m = run_templates(instructions, lexicon_flags.load(), output_options(g));
            std::cout << manifest_summary(m).dump() << "\n";
        } else if (*synth) {
            config.strategies = parse_strategies(strategies);
            config.seed = g.seed;
            std::optional<fs::path> tpl;
            if (!templates_path.empty()) tpl = templates_path;
            const SynthStage stage =
                run_synth(corpus, tpl, config, lexicon_flags.load(), epochs, g.workers, output_options(g));
            ojson j;
            j["pairs"] = stage.pairs;
            j["skipped"] = stage.skipped;
            j["strategies"] = strategies_to_string(config.strategies);
            j["output"] = manifest_summary(stage.manifest);
            std::cout << j.dump() << "\n";
        } else if (*negatives) {
            const NegativesStage stage =
                run_negatives(pairs_path, n_negatives, g.seed, g.strict, g.workers, output_options(g));
            ojson j;
            j["sets"] = stage.sets;
            j["skipped"] = stage.skipped;
            j["output"] = manifest_summary(stage.manifest);
            std::cout << j.dump() << "\n";
        } else if (*corrupt) {
            const Lexicon lex = lexicon_flags.load();
            std::vector<std::string> vocab(lex.preferred.begin(), lex.preferred.end());
            std::sort(vocab.begin(), vocab.end());
            const CorruptStage stage = run_corrupt(instructions, parse_corruption_kind(kind_name), vocab, lex, g.seed,
                                                   g.strict, output_options(g));
            ojson j;
            j["kind"] = kind_name;
            j["produced"] = stage.produced;
            j["skipped"] = stage.skipped;
            j["output"] = manifest_summary(stage.manifest);
            std::cout << j.dump() << "\n";
        } else if (*eval) {
            const auto episodes = parse_episodes(read_record_lines(episodes_path));
            const EvalReport report = task == "r2r" ? eval_r2r(episodes, radius) : eval_reverie(episodes);
            emit(g, "eval_report.json", eval_report_to_json(report));
        } else if (*fewshot) {
            const auto table = parse_env_table(read_record_lines(envs_path));
            emit(g, "fewshot.json", fewshot_split_to_json(fewshot_split(table, set_size, n_sets, min_paths, g.seed)));
        } else if (*loss) {
            const auto sets = parse_score_sets(read_record_lines(scores_path));
            ojson per_set = ojson::array();
            double total = 0.0;
            for (const auto& s : sets) {
                const double l = shuffling_loss(s);
                per_set.push_back(l);
                total += l;
            }
            ojson j;
            j["sets"] = sets.size();
            j["mean_loss"] = sets.empty() ? 0.0 : total / static_cast<double>(sets.size());
            j["pick_accuracy"] = pick_accuracy(sets);
            j["losses"] = std::move(per_set);
            emit(g, "loss.json", j.dump());
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
