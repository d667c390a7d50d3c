#include "fixtures.hpp"

#include "pisynth/shards.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <sys/wait.h>

using namespace pisynth;
using namespace pisynth::testing;
namespace fs = std::filesystem;

namespace {

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(PISYNTH_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir = temp_dir("cli");
        log = dir / "log.txt";
        write_file(dir / "corpus.jsonl", to_jsonl(abundant_corpus(12, 21)) + cleaning_fixture_jsonl());
        write_file(dir / "indoor.json", read_file(fs::path(PISYNTH_SOURCE_DIR) / "data" / "indoor_map.json"));
        std::string ins;
        for (const auto& i : instruction_fixture()) {
            nlohmann::json j;
            j["instruction_id"] = i.instruction_id;
            j["tokens"] = i.tokens;
            j["np_spans"] = nlohmann::json::array();
            for (const auto& s : i.np_spans) j["np_spans"].push_back({s.start, s.end});
            ins += j.dump() + "\n";
        }
        write_file(dir / "instructions.jsonl", ins);
    }
    std::string d(const std::string& name) const { return (dir / name).string(); }
    std::string output() const { return read_file(log); }

    fs::path dir, log;
};

}  // namespace

TEST_F(Cli, UsageErrorsExitOne) {
    EXPECT_EQ(run("", log), 1);
    EXPECT_EQ(run("clean --out " + d("o"), log), 1);
    EXPECT_EQ(run("bogus", log), 1);
    EXPECT_EQ(run("synth --corpus " + d("corpus.jsonl") + " --strategies rephrase --out " + d("o"), log), 1);
    EXPECT_EQ(run("--help", log), 0);
}

TEST_F(Cli, DataErrorsExitTwo) {
    write_file(dir / "bad.jsonl", "{\"schema_version\":1,\"listing_id\":\"a\",\"photos\":[]}\nnot json\n");
    EXPECT_EQ(run("clean --corpus " + d("bad.jsonl") + " --indoor-map " + d("indoor.json") + " --out " + d("o"), log), 2);
    EXPECT_NE(output().find("line 2"), std::string::npos) << output();
    EXPECT_EQ(run("loss --scores " + d("missing.jsonl"), log), 2);
}

TEST_F(Cli, FullPipeline) {
    ASSERT_EQ(run("clean --corpus " + d("corpus.jsonl") + " --indoor-map " + d("indoor.json") + " --out " + d("clean"),
                  log),
              0)
        << output();
    const auto report = nlohmann::json::parse(read_file(dir / "clean" / "clean_report.json"));
    EXPECT_EQ(report.at("removed_email"), 5);
    EXPECT_TRUE(verify_manifest(dir / "clean" / "listings.manifest.json"));

    ASSERT_EQ(run("templates --instructions " + d("instructions.jsonl") + " --out " + d("tpl"), log), 0) << output();
    ASSERT_EQ(run("--seed 7 --workers 3 synth --corpus " + d("clean") + " --templates " + d("tpl") +
                      " --epochs 2 --strategies concat,rephrase,merge,insert --out " + d("pairs"),
                  log),
              0)
        << output();
    const auto pairs = read_record_lines(dir / "pairs");
    EXPECT_EQ(pairs.size(), 2 * 14u);

    ASSERT_EQ(run("--seed 7 negatives --pairs " + d("pairs") + " --n 9 --gzip --out " + d("neg"), log), 0) << output();
    EXPECT_EQ(read_record_lines(dir / "neg").size(), pairs.size());

    ASSERT_EQ(run("stats --corpus " + d("clean") + " --pairs " + d("pairs") + " --out " + d("stats"), log), 0)
        << output();
    const auto stats = nlohmann::json::parse(read_file(dir / "stats" / "stats.json"));
    EXPECT_EQ(stats.at("listings"), 14);
    EXPECT_TRUE(stats.contains("instruction_token_length"));
}

TEST_F(Cli, Corrupt) {
    ASSERT_EQ(run("corrupt --kind swap_nouns --instructions " + d("instructions.jsonl") + " --out " + d("c"), log), 0)
        << output();
    // ins0 and ins1 have fewer than two spans and are skipped.
    EXPECT_EQ(read_record_lines(dir / "c").size(), instruction_fixture().size() - 2);
    EXPECT_EQ(run("--strict corrupt --kind switch_directions --instructions " + d("instructions.jsonl") + " --out " +
                      d("c2"),
                  log),
              2);
}

TEST_F(Cli, EvalFewshotLoss) {
    write_file(dir / "eps.jsonl",
               R"({"episode_id":"a","env_id":"e","path_points":[[0,0,0],[10,0,0],[0,0,0]],"goal_position":[0,2,0],"shortest_path_length_m":10})"
               "\n");
    ASSERT_EQ(run("eval --task r2r --episodes " + d("eps.jsonl"), log), 0) << output();
    const auto r = nlohmann::json::parse(output());
    EXPECT_DOUBLE_EQ(r.at("SPL").get<double>(), 0.5);
    EXPECT_EQ(run("eval --task reverie --episodes " + d("eps.jsonl"), log), 2);

    std::string envs;
    for (const auto& [id, n] : env_fixture()) envs += nlohmann::json{{"env_id", id}, {"path_count", n}}.dump() + "\n";
    write_file(dir / "envs.jsonl", envs);
    ASSERT_EQ(run("--seed 3 fewshot --envs " + d("envs.jsonl") + " --set-size 6 --out " + d("fs"), log), 0)
        << output();
    const auto fs_json = nlohmann::json::parse(read_file(dir / "fs" / "fewshot.json"));
    EXPECT_EQ(fs_json.at("excluded_envs").size(), 17u);
    EXPECT_EQ(fs_json.at("sets").size(), 5u);

    write_file(dir / "scores.jsonl", R"({"positive_score":1,"negative_scores":[1,1,1,1,1,1,1,1,1]})" "\n");
    ASSERT_EQ(run("loss --scores " + d("scores.jsonl"), log), 0) << output();
    EXPECT_NEAR(nlohmann::json::parse(output()).at("mean_loss").get<double>(), std::log(10.0), 1e-9);
}
