#include "fixtures.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/shards.hpp"

#include <gtest/gtest.h>

using namespace pisynth;
using pisynth::testing::temp_dir;

namespace {

std::vector<std::string> numbered_records(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(R"({"id":)" + std::to_string(i) + "}");
    return out;
}

}  // namespace

TEST(Shards, TenRecordsInShardsOfFour) {
    const auto dir = temp_dir("shards4");
    const auto m = write_shards(numbered_records(10), dir, "recs", 4);
    ASSERT_EQ(m.shards.size(), 3u);
    EXPECT_EQ(m.shards[0].records, 4u);
    EXPECT_EQ(m.shards[1].records, 4u);
    EXPECT_EQ(m.shards[2].records, 2u);
    EXPECT_EQ(m.total_records, 10u);
    EXPECT_EQ(read_file(dir / m.shards[2].file), "{\"id\":8}\n{\"id\":9}\n");
    EXPECT_TRUE(verify_manifest(dir / "recs.manifest.json"));
}

TEST(Shards, RerunGivesIdenticalHashes) {
    const auto a = write_shards(numbered_records(25), temp_dir("a"), "recs", 7);
    const auto b = write_shards(numbered_records(25), temp_dir("b"), "recs", 7);
    ASSERT_EQ(a.shards.size(), b.shards.size());
    for (std::size_t i = 0; i < a.shards.size(); ++i) EXPECT_EQ(a.shards[i].hash, b.shards[i].hash);
}

TEST(Shards, TamperingIsDetected) {
    const auto dir = temp_dir("tamper");
    const auto m = write_shards(numbered_records(5), dir, "recs", 2);
    write_file(dir / m.shards[1].file, "{\"id\":99}\n{\"id\":3}\n");
    EXPECT_FALSE(verify_manifest(dir / "recs.manifest.json"));
}

TEST(Shards, GzipRoundTrip) {
    const auto dir = temp_dir("gz");
    const auto m = write_shards(numbered_records(9), dir, "recs", 4, true);
    EXPECT_TRUE(verify_manifest(dir / "recs.manifest.json"));
    const auto lines = read_record_lines(dir);
    ASSERT_EQ(lines.size(), 9u);
    EXPECT_EQ(lines[8].number, 9u);
    EXPECT_EQ(lines[8].text, "{\"id\":8}");
    EXPECT_EQ(read_record_lines(dir / m.shards[0].file).size(), 4u);
}

TEST(Shards, ReadPlainFileSkipsBlankLines) {
    const auto dir = temp_dir("plain");
    write_file(dir / "x.jsonl", "{}\n\n  \n{\"a\":1}\n");
    const auto lines = read_record_lines(dir / "x.jsonl");
    ASSERT_EQ(lines.size(), 2u);
    EXPECT_EQ(lines[1].number, 4u);
}

TEST(Shards, EmptyInputWritesManifestOnly) {
    const auto dir = temp_dir("empty");
    const auto m = write_shards(std::vector<std::string>{}, dir, "recs", 4);
    EXPECT_EQ(m.total_records, 0u);
    EXPECT_TRUE(read_record_lines(dir).empty());
}

TEST(Shards, WrongSchemaVersionIsRejected) {
    const auto dir = temp_dir("schema");
    write_file(dir / "recs.manifest.json", R"({"name":"recs","schema_version":2,"shards":[],"total_records":0})");
    EXPECT_THROW(read_manifest(dir / "recs.manifest.json"), DataError);
}

TEST(Shards, MissingInputIsDataError) {
    EXPECT_THROW(read_record_lines("/nonexistent/path.jsonl"), DataError);
}
