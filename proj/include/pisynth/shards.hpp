#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pisynth {

inline constexpr int kSchemaVersion = 1;

struct ShardInfo {
    std::string file;  // relative to the manifest directory
    std::size_t records = 0;
    std::string hash;  // "fnv1a64:<16 hex digits>" over the file bytes
};

struct ShardManifest {
    std::string name;
    int schema_version = kSchemaVersion;
    std::vector<ShardInfo> shards;
    std::size_t total_records = 0;
};

struct InputLine {
    std::size_t number;  // 1-based, counted across all shards of a manifest
    std::string text;
};

/// Writes `records` (one JSON document each, no trailing newline) into fixed-size shards
/// `<name>-NNNNN.jsonl[.gz]` plus `<name>.manifest.json` under `out_dir`.
ShardManifest write_shards(std::span<const std::string> records, const std::filesystem::path& out_dir,
                           std::string_view name, std::size_t records_per_shard, bool gzip = false);

ShardManifest read_manifest(const std::filesystem::path& manifest_path);

/// Recomputes each shard hash and record count; false on any mismatch or missing file.
bool verify_manifest(const std::filesystem::path& manifest_path);

std::string content_hash(std::string_view bytes);

/// Non-blank lines of a record source: a .jsonl or .jsonl.gz file, a manifest, or a directory
/// holding exactly one manifest.
std::vector<InputLine> read_record_lines(const std::filesystem::path& source);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace pisynth
