#include "pisynth/shards.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/random.hpp"

#include <nlohmann/json.hpp>
#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace pisynth {
namespace {

std::string gzip_bytes(std::string_view raw) {
    z_stream zs{};
    // windowBits 15 + 16 selects the gzip wrapper; header mtime stays 0 so output is reproducible.
    if (deflateInit2(&zs, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw std::runtime_error("deflateInit2 failed");
    }
    std::string out;
    out.resize(deflateBound(&zs, static_cast<uLong>(raw.size())) + 32);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(raw.data()));
    zs.avail_in = static_cast<uInt>(raw.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END) throw std::runtime_error("gzip compression failed");
    out.resize(zs.total_out);
    return out;
}

// Reads plain or gzip-compressed files transparently.
std::string read_maybe_gzip(const fs::path& path) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) throw DataError("cannot open " + path.string());
    std::string out;
    char buf[1 << 16];
    int n = 0;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) out.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(f);
    if (failed) throw DataError("read error in " + path.string());
    return out;
}

std::string shard_file_name(std::string_view name, std::size_t index, bool gzip) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "-%05zu.jsonl", index);
    std::string out = std::string(name) + buf;
    if (gzip) out += ".gz";
    return out;
}

void append_lines(const std::string& content, std::vector<InputLine>& out, std::size_t& counter) {
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        ++counter;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line) {
            if (c != ' ' && c != '\t') {
                blank = false;
                break;
            }
        }
        if (!blank) out.push_back({counter, std::move(line)});
    }
}

bool is_manifest(const fs::path& p) {
    const std::string name = p.filename().string();
    return name.size() > 14 && name.ends_with(".manifest.json");
}

}  // namespace

std::string content_hash(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

ShardManifest write_shards(std::span<const std::string> records, const fs::path& out_dir,
                           std::string_view name, std::size_t records_per_shard, bool gzip) {
    if (records_per_shard == 0) throw std::invalid_argument("records_per_shard must be >= 1");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

    ShardManifest manifest;
    manifest.name = std::string(name);
    for (std::size_t begin = 0, index = 0; begin < records.size(); begin += records_per_shard, ++index) {
        const std::size_t end = std::min(records.size(), begin + records_per_shard);
        std::string body;
        for (std::size_t i = begin; i < end; ++i) {
            body += records[i];
            body += '\n';
        }
        if (gzip) body = gzip_bytes(body);
        ShardInfo info{shard_file_name(name, index, gzip), end - begin, content_hash(body)};
        write_file(out_dir / info.file, body);
        manifest.shards.push_back(std::move(info));
    }
    manifest.total_records = records.size();

    ojson j;
    j["name"] = manifest.name;
    j["schema_version"] = manifest.schema_version;
    j["total_records"] = manifest.total_records;
    j["shards"] = ojson::array();
    for (const auto& s : manifest.shards) {
        j["shards"].push_back({{"file", s.file}, {"records", s.records}, {"hash", s.hash}});
    }
    write_file(out_dir / (manifest.name + ".manifest.json"), j.dump(2) + "\n");
    return manifest;
}

ShardManifest read_manifest(const fs::path& manifest_path) {
    ojson j;
    try {
        j = ojson::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    try {
        ShardManifest m;
        m.name = j.at("name").get<std::string>();
        m.schema_version = j.at("schema_version").get<int>();
        m.total_records = j.at("total_records").get<std::size_t>();
        for (const auto& s : j.at("shards")) {
            m.shards.push_back({s.at("file").get<std::string>(), s.at("records").get<std::size_t>(),
                                s.at("hash").get<std::string>()});
        }
        if (m.schema_version != kSchemaVersion) {
            throw DataError(manifest_path.string() + ": unsupported schema_version " +
                            std::to_string(m.schema_version));
        }
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.string() + ": malformed manifest: " + e.what());
    }
}

bool verify_manifest(const fs::path& manifest_path) {
    const ShardManifest m = read_manifest(manifest_path);
    const fs::path dir = manifest_path.parent_path();
    std::size_t total = 0;
    for (const auto& s : m.shards) {
        if (!fs::exists(dir / s.file)) return false;
        const std::string bytes = read_file(dir / s.file);
        if (content_hash(bytes) != s.hash) return false;
        std::vector<InputLine> lines;
        std::size_t counter = 0;
        append_lines(read_maybe_gzip(dir / s.file), lines, counter);
        if (lines.size() != s.records) return false;
        total += s.records;
    }
    return total == m.total_records;
}

std::vector<InputLine> read_record_lines(const fs::path& source) {
    fs::path manifest_path;
    if (fs::is_directory(source)) {
        for (const auto& entry : fs::directory_iterator(source)) {
            if (!is_manifest(entry.path())) continue;
            if (!manifest_path.empty()) throw DataError(source.string() + ": more than one manifest");
            manifest_path = entry.path();
        }
        if (manifest_path.empty()) throw DataError(source.string() + ": no manifest found");
    } else if (is_manifest(source)) {
        manifest_path = source;
    }

    std::vector<InputLine> out;
    std::size_t counter = 0;
    if (manifest_path.empty()) {
        append_lines(read_maybe_gzip(source), out, counter);
        return out;
    }
    const ShardManifest m = read_manifest(manifest_path);
    for (const auto& s : m.shards) append_lines(read_maybe_gzip(manifest_path.parent_path() / s.file), out, counter);
    return out;
}

}  // namespace pisynth
