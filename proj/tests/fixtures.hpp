#pragma once

#include "pisynth/corpus.hpp"
#include "pisynth/metrics.hpp"
#include "pisynth/synth.hpp"
#include "pisynth/templates.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace pisynth::testing {

inline const std::vector<std::string> kIndoorCategories = {"bathroom", "bedroom", "dining_room", "kitchen",
                                                           "living_room"};

/// Policy over kIndoorCategories plus outdoor "patio" and "swimming_pool".
IndoorPolicy fixture_policy(bool strict = false);

PhotoRecord make_photo(const std::string& id, std::optional<std::string> caption, const std::string& category,
                       std::size_t regions = 4);

/// Listing with `captioned` distinct captions and `captionless` bare photos; categories cycle.
ListingRecord make_listing(const std::string& id, std::size_t captioned, std::size_t captionless);

/// Listings with 10-20 captioned and 8-15 captionless photos each. Captions are globally unique.
std::vector<ListingRecord> abundant_corpus(std::size_t listings, std::uint64_t seed);

/// JSONL corpus containing exactly 5 email, 5 URL, 4 duplicate-pair and 3 empty captions,
/// plus clean captions, captionless photos and one outdoor photo.
std::string cleaning_fixture_jsonl();

std::string to_jsonl(const std::vector<ListingRecord>& corpus);

/// Annotated instructions with span counts 0..9, several sharing a template.
std::vector<AnnotatedInstruction> instruction_fixture();

/// Instructions carrying direction words and at least two distinct noun phrases.
std::vector<AnnotatedInstruction> corruption_fixture(std::size_t count, std::uint64_t seed);

/// 61 environments, 17 of them with fewer than 80 paths.
std::map<std::string, std::size_t> env_fixture();

InstructionTemplate make_template(const std::vector<std::string>& slots);

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& name);

}  // namespace pisynth::testing
