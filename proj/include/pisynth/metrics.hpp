#pragma once

#include "pisynth/shards.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pisynth {

struct ScoreSet {
    double positive_score = 0.0;
    std::vector<double> negative_scores;
};

/// Cross-entropy of picking the positive among positive + negatives (log-sum-exp form).
/// Zero when there are no negatives. Throws DataError on non-finite scores.
double shuffling_loss(const ScoreSet& scores);

/// Fraction of sets whose positive strictly beats every negative; ties fail.
double pick_accuracy(std::span<const ScoreSet> sets);

using Point3 = std::array<double, 3>;

double distance(const Point3& a, const Point3& b);

struct ReverieFields {
    std::string stopped_viewpoint_id;
    std::string predicted_object_id;
    std::string target_object_id;
    std::set<std::string> viewpoints_with_target_visible;
    std::vector<std::string> visited_viewpoint_ids;  // optional; feeds OSR
};

struct EvalEpisode {
    std::string episode_id;
    std::string env_id;
    std::vector<Point3> path_points;
    Point3 goal_position{};
    double shortest_path_length_m = 0.0;
    std::optional<ReverieFields> reverie;
};

struct EvalReport {
    std::size_t episodes = 0;
    double path_length = 0.0;       // PL, meters
    double navigation_error = 0.0;  // NE, meters
    double success_rate = 0.0;      // SR
    double oracle_success_rate = 0.0;
    double spl = 0.0;
    std::optional<double> rgs;
    std::optional<double> rgspl;
};

inline constexpr double kDefaultSuccessRadiusM = 3.0;

/// Per-episode terms, averaged by eval_r2r.
struct EpisodeScore {
    double path_length = 0.0;
    double navigation_error = 0.0;
    double success = 0.0;
    double oracle_success = 0.0;
    double spl = 0.0;
};

EpisodeScore score_r2r_episode(const EvalEpisode& episode, double success_radius_m);

/// Throws DataError on an empty episode list or invalid episodes.
EvalReport eval_r2r(std::span<const EvalEpisode> episodes, double success_radius_m = kDefaultSuccessRadiusM);

/// Success means stopping at a viewpoint that sees the target; RGS additionally needs the right
/// object. Throws DataError naming the first episode without REVERIE fields.
EvalReport eval_reverie(std::span<const EvalEpisode> episodes);

struct FewShotSplit {
    std::vector<std::string> excluded_envs;  // sorted
    std::vector<std::vector<std::string>> sets;  // each sorted
    std::uint64_t seed = 0;
};

/// Excludes envs with fewer than min_paths paths, then draws n_sets independent sets of
/// set_size distinct eligible envs. Throws DataError if fewer than set_size are eligible.
FewShotSplit fewshot_split(const std::map<std::string, std::size_t>& env_path_counts, std::size_t set_size,
                           std::size_t n_sets, std::size_t min_paths, std::uint64_t seed);

std::vector<ScoreSet> parse_score_sets(const std::vector<InputLine>& lines);
std::vector<EvalEpisode> parse_episodes(const std::vector<InputLine>& lines);
std::map<std::string, std::size_t> parse_env_table(const std::vector<InputLine>& lines);

std::string eval_report_to_json(const EvalReport& report);
std::string fewshot_split_to_json(const FewShotSplit& split);

}  // namespace pisynth
