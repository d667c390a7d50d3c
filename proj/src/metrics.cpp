#include "pisynth/metrics.hpp"

#include "pisynth/errors.hpp"
#include "pisynth/random.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace pisynth {

double shuffling_loss(const ScoreSet& scores) {
    if (!std::isfinite(scores.positive_score)) throw DataError("shuffling_loss: non-finite positive score");
    double top = scores.positive_score;
    for (double s : scores.negative_scores) {
        if (!std::isfinite(s)) throw DataError("shuffling_loss: non-finite negative score");
        top = std::max(top, s);
    }
    if (scores.negative_scores.empty()) return 0.0;

    if (top == scores.positive_score) {
        // log(1 + sum exp(s_n - s+)) keeps precision when the positive dominates.
        double tail = 0.0;
        for (double s : scores.negative_scores) tail += std::exp(s - scores.positive_score);
        return std::log1p(tail);
    }
    double sum = std::exp(scores.positive_score - top);
    for (double s : scores.negative_scores) sum += std::exp(s - top);
    return top + std::log(sum) - scores.positive_score;
}

double pick_accuracy(std::span<const ScoreSet> sets) {
    if (sets.empty()) throw DataError("pick_accuracy: no score sets");
    std::size_t correct = 0;
    for (const auto& set : sets) {
        if (set.negative_scores.empty()) throw DataError("pick_accuracy: score set without negatives");
        const bool wins = std::all_of(set.negative_scores.begin(), set.negative_scores.end(),
                                      [&](double s) { return set.positive_score > s; });
        correct += wins ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(sets.size());
}

double distance(const Point3& a, const Point3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

namespace {

void check_episode(const EvalEpisode& e) {
    if (e.path_points.empty()) throw DataError("episode '" + e.episode_id + "': empty path");
    if (!(e.shortest_path_length_m > 0.0) || !std::isfinite(e.shortest_path_length_m)) {
        throw DataError("episode '" + e.episode_id + "': shortest_path_length_m must be > 0");
    }
}

double path_length(const std::vector<Point3>& points) {
    double pl = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) pl += distance(points[i - 1], points[i]);
    return pl;
}

// l / max(p, l) with p = max(PL, l); never exceeds 1.
double length_weight(double pl, double shortest) { return shortest / std::max(pl, shortest); }

}  // namespace

EpisodeScore score_r2r_episode(const EvalEpisode& e, double success_radius_m) {
    check_episode(e);
    EpisodeScore s;
    s.path_length = path_length(e.path_points);
    s.navigation_error = distance(e.path_points.back(), e.goal_position);
    s.success = s.navigation_error <= success_radius_m ? 1.0 : 0.0;
    double closest = s.navigation_error;
    for (const auto& p : e.path_points) closest = std::min(closest, distance(p, e.goal_position));
    s.oracle_success = closest <= success_radius_m ? 1.0 : 0.0;
    s.spl = s.success * length_weight(s.path_length, e.shortest_path_length_m);
    return s;
}

EvalReport eval_r2r(std::span<const EvalEpisode> episodes, double success_radius_m) {
    if (episodes.empty()) throw DataError("eval_r2r: no episodes");
    if (!(success_radius_m >= 0.0)) throw DataError("eval_r2r: success radius must be >= 0");
    EvalReport r;
    r.episodes = episodes.size();
    for (const auto& e : episodes) {
        const EpisodeScore s = score_r2r_episode(e, success_radius_m);
        r.path_length += s.path_length;
        r.navigation_error += s.navigation_error;
        r.success_rate += s.success;
        r.oracle_success_rate += s.oracle_success;
        r.spl += s.spl;
    }
    const auto n = static_cast<double>(episodes.size());
    r.path_length /= n;
    r.navigation_error /= n;
    r.success_rate /= n;
    r.oracle_success_rate /= n;
    r.spl /= n;
    return r;
}

EvalReport eval_reverie(std::span<const EvalEpisode> episodes) {
    if (episodes.empty()) throw DataError("eval_reverie: no episodes");
    EvalReport r;
    r.episodes = episodes.size();
    double rgs = 0.0, rgspl = 0.0;
    for (const auto& e : episodes) {
        if (!e.reverie) throw DataError("episode '" + e.episode_id + "': missing reverie fields");
        check_episode(e);
        const ReverieFields& f = *e.reverie;
        const double pl = path_length(e.path_points);
        const double weight = length_weight(pl, e.shortest_path_length_m);
        const bool success = f.viewpoints_with_target_visible.contains(f.stopped_viewpoint_id);
        const bool oracle = success || std::any_of(f.visited_viewpoint_ids.begin(), f.visited_viewpoint_ids.end(),
                                                   [&](const auto& v) { return f.viewpoints_with_target_visible.contains(v); });
        const bool grounded = success && f.predicted_object_id == f.target_object_id;
        r.path_length += pl;
        r.navigation_error += distance(e.path_points.back(), e.goal_position);
        r.success_rate += success ? 1.0 : 0.0;
        r.oracle_success_rate += oracle ? 1.0 : 0.0;
        r.spl += success ? weight : 0.0;
        rgs += grounded ? 1.0 : 0.0;
        rgspl += grounded ? weight : 0.0;
    }
    const auto n = static_cast<double>(episodes.size());
    r.path_length /= n;
    r.navigation_error /= n;
    r.success_rate /= n;
    r.oracle_success_rate /= n;
    r.spl /= n;
    r.rgs = rgs / n;
    r.rgspl = rgspl / n;
    return r;
}

FewShotSplit fewshot_split(const std::map<std::string, std::size_t>& env_path_counts, std::size_t set_size,
                           std::size_t n_sets, std::size_t min_paths, std::uint64_t seed) {
    if (set_size == 0) throw DataError("fewshot_split: set_size must be >= 1");
    FewShotSplit split;
    split.seed = seed;
    std::vector<std::string> eligible;
    for (const auto& [env, count] : env_path_counts) {
        (count >= min_paths ? eligible : split.excluded_envs).push_back(env);
    }
    if (eligible.size() < set_size) {
        throw DataError("fewshot_split: " + std::to_string(eligible.size()) + " eligible environments, need " +
                        std::to_string(set_size));
    }
    RandomStream rng(splitmix64_scramble(seed));
    for (std::size_t s = 0; s < n_sets; ++s) {
        std::vector<std::string> set;
        for (std::size_t k : sample_without_replacement(rng, eligible.size(), set_size)) set.push_back(eligible[k]);
        std::sort(set.begin(), set.end());
        split.sets.push_back(std::move(set));
    }
    return split;
}

namespace {

Point3 parse_point(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 3) throw std::invalid_argument("positions must have 3 coordinates");
    for (double c : v) {
        if (!std::isfinite(c)) throw std::invalid_argument("non-finite coordinate");
    }
    return {v[0], v[1], v[2]};
}

template <typename Fn>
auto parse_lines(const std::vector<InputLine>& lines, Fn&& fn) {
    using T = decltype(fn(json{}));
    std::vector<T> out;
    out.reserve(lines.size());
    for (const auto& line : lines) {
        try {
            out.push_back(fn(json::parse(line.text)));
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return out;
}

}  // namespace

std::vector<ScoreSet> parse_score_sets(const std::vector<InputLine>& lines) {
    return parse_lines(lines, [](const json& j) {
        ScoreSet s;
        s.positive_score = j.at("positive_score").get<double>();
        s.negative_scores = j.at("negative_scores").get<std::vector<double>>();
        return s;
    });
}

std::vector<EvalEpisode> parse_episodes(const std::vector<InputLine>& lines) {
    return parse_lines(lines, [](const json& j) {
        EvalEpisode e;
        e.episode_id = j.at("episode_id").get<std::string>();
        e.env_id = j.value("env_id", std::string{});
        for (const auto& p : j.at("path_points")) e.path_points.push_back(parse_point(p));
        if (e.path_points.empty()) throw std::invalid_argument("path_points must not be empty");
        e.goal_position = parse_point(j.at("goal_position"));
        e.shortest_path_length_m = j.at("shortest_path_length_m").get<double>();
        if (!(e.shortest_path_length_m > 0.0)) throw std::invalid_argument("shortest_path_length_m must be > 0");
        if (auto it = j.find("reverie"); it != j.end() && !it->is_null()) {
            ReverieFields f;
            f.stopped_viewpoint_id = it->at("stopped_viewpoint_id").get<std::string>();
            f.predicted_object_id = it->at("predicted_object_id").get<std::string>();
            f.target_object_id = it->at("target_object_id").get<std::string>();
            for (const auto& v : it->at("viewpoints_with_target_visible")) f.viewpoints_with_target_visible.insert(v.get<std::string>());
            if (auto vis = it->find("visited_viewpoint_ids"); vis != it->end()) {
                f.visited_viewpoint_ids = vis->get<std::vector<std::string>>();
            }
            e.reverie = std::move(f);
        }
        return e;
    });
}

std::map<std::string, std::size_t> parse_env_table(const std::vector<InputLine>& lines) {
    std::map<std::string, std::size_t> table;
    for (const auto& line : lines) {
        try {
            const json j = json::parse(line.text);
            const auto env = j.at("env_id").get<std::string>();
            const auto count = j.at("path_count").get<std::size_t>();
            if (!table.emplace(env, count).second) throw std::invalid_argument("duplicate env_id '" + env + "'");
        } catch (const json::exception& e) {
            throw ParseError(line.number, e.what());
        } catch (const std::invalid_argument& e) {
            throw ParseError(line.number, e.what());
        }
    }
    return table;
}

std::string eval_report_to_json(const EvalReport& r) {
    ojson j;
    j["episodes"] = r.episodes;
    j["PL"] = r.path_length;
    j["NE"] = r.navigation_error;
    j["SR"] = r.success_rate;
    j["OSR"] = r.oracle_success_rate;
    j["SPL"] = r.spl;
    if (r.rgs) j["RGS"] = *r.rgs;
    if (r.rgspl) j["RGSPL"] = *r.rgspl;
    return j.dump();
}

std::string fewshot_split_to_json(const FewShotSplit& s) {
    ojson j;
    j["seed"] = s.seed;
    j["excluded_envs"] = s.excluded_envs;
    j["sets"] = s.sets;
    return j.dump();
}

}  // namespace pisynth
