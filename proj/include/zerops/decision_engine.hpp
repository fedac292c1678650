#pragma once

// Density-grid remediation matching. An incident is summarized as the unit-
// norm mean per-metric error of its root-cause component; expert-provided
// patterns are sparse density grids over that feature space. A feature scores
// against a pattern by the density of its own cell plus half the density of
// the axis-neighboring cells; the best-scoring pattern's action is
// recommended unless the score falls below the no-match floor.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerops/rca.hpp"

namespace zerops {

inline constexpr uint32_t kDefaultGridResolution = 8;
inline constexpr double kDefaultMatchFloor = 0.05;

struct AnomalyFeature {
    std::vector<double> values;  // unit L2 norm, components in [-1, 1]
    std::string component;
    bool degenerate = false;  // all-zero errors; no match is attempted
};

// Mean per-metric error of the rank-1 component's events, L2-normalized.
AnomalyFeature featurize(const Incident& incident, const RootCauseVerdict& verdict);

// Cell index per dimension: floor((f+1)/2 * r), clamped to [0, r-1].
std::vector<int32_t> grid_cell(std::span<const double> feature, uint32_t resolution);

struct PatternGrid {
    uint32_t resolution = kDefaultGridResolution;
    std::string action;
    std::map<std::vector<int32_t>, double> cells;  // density per cell, sums to 1

    nlohmann::json to_json() const;
    static PatternGrid from_json(const nlohmann::json& j);
};

PatternGrid train_pattern(std::span<const AnomalyFeature> features, const std::string& action,
                          uint32_t resolution = kDefaultGridResolution);

struct ActionCatalogue {
    std::map<std::string, std::string> actions;  // id -> description
    std::vector<PatternGrid> patterns;

    // NDJSON lines: {"action":{"id":..,"description":..}} or
    // {"pattern":{...}}. Every pattern's action must exist.
    static ActionCatalogue load_ndjson(std::istream& in);
    static ActionCatalogue load_file(const std::string& path);
    void save_ndjson(std::ostream& out) const;
};

struct MatchResult {
    std::string action;
    double score = 0.0;
};

std::optional<MatchResult> grid_match(const ActionCatalogue& catalogue,
                                      const AnomalyFeature& feature,
                                      double floor = kDefaultMatchFloor);

struct RecommendedAction {
    uint64_t incident_id = 0;
    std::string component;
    std::string action;
    double score = 0.0;

    nlohmann::json to_json() const;
    static RecommendedAction from_json(const nlohmann::json& j);
};

}  // namespace zerops
