#include "zerops/decision_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "zerops/errors.hpp"

namespace zerops {

AnomalyFeature featurize(const Incident& incident, const RootCauseVerdict& verdict) {
    AnomalyFeature feature;
    if (verdict.ranking.empty()) {
        feature.degenerate = true;
        return feature;
    }
    feature.component = verdict.ranking.front();
    auto it = incident.events_by_component.find(feature.component);
    if (it == incident.events_by_component.end() || it->second.empty()) {
        feature.degenerate = true;
        return feature;
    }
    const auto& events = it->second;
    const size_t dim = events.front().per_metric_error.size();
    feature.values.assign(dim, 0.0);
    for (const auto& event : events)
        for (size_t i = 0; i < dim && i < event.per_metric_error.size(); ++i)
            feature.values[i] += event.per_metric_error[i];
    double norm2 = 0.0;
    for (double& v : feature.values) {
        v /= static_cast<double>(events.size());
        norm2 += v * v;
    }
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) {
        feature.degenerate = true;  // zero vector maps to zero vector
        return feature;
    }
    for (double& v : feature.values) v /= norm;
    return feature;
}

std::vector<int32_t> grid_cell(std::span<const double> feature, uint32_t resolution) {
    std::vector<int32_t> cell(feature.size());
    const auto r = static_cast<int32_t>(resolution);
    for (size_t i = 0; i < feature.size(); ++i) {
        auto idx = static_cast<int32_t>(std::floor((feature[i] + 1.0) / 2.0 * resolution));
        cell[i] = std::clamp(idx, 0, r - 1);
    }
    return cell;
}

PatternGrid train_pattern(std::span<const AnomalyFeature> features, const std::string& action,
                          uint32_t resolution) {
    if (features.empty()) throw ConfigError("cannot train a pattern from zero features");
    PatternGrid grid;
    grid.resolution = resolution;
    grid.action = action;
    for (const auto& f : features) grid.cells[grid_cell(f.values, resolution)] += 1.0;
    const double total = static_cast<double>(features.size());
    for (auto& [_, density] : grid.cells) density /= total;
    return grid;
}

nlohmann::json PatternGrid::to_json() const {
    nlohmann::json cells_json = nlohmann::json::array();
    for (const auto& [idx, density] : cells)
        cells_json.push_back({{"idx", idx}, {"density", density}});
    return {{"action", action}, {"resolution", resolution}, {"cells", std::move(cells_json)}};
}

PatternGrid PatternGrid::from_json(const nlohmann::json& j) {
    PatternGrid grid;
    grid.action = j.at("action").get<std::string>();
    grid.resolution = j.at("resolution").get<uint32_t>();
    for (const auto& cell : j.at("cells"))
        grid.cells[cell.at("idx").get<std::vector<int32_t>>()] = cell.at("density").get<double>();
    if (grid.cells.empty()) throw ConfigError("pattern for action '" + grid.action +
                                              "' has no cells");
    return grid;
}

ActionCatalogue ActionCatalogue::load_ndjson(std::istream& in) {
    ActionCatalogue catalogue;
    std::string line;
    uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("catalogue line " + std::to_string(line_no) +
                              " is not valid JSON: " + e.what());
        }
        if (j.contains("action")) {
            const auto& a = j.at("action");
            catalogue.actions[a.at("id").get<std::string>()] = a.value("description", "");
        } else if (j.contains("pattern")) {
            catalogue.patterns.push_back(PatternGrid::from_json(j.at("pattern")));
        } else {
            throw ConfigError("catalogue line " + std::to_string(line_no) +
                              " has neither \"action\" nor \"pattern\"");
        }
    }
    for (const auto& pattern : catalogue.patterns)
        if (!catalogue.actions.count(pattern.action))
            throw ConfigError("pattern references unknown action '" + pattern.action + "'");
    return catalogue;
}

ActionCatalogue ActionCatalogue::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open catalogue file: " + path);
    return load_ndjson(in);
}

void ActionCatalogue::save_ndjson(std::ostream& out) const {
    for (const auto& [id, description] : actions)
        out << nlohmann::json{{"action", {{"id", id}, {"description", description}}}}.dump()
            << '\n';
    for (const auto& pattern : patterns)
        out << nlohmann::json{{"pattern", pattern.to_json()}}.dump() << '\n';
}

namespace {

double score_against(const PatternGrid& pattern, const std::vector<int32_t>& cell) {
    double score = 0.0;
    if (auto it = pattern.cells.find(cell); it != pattern.cells.end()) score += it->second;
    std::vector<int32_t> neighbor = cell;
    const auto r = static_cast<int32_t>(pattern.resolution);
    for (size_t dim = 0; dim < cell.size(); ++dim) {
        for (int step : {-1, +1}) {
            const int32_t idx = cell[dim] + step;
            if (idx < 0 || idx >= r) continue;
            neighbor[dim] = idx;
            if (auto it = pattern.cells.find(neighbor); it != pattern.cells.end())
                score += 0.5 * it->second;
        }
        neighbor[dim] = cell[dim];
    }
    return score;
}

}  // namespace

std::optional<MatchResult> grid_match(const ActionCatalogue& catalogue,
                                      const AnomalyFeature& feature, double floor) {
    if (feature.degenerate || catalogue.patterns.empty()) return std::nullopt;
    std::optional<MatchResult> best;
    for (const auto& pattern : catalogue.patterns) {
        const auto cell = grid_cell(feature.values, pattern.resolution);
        const double score = score_against(pattern, cell);
        if (!best || score > best->score ||
            (score == best->score && pattern.action < best->action))
            best = MatchResult{pattern.action, score};
    }
    if (!best || best->score < floor) return std::nullopt;
    return best;
}

nlohmann::json RecommendedAction::to_json() const {
    return {{"incident_id", incident_id},
            {"component", component},
            {"action", action},
            {"score", score}};
}

RecommendedAction RecommendedAction::from_json(const nlohmann::json& j) {
    return {j.at("incident_id").get<uint64_t>(), j.at("component").get<std::string>(),
            j.at("action").get<std::string>(), j.at("score").get<double>()};
}

}  // namespace zerops
