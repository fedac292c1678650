#include "zerops/rca.hpp"

#include <algorithm>
#include <fstream>

#include "zerops/errors.hpp"

namespace zerops {

DependencyModel DependencyModel::load_ndjson(std::istream& in) {
    DependencyModel model;
    std::string line;
    uint64_t line_no = 0;
    std::vector<Edge> pending;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("dependency model line " + std::to_string(line_no) +
                              " is not valid JSON: " + e.what());
        }
        if (j.contains("component")) {
            model.components.insert(j.at("component").get<std::string>());
        } else if (j.contains("edge")) {
            const auto& e = j.at("edge");
            Edge edge{e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                      e.value("kind", "horizontal")};
            if (edge.kind != "horizontal" && edge.kind != "vertical")
                throw ConfigError("dependency edge kind must be horizontal or vertical (line " +
                                  std::to_string(line_no) + ")");
            pending.push_back(std::move(edge));
        } else {
            throw ConfigError("dependency model line " + std::to_string(line_no) +
                              " has neither \"component\" nor \"edge\"");
        }
    }
    for (auto& edge : pending) {
        if (!model.components.count(edge.from) || !model.components.count(edge.to))
            throw ConfigError("dependency edge " + edge.from + " -> " + edge.to +
                              " references unknown component");
        model.edges.push_back(std::move(edge));
    }
    return model;
}

DependencyModel DependencyModel::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dependency model file: " + path);
    return load_ndjson(in);
}

std::set<std::string> DependencyModel::transitive_dependents(const std::string& name) const {
    // Walk depends-on edges backwards; cycles are fine, the visited set
    // terminates the walk.
    std::multimap<std::string, std::string> reverse;  // to -> from
    for (const auto& e : edges) reverse.emplace(e.to, e.from);
    std::set<std::string> visited;
    std::vector<std::string> frontier{name};
    while (!frontier.empty()) {
        const std::string current = std::move(frontier.back());
        frontier.pop_back();
        auto [begin, end] = reverse.equal_range(current);
        for (auto it = begin; it != end; ++it) {
            if (it->second == name) continue;
            if (visited.insert(it->second).second) frontier.push_back(it->second);
        }
    }
    return visited;
}

size_t Incident::event_count() const {
    size_t n = 0;
    for (const auto& [_, events] : events_by_component) n += events.size();
    return n;
}

nlohmann::json Incident::to_json() const {
    nlohmann::json events = nlohmann::json::array();
    for (const auto& [_, list] : events_by_component)
        for (const auto& e : list) events.push_back(e.to_json());
    return {{"incident_id", id},
            {"t_start_ns", t_start_ns},
            {"t_end_ns", t_end_ns},
            {"events", std::move(events)}};
}

Incident Incident::from_json(const nlohmann::json& j) {
    Incident inc;
    inc.id = j.at("incident_id").get<uint64_t>();
    inc.t_start_ns = j.at("t_start_ns").get<uint64_t>();
    inc.t_end_ns = j.at("t_end_ns").get<uint64_t>();
    for (const auto& e : j.at("events")) {
        AnomalyEvent event = AnomalyEvent::from_json(e);
        auto& list = inc.events_by_component[event.component];
        auto onset = inc.onsets.find(event.component);
        if (onset == inc.onsets.end() || event.timestamp_ns < onset->second)
            inc.onsets[event.component] = event.timestamp_ns;
        list.push_back(std::move(event));
    }
    return inc;
}

nlohmann::json RootCauseVerdict::to_json() const {
    return {{"incident_id", incident_id}, {"ranking", ranking}, {"onsets", onsets}};
}

RootCauseVerdict RootCauseVerdict::from_json(const nlohmann::json& j) {
    RootCauseVerdict v;
    v.incident_id = j.at("incident_id").get<uint64_t>();
    v.ranking = j.at("ranking").get<std::vector<std::string>>();
    for (const auto& [component, ts] : j.at("onsets").items())
        v.onsets[component] = ts.get<uint64_t>();
    return v;
}

std::vector<Incident> IncidentTracker::ingest(const AnomalyEvent& event) {
    const uint64_t ts = event.timestamp_ns;
    if (any_event_ && ts + params_.lateness_ns < watermark_ns_) {
        ++dropped_late_;
        return {};
    }
    any_event_ = true;
    watermark_ns_ = std::max(watermark_ns_, ts);

    Incident* target = nullptr;
    for (auto& inc : open_) {
        const uint64_t lo = inc.t_start_ns > params_.gap_timeout_ns
                                ? inc.t_start_ns - params_.gap_timeout_ns
                                : 0;
        if (ts >= lo && ts <= inc.t_end_ns + params_.gap_timeout_ns) {
            target = &inc;
            break;
        }
    }
    if (target == nullptr) {
        Incident fresh;
        fresh.id = next_id_++;
        fresh.t_start_ns = ts;
        fresh.t_end_ns = ts;
        open_.push_back(std::move(fresh));
        target = &open_.back();
    }
    target->t_start_ns = std::min(target->t_start_ns, ts);
    target->t_end_ns = std::max(target->t_end_ns, ts);
    target->events_by_component[event.component].push_back(event);
    auto onset = target->onsets.find(event.component);
    if (onset == target->onsets.end() || ts < onset->second)
        target->onsets[event.component] = ts;

    std::vector<Incident> closed;
    for (auto it = open_.begin(); it != open_.end();) {
        if (it->t_end_ns + params_.gap_timeout_ns < watermark_ns_) {
            closed.push_back(std::move(*it));
            it = open_.erase(it);
        } else {
            ++it;
        }
    }
    std::sort(closed.begin(), closed.end(),
              [](const Incident& a, const Incident& b) { return a.id < b.id; });
    return closed;
}

std::vector<Incident> IncidentTracker::flush() {
    std::vector<Incident> closed(std::make_move_iterator(open_.begin()),
                                 std::make_move_iterator(open_.end()));
    open_.clear();
    std::sort(closed.begin(), closed.end(),
              [](const Incident& a, const Incident& b) { return a.id < b.id; });
    return closed;
}

std::vector<std::string> rank_root_causes(const Incident& incident, const DependencyModel& deps) {
    struct Entry {
        std::string component;
        uint64_t onset;
        size_t dependents_in_incident;
    };
    std::vector<Entry> entries;
    entries.reserve(incident.onsets.size());
    for (const auto& [component, onset] : incident.onsets) {
        const auto dependents = deps.transitive_dependents(component);
        size_t in_incident = 0;
        for (const auto& d : dependents)
            if (incident.onsets.count(d)) ++in_incident;
        entries.push_back({component, onset, in_incident});
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.onset != b.onset) return a.onset < b.onset;
        if (a.dependents_in_incident != b.dependents_in_incident)
            return a.dependents_in_incident > b.dependents_in_incident;
        return a.component < b.component;
    });
    std::vector<std::string> ranking;
    ranking.reserve(entries.size());
    for (auto& e : entries) ranking.push_back(std::move(e.component));
    return ranking;
}

RootCauseVerdict make_verdict(const Incident& incident, const DependencyModel& deps) {
    return {incident.id, rank_root_causes(incident, deps), incident.onsets};
}

}  // namespace zerops
