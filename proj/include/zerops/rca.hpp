#pragma once

// Time-based root cause analysis: anomaly events are sessionized into
// incidents by a gap timeout, and the components of a closed incident are
// ranked by earliest anomaly onset. Ties break toward components that others
// in the incident transitively depend on, then by name.

#include <cstdint>
#include <deque>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "zerops/detector.hpp"

namespace zerops {

struct DependencyModel {
    struct Edge {
        std::string from;  // the dependent
        std::string to;    // what it depends on
        std::string kind;  // "horizontal" or "vertical"
    };

    std::set<std::string> components;
    std::vector<Edge> edges;

    // NDJSON lines: {"component":"A"} or
    // {"edge":{"from":"B","to":"A","kind":"vertical"}}.
    static DependencyModel load_ndjson(std::istream& in);
    static DependencyModel load_file(const std::string& path);

    // Components (in or out of the model) that transitively depend on `name`.
    std::set<std::string> transitive_dependents(const std::string& name) const;
};

struct Incident {
    uint64_t id = 0;
    uint64_t t_start_ns = 0;
    uint64_t t_end_ns = 0;
    std::map<std::string, std::vector<AnomalyEvent>> events_by_component;
    std::map<std::string, uint64_t> onsets;  // first event time per component

    size_t event_count() const;
    nlohmann::json to_json() const;
    static Incident from_json(const nlohmann::json& j);
};

struct RootCauseVerdict {
    uint64_t incident_id = 0;
    std::vector<std::string> ranking;
    std::map<std::string, uint64_t> onsets;

    nlohmann::json to_json() const;
    static RootCauseVerdict from_json(const nlohmann::json& j);
};

struct RcaParams {
    uint64_t gap_timeout_ns = 30ull * 1'000'000'000;  // G
    uint64_t lateness_ns = 5ull * 1'000'000'000;      // accepted out-of-order slack
};

// Event-time sessionizer. Single logical processor: callers serialize access.
class IncidentTracker {
public:
    explicit IncidentTracker(RcaParams params = {}) : params_(params) {}

    // Folds one event in; returns incidents that closed because the watermark
    // moved past their gap timeout.
    std::vector<Incident> ingest(const AnomalyEvent& event);
    // Closes all open incidents (end of stream).
    std::vector<Incident> flush();

    uint64_t dropped_late() const { return dropped_late_; }
    size_t open_count() const { return open_.size(); }
    uint64_t watermark_ns() const { return watermark_ns_; }

private:
    RcaParams params_;
    std::deque<Incident> open_;
    uint64_t watermark_ns_ = 0;
    uint64_t next_id_ = 1;
    uint64_t dropped_late_ = 0;
    bool any_event_ = false;
};

// Onset-ascending ranking over the incident's components; see header comment
// for the tie-break rule.
std::vector<std::string> rank_root_causes(const Incident& incident, const DependencyModel& deps);

RootCauseVerdict make_verdict(const Incident& incident, const DependencyModel& deps);

}  // namespace zerops
