#pragma once

// In-process operator: declarative DataSource / AnalysisStep / Node objects,
// label-selector matching (AND within a selector, OR across selectors),
// region- and capacity-aware placement preferring the source's own node, and
// a deterministic reconcile loop that diffs desired workloads against running
// ones.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace zerops {

struct ResourceSpec {
    int64_t cpu_millis = 0;
    int64_t memory_bytes = 0;

    bool fits_into(const ResourceSpec& available) const {
        return cpu_millis <= available.cpu_millis && memory_bytes <= available.memory_bytes;
    }
    bool operator==(const ResourceSpec&) const = default;
};

using LabelMap = std::map<std::string, std::string>;

struct DataSource {
    std::string name;
    std::string url;
    LabelMap labels;
    std::string node;  // hosting node name

    nlohmann::json to_json() const;
    static DataSource from_json(const nlohmann::json& j);
};

struct AnalysisStepSpec {
    std::string name;
    std::vector<LabelMap> ingest_selectors;
    std::string workload;  // command template with {source.url} / {source.name}
    ResourceSpec resource_request;
    std::optional<std::string> region_restriction;
    LabelMap hyperparameters;

    nlohmann::json to_json() const;
    static AnalysisStepSpec from_json(const nlohmann::json& j);
};

struct NodeDescriptor {
    std::string name;
    std::string region;
    ResourceSpec capacity;

    nlohmann::json to_json() const;
    static NodeDescriptor from_json(const nlohmann::json& j);
};

class Registry {
public:
    void register_source(DataSource source);
    void update_source(DataSource source);
    void delete_source(const std::string& name);

    void register_step(AnalysisStepSpec step);
    void update_step(AnalysisStepSpec step);
    void delete_step(const std::string& name);

    void register_node(NodeDescriptor node);
    void update_node(NodeDescriptor node);
    void delete_node(const std::string& name);

    // Upsert used by the object-file loader.
    void apply(const nlohmann::json& object);

    std::vector<DataSource> sources_sorted() const;
    std::vector<AnalysisStepSpec> steps_sorted() const;
    std::vector<NodeDescriptor> nodes_sorted() const;
    const DataSource* find_source(const std::string& name) const;
    const NodeDescriptor* find_node(const std::string& name) const;
    uint64_t generation() const { return generation_; }

private:
    std::map<std::string, DataSource> sources_;
    std::map<std::string, AnalysisStepSpec> steps_;
    std::map<std::string, NodeDescriptor> nodes_;
    uint64_t generation_ = 0;  // bumped on every mutation; a reconcile is due
};

// A source matches iff ANY selector has every key=value pair present in the
// source's labels. Result sorted by source name.
bool selector_matches(const LabelMap& selector, const LabelMap& labels);
std::vector<DataSource> match_sources(const AnalysisStepSpec& step, const Registry& registry);

std::string render_workload(const std::string& command_template, const DataSource& source);

struct Assignment {
    std::string step;
    std::string source;
    std::string node;
    ResourceSpec request;  // recorded at placement time
    std::string command;

    bool operator==(const Assignment&) const = default;
    nlohmann::json to_json() const;
};

// Candidate order: the source's hosting node, then same-region nodes by
// allocatable CPU descending then name, then all remaining permitted nodes in
// that order. A region restriction filters candidates before anything else.
// Returns the chosen node and debits `used`, or nullopt when unschedulable.
std::optional<std::string> place(const AnalysisStepSpec& step, const DataSource& source,
                                 const Registry& registry,
                                 std::map<std::string, ResourceSpec>& used);

struct PlacementPlan {
    std::vector<Assignment> assignments;  // full desired state after reconcile
    std::vector<Assignment> creates;
    std::vector<Assignment> deletes;
    std::map<std::string, std::string> unschedulable;  // step name -> reason

    bool converged() const { return creates.empty() && deletes.empty(); }
};

PlacementPlan reconcile(const Registry& registry, const std::vector<Assignment>& running);

// NDJSON object files: one object per line, {"kind":"DataSource"|"AnalysisStep"
// |"Node", ...}. Returns the number of objects applied.
size_t load_objects(std::istream& in, Registry& registry);
void dump_plan(const PlacementPlan& plan, std::ostream& out);

}  // namespace zerops
