#include "zerops/orchestrator.hpp"

#include <algorithm>

#include "zerops/endpoints.hpp"
#include "zerops/errors.hpp"

namespace zerops {

namespace {

LabelMap labels_from_json(const nlohmann::json& j) {
    LabelMap labels;
    for (const auto& [key, value] : j.items()) labels[key] = value.get<std::string>();
    return labels;
}

ResourceSpec resources_from_json(const nlohmann::json& j) {
    return {j.at("cpu_millis").get<int64_t>(), j.at("memory_bytes").get<int64_t>()};
}

nlohmann::json resources_to_json(const ResourceSpec& r) {
    return {{"cpu_millis", r.cpu_millis}, {"memory_bytes", r.memory_bytes}};
}

void validate_source(const DataSource& source) {
    if (source.name.empty()) throw RegistryError("data source name must not be empty");
    StreamEndpoint::parse(source.url);  // throws TransportError when malformed
}

void validate_step(const AnalysisStepSpec& step) {
    if (step.name.empty()) throw RegistryError("analysis step name must not be empty");
    if (step.ingest_selectors.empty())
        throw RegistryError("analysis step '" + step.name + "' needs at least one ingest selector");
    if (step.resource_request.cpu_millis <= 0 || step.resource_request.memory_bytes <= 0)
        throw RegistryError("analysis step '" + step.name + "' needs a positive resource request");
}

void validate_node(const NodeDescriptor& node) {
    if (node.name.empty()) throw RegistryError("node name must not be empty");
    if (node.capacity.cpu_millis < 0 || node.capacity.memory_bytes < 0)
        throw RegistryError("node '" + node.name + "' capacity must be non-negative");
}

template <typename T>
void do_register(std::map<std::string, T>& map, T obj, const std::string& what) {
    const std::string name = obj.name;
    if (!map.emplace(name, std::move(obj)).second)
        throw RegistryError(what + " '" + name + "' is already registered");
}

template <typename T>
void do_update(std::map<std::string, T>& map, T obj, const std::string& what) {
    auto it = map.find(obj.name);
    if (it == map.end()) throw RegistryError(what + " '" + obj.name + "' is not registered");
    it->second = std::move(obj);
}

template <typename T>
void do_delete(std::map<std::string, T>& map, const std::string& name, const std::string& what) {
    if (map.erase(name) == 0) throw RegistryError(what + " '" + name + "' is not registered");
}

}  // namespace

nlohmann::json DataSource::to_json() const {
    return {{"kind", "DataSource"}, {"name", name}, {"url", url}, {"labels", labels},
            {"node", node}};
}

DataSource DataSource::from_json(const nlohmann::json& j) {
    DataSource s;
    s.name = j.at("name").get<std::string>();
    s.url = j.at("url").get<std::string>();
    if (j.contains("labels")) s.labels = labels_from_json(j.at("labels"));
    s.node = j.value("node", "");
    return s;
}

nlohmann::json AnalysisStepSpec::to_json() const {
    nlohmann::json selectors = nlohmann::json::array();
    for (const auto& sel : ingest_selectors) selectors.push_back(sel);
    nlohmann::json j{{"kind", "AnalysisStep"},
                     {"name", name},
                     {"ingest_selectors", std::move(selectors)},
                     {"workload", workload},
                     {"resource_request", resources_to_json(resource_request)},
                     {"hyperparameters", hyperparameters}};
    if (region_restriction) j["region_restriction"] = *region_restriction;
    return j;
}

AnalysisStepSpec AnalysisStepSpec::from_json(const nlohmann::json& j) {
    AnalysisStepSpec s;
    s.name = j.at("name").get<std::string>();
    for (const auto& sel : j.at("ingest_selectors")) s.ingest_selectors.push_back(labels_from_json(sel));
    s.workload = j.value("workload", "");
    s.resource_request = resources_from_json(j.at("resource_request"));
    if (j.contains("region_restriction") && !j.at("region_restriction").is_null())
        s.region_restriction = j.at("region_restriction").get<std::string>();
    if (j.contains("hyperparameters")) s.hyperparameters = labels_from_json(j.at("hyperparameters"));
    return s;
}

nlohmann::json NodeDescriptor::to_json() const {
    return {{"kind", "Node"}, {"name", name}, {"region", region},
            {"capacity", resources_to_json(capacity)}};
}

NodeDescriptor NodeDescriptor::from_json(const nlohmann::json& j) {
    NodeDescriptor n;
    n.name = j.at("name").get<std::string>();
    n.region = j.value("region", "");
    n.capacity = resources_from_json(j.at("capacity"));
    return n;
}

void Registry::register_source(DataSource source) {
    validate_source(source);
    do_register(sources_, std::move(source), "data source");
    ++generation_;
}

void Registry::update_source(DataSource source) {
    validate_source(source);
    do_update(sources_, std::move(source), "data source");
    ++generation_;
}

void Registry::delete_source(const std::string& name) {
    do_delete(sources_, name, "data source");
    ++generation_;
}

void Registry::register_step(AnalysisStepSpec step) {
    validate_step(step);
    do_register(steps_, std::move(step), "analysis step");
    ++generation_;
}

void Registry::update_step(AnalysisStepSpec step) {
    validate_step(step);
    do_update(steps_, std::move(step), "analysis step");
    ++generation_;
}

void Registry::delete_step(const std::string& name) {
    do_delete(steps_, name, "analysis step");
    ++generation_;
}

void Registry::register_node(NodeDescriptor node) {
    validate_node(node);
    do_register(nodes_, std::move(node), "node");
    ++generation_;
}

void Registry::update_node(NodeDescriptor node) {
    validate_node(node);
    do_update(nodes_, std::move(node), "node");
    ++generation_;
}

void Registry::delete_node(const std::string& name) {
    do_delete(nodes_, name, "node");
    ++generation_;
}

void Registry::apply(const nlohmann::json& object) {
    const std::string kind = object.at("kind").get<std::string>();
    if (kind == "DataSource") {
        DataSource s = DataSource::from_json(object);
        validate_source(s);
        sources_[s.name] = std::move(s);
    } else if (kind == "AnalysisStep") {
        AnalysisStepSpec s = AnalysisStepSpec::from_json(object);
        validate_step(s);
        steps_[s.name] = std::move(s);
    } else if (kind == "Node") {
        NodeDescriptor n = NodeDescriptor::from_json(object);
        validate_node(n);
        nodes_[n.name] = std::move(n);
    } else {
        throw RegistryError("unknown object kind '" + kind + "'");
    }
    ++generation_;
}

std::vector<DataSource> Registry::sources_sorted() const {
    std::vector<DataSource> out;
    out.reserve(sources_.size());
    for (const auto& [_, s] : sources_) out.push_back(s);
    return out;
}

std::vector<AnalysisStepSpec> Registry::steps_sorted() const {
    std::vector<AnalysisStepSpec> out;
    out.reserve(steps_.size());
    for (const auto& [_, s] : steps_) out.push_back(s);
    return out;
}

std::vector<NodeDescriptor> Registry::nodes_sorted() const {
    std::vector<NodeDescriptor> out;
    out.reserve(nodes_.size());
    for (const auto& [_, n] : nodes_) out.push_back(n);
    return out;
}

const DataSource* Registry::find_source(const std::string& name) const {
    auto it = sources_.find(name);
    return it == sources_.end() ? nullptr : &it->second;
}

const NodeDescriptor* Registry::find_node(const std::string& name) const {
    auto it = nodes_.find(name);
    return it == nodes_.end() ? nullptr : &it->second;
}

bool selector_matches(const LabelMap& selector, const LabelMap& labels) {
    for (const auto& [key, value] : selector) {
        auto it = labels.find(key);
        if (it == labels.end() || it->second != value) return false;
    }
    return true;
}

std::vector<DataSource> match_sources(const AnalysisStepSpec& step, const Registry& registry) {
    std::vector<DataSource> matched;
    for (const auto& source : registry.sources_sorted()) {
        for (const auto& selector : step.ingest_selectors) {
            if (selector_matches(selector, source.labels)) {
                matched.push_back(source);
                break;
            }
        }
    }
    return matched;  // sources_sorted() is already name-ordered
}

std::string render_workload(const std::string& command_template, const DataSource& source) {
    std::string out = command_template;
    for (const auto& [placeholder, value] :
         {std::pair<std::string, const std::string&>{"{source.url}", source.url},
          std::pair<std::string, const std::string&>{"{source.name}", source.name}}) {
        size_t pos = 0;
        while ((pos = out.find(placeholder, pos)) != std::string::npos) {
            out.replace(pos, placeholder.size(), value);
            pos += value.size();
        }
    }
    return out;
}

nlohmann::json Assignment::to_json() const {
    return {{"step", step}, {"source", source}, {"node", node},
            {"request", resources_to_json(request)}, {"command", command}};
}

namespace {

ResourceSpec allocatable(const NodeDescriptor& node,
                         const std::map<std::string, ResourceSpec>& used) {
    ResourceSpec free = node.capacity;
    if (auto it = used.find(node.name); it != used.end()) {
        free.cpu_millis -= it->second.cpu_millis;
        free.memory_bytes -= it->second.memory_bytes;
    }
    return free;
}

}  // namespace

std::optional<std::string> place(const AnalysisStepSpec& step, const DataSource& source,
                                 const Registry& registry,
                                 std::map<std::string, ResourceSpec>& used) {
    std::vector<NodeDescriptor> permitted;
    for (const auto& node : registry.nodes_sorted()) {
        if (step.region_restriction && node.region != *step.region_restriction) continue;
        permitted.push_back(node);
    }
    if (permitted.empty()) return std::nullopt;

    const NodeDescriptor* source_node = registry.find_node(source.node);
    const std::string source_region = source_node ? source_node->region : "";

    auto by_free_cpu = [&](const NodeDescriptor& a, const NodeDescriptor& b) {
        const auto fa = allocatable(a, used).cpu_millis;
        const auto fb = allocatable(b, used).cpu_millis;
        if (fa != fb) return fa > fb;
        return a.name < b.name;
    };

    std::vector<const NodeDescriptor*> candidates;
    // Tier 1: the source's own node (in-place analysis).
    for (const auto& node : permitted)
        if (node.name == source.node) candidates.push_back(&node);
    // Tier 2: nodes in the source's region.
    std::vector<const NodeDescriptor*> same_region;
    std::vector<const NodeDescriptor*> remaining;
    {
        std::vector<NodeDescriptor> sorted = permitted;
        std::sort(sorted.begin(), sorted.end(), by_free_cpu);
        // Stash sorted copies; pointers must refer to `permitted` storage.
        for (const auto& node : sorted) {
            auto it = std::find_if(permitted.begin(), permitted.end(),
                                   [&](const NodeDescriptor& n) { return n.name == node.name; });
            if (it->name == source.node) continue;  // already tier 1
            if (source_node && it->region == source_region)
                same_region.push_back(&*it);
            else
                remaining.push_back(&*it);
        }
    }
    candidates.insert(candidates.end(), same_region.begin(), same_region.end());
    candidates.insert(candidates.end(), remaining.begin(), remaining.end());

    for (const auto* node : candidates) {
        if (step.resource_request.fits_into(allocatable(*node, used))) {
            auto& u = used[node->name];
            u.cpu_millis += step.resource_request.cpu_millis;
            u.memory_bytes += step.resource_request.memory_bytes;
            return node->name;
        }
    }
    return std::nullopt;
}

PlacementPlan reconcile(const Registry& registry, const std::vector<Assignment>& running) {
    PlacementPlan plan;

    // Desired (step, source) pairs in deterministic order.
    struct Desired {
        AnalysisStepSpec step;
        DataSource source;
    };
    std::vector<Desired> desired;
    std::map<std::pair<std::string, std::string>, size_t> desired_index;
    for (const auto& step : registry.steps_sorted()) {
        for (const auto& source : match_sources(step, registry)) {
            desired_index[{step.name, source.name}] = desired.size();
            desired.push_back({step, source});
        }
    }

    // Keep running workloads that still correspond to a desired pair, comply
    // with the step's current region restriction and request, and still fit
    // their node's current capacity. Sorted so the outcome does not depend on
    // the caller's ordering of the running set.
    std::vector<Assignment> running_sorted = running;
    std::sort(running_sorted.begin(), running_sorted.end(),
              [](const Assignment& a, const Assignment& b) {
                  return std::tie(a.step, a.source, a.node) < std::tie(b.step, b.source, b.node);
              });
    std::map<std::string, ResourceSpec> used;
    std::vector<bool> satisfied(desired.size(), false);
    for (const auto& assignment : running_sorted) {
        auto it = desired_index.find({assignment.step, assignment.source});
        bool keep = it != desired_index.end() && !satisfied[it->second];
        if (keep) {
            const auto& want = desired[it->second];
            const NodeDescriptor* node = registry.find_node(assignment.node);
            keep = node != nullptr &&
                   assignment.request == want.step.resource_request &&
                   (!want.step.region_restriction ||
                    node->region == *want.step.region_restriction) &&
                   assignment.request.fits_into(allocatable(*node, used));
        }
        if (keep) {
            satisfied[it->second] = true;
            auto& u = used[assignment.node];
            u.cpu_millis += assignment.request.cpu_millis;
            u.memory_bytes += assignment.request.memory_bytes;
            plan.assignments.push_back(assignment);
        } else {
            plan.deletes.push_back(assignment);
        }
    }

    for (size_t i = 0; i < desired.size(); ++i) {
        if (satisfied[i]) continue;
        const auto& [step, source] = desired[i];
        auto node = place(step, source, registry, used);
        if (!node) {
            plan.unschedulable[step.name] =
                "no node with sufficient capacity" +
                std::string(step.region_restriction ? " in region '" + *step.region_restriction + "'"
                                                    : "");
            continue;
        }
        Assignment a{step.name, source.name, *node, step.resource_request,
                     render_workload(step.workload, source)};
        plan.creates.push_back(a);
        plan.assignments.push_back(std::move(a));
    }

    std::sort(plan.assignments.begin(), plan.assignments.end(),
              [](const Assignment& a, const Assignment& b) {
                  return std::tie(a.step, a.source) < std::tie(b.step, b.source);
              });
    return plan;
}

size_t load_objects(std::istream& in, Registry& registry) {
    std::string line;
    uint64_t line_no = 0;
    size_t applied = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("object line " + std::to_string(line_no) +
                              " is not valid JSON: " + e.what());
        }
        try {
            registry.apply(j);
        } catch (const std::exception& e) {
            throw ConfigError("object line " + std::to_string(line_no) + ": " + e.what());
        }
        ++applied;
    }
    return applied;
}

void dump_plan(const PlacementPlan& plan, std::ostream& out) {
    for (const auto& a : plan.creates) {
        nlohmann::json j = a.to_json();
        j["op"] = "create";
        out << j.dump() << '\n';
    }
    for (const auto& a : plan.deletes) {
        nlohmann::json j = a.to_json();
        j["op"] = "delete";
        out << j.dump() << '\n';
    }
    for (const auto& [step, reason] : plan.unschedulable)
        out << nlohmann::json{{"op", "unschedulable"}, {"step", step}, {"reason", reason}}.dump()
            << '\n';
}

}  // namespace zerops
