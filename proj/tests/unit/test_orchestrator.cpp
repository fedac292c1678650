#include <doctest.h>

#include <map>
#include <random>
#include <set>
#include <sstream>

#include "zerops/errors.hpp"
#include "zerops/orchestrator.hpp"

using namespace zerops;

namespace {

DataSource source(const std::string& name, LabelMap labels, const std::string& node) {
    return {name, "file:/tmp/" + name + ".zops", std::move(labels), node};
}

AnalysisStepSpec step(const std::string& name, std::vector<LabelMap> selectors,
                      int64_t cpu = 200, std::optional<std::string> region = std::nullopt) {
    AnalysisStepSpec s;
    s.name = name;
    s.ingest_selectors = std::move(selectors);
    s.workload = "detect --in {source.url} --name {source.name}";
    s.resource_request = {cpu, 64 << 20};
    s.region_restriction = std::move(region);
    return s;
}

NodeDescriptor node(const std::string& name, const std::string& region, int64_t cpu = 1000) {
    return {name, region, {cpu, 4ll << 30}};
}

}  // namespace

TEST_CASE("selectors: AND within a selector, OR across selectors") {
    CHECK(selector_matches({{"tier", "edge"}}, {{"tier", "edge"}, {"city", "berlin"}}));
    CHECK_FALSE(selector_matches({{"tier", "edge"}, {"gpu", "yes"}}, {{"tier", "edge"}}));

    Registry registry;
    registry.register_source(source("s1", {{"tier", "cloud"}}, "n1"));
    const auto matched =
        match_sources(step("st", {{{"tier", "edge"}}, {{"tier", "cloud"}}}), registry);
    REQUIRE(matched.size() == 1);
    CHECK(matched[0].name == "s1");
}

TEST_CASE("registry: duplicate and unknown names are errors") {
    Registry registry;
    registry.register_node(node("n1", "edge"));
    CHECK_THROWS_AS(registry.register_node(node("n1", "edge")), RegistryError);
    CHECK_THROWS_AS(registry.update_node(node("nX", "edge")), RegistryError);
    CHECK_THROWS_AS(registry.delete_node("nX"), RegistryError);
    CHECK_THROWS_AS(registry.register_step(step("s", {})), RegistryError);
    CHECK_THROWS_AS(
        registry.register_step(step("s", {{{"a", "b"}}}, /*cpu=*/0)), RegistryError);
}

TEST_CASE("place: prefers the source's own node") {
    Registry registry;
    registry.register_node(node("edge1", "edge", 1000));
    registry.register_node(node("big", "edge", 8000));
    registry.register_source(source("s1", {{"tier", "edge"}}, "edge1"));
    std::map<std::string, ResourceSpec> used;
    const auto chosen =
        place(step("st", {{{"tier", "edge"}}}, 200), *registry.find_source("s1"), registry, used);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "edge1");
}

TEST_CASE("place: region restriction filters before the in-place preference") {
    Registry registry;
    registry.register_node(node("edge1", "edge", 1000));
    registry.register_node(node("cloud1", "cloud", 1000));
    registry.register_source(source("s1", {{"tier", "edge"}}, "edge1"));
    std::map<std::string, ResourceSpec> used;
    const auto chosen = place(step("st", {{{"tier", "edge"}}}, 200, "cloud"),
                              *registry.find_source("s1"), registry, used);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "cloud1");
}

TEST_CASE("place: same-region nodes are tried by free cpu, then the rest") {
    Registry registry;
    registry.register_node(node("edgeA", "edge", 300));
    registry.register_node(node("edgeB", "edge", 900));
    registry.register_node(node("edgeC", "edge", 400));
    registry.register_node(node("cloud1", "cloud", 8000));
    registry.register_source(source("s1", {}, "edgeA"));
    // Request too big for edgeA (tier 1); both edgeB and edgeC would fit, the
    // one with more free cpu wins.
    std::map<std::string, ResourceSpec> used;
    auto chosen = place(step("st", {{}}, 350), *registry.find_source("s1"), registry, used);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "edgeB");
    // edgeB now holds 350m (550m free), still ahead of edgeC's 400m.
    chosen = place(step("st2", {{}}, 350), *registry.find_source("s1"), registry, used);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "edgeB");
    // 200m free on edgeB after that; edgeC takes the next one.
    chosen = place(step("st3", {{}}, 350), *registry.find_source("s1"), registry, used);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "edgeC");
    // Too big for any edge node -> falls through to the cloud.
    std::map<std::string, ResourceSpec> used2;
    chosen = place(step("st", {{}}, 2000), *registry.find_source("s1"), registry, used2);
    REQUIRE(chosen.has_value());
    CHECK(*chosen == "cloud1");
}

TEST_CASE("place: infeasible requests are unschedulable, zero-capacity nodes never host") {
    Registry registry;
    registry.register_node(node("tiny", "edge", 0));
    registry.register_node(node("small", "edge", 1000));
    registry.register_source(source("s1", {}, "tiny"));
    std::map<std::string, ResourceSpec> used;
    const auto chosen =
        place(step("st", {{}}, 4000), *registry.find_source("s1"), registry, used);
    CHECK_FALSE(chosen.has_value());

    std::map<std::string, ResourceSpec> used2;
    const auto ok = place(step("st", {{}}, 100), *registry.find_source("s1"), registry, used2);
    REQUIRE(ok.has_value());
    CHECK(*ok == "small");
}

TEST_CASE("reconcile: empty registry yields an empty plan") {
    const auto plan = reconcile(Registry{}, {});
    CHECK(plan.assignments.empty());
    CHECK(plan.converged());
}

TEST_CASE("reconcile: one step matching three sources renders three distinct workloads") {
    Registry registry;
    registry.register_node(node("n1", "edge", 10'000));
    for (int i = 1; i <= 3; ++i)
        registry.register_source(source("s" + std::to_string(i), {{"tier", "edge"}}, "n1"));
    registry.register_step(step("st", {{{"tier", "edge"}}}));

    const auto plan = reconcile(registry, {});
    REQUIRE(plan.creates.size() == 3);
    for (const auto& a : plan.creates) {
        CHECK(a.command.find("file:/tmp/" + a.source + ".zops") != std::string::npos);
        CHECK(a.command.find("--name " + a.source) != std::string::npos);
    }
}

TEST_CASE("reconcile: deleting a step deletes exactly its workloads") {
    Registry registry;
    registry.register_node(node("n1", "edge", 10'000));
    for (int i = 1; i <= 3; ++i)
        registry.register_source(source("s" + std::to_string(i), {{"t", "x"}}, "n1"));
    registry.register_step(step("st", {{{"t", "x"}}}));
    const auto plan1 = reconcile(registry, {});
    REQUIRE(plan1.creates.size() == 3);

    registry.delete_step("st");
    const auto plan2 = reconcile(registry, plan1.assignments);
    CHECK(plan2.creates.empty());
    CHECK(plan2.deletes.size() == 3);
    CHECK(plan2.assignments.empty());
}

TEST_CASE("reconcile: converged state reconciles to an empty diff") {
    Registry registry;
    registry.register_node(node("n1", "edge"));
    registry.register_source(source("s1", {{"t", "x"}}, "n1"));
    registry.register_step(step("st", {{{"t", "x"}}}));
    const auto plan1 = reconcile(registry, {});
    REQUIRE(plan1.creates.size() == 1);
    const auto plan2 = reconcile(registry, plan1.assignments);
    CHECK(plan2.converged());
    CHECK(plan2.assignments == plan1.assignments);
}

TEST_CASE("reconcile: region restriction change evicts and replaces workloads") {
    Registry registry;
    registry.register_node(node("edge1", "edge"));
    registry.register_node(node("cloud1", "cloud"));
    registry.register_source(source("s1", {{"t", "x"}}, "edge1"));
    registry.register_step(step("st", {{{"t", "x"}}}));
    const auto plan1 = reconcile(registry, {});
    REQUIRE(plan1.assignments.size() == 1);
    CHECK(plan1.assignments[0].node == "edge1");

    registry.update_step(step("st", {{{"t", "x"}}}, 200, "cloud"));
    const auto plan2 = reconcile(registry, plan1.assignments);
    REQUIRE(plan2.deletes.size() == 1);
    REQUIRE(plan2.creates.size() == 1);
    CHECK(plan2.creates[0].node == "cloud1");
}

TEST_CASE("object files: load and plan dump round trip") {
    std::stringstream objects;
    objects << node("n1", "edge").to_json().dump() << "\n"
            << source("s1", {{"t", "x"}}, "n1").to_json().dump() << "\n"
            << step("st", {{{"t", "x"}}}).to_json().dump() << "\n";
    Registry registry;
    CHECK(load_objects(objects, registry) == 3);
    const auto plan = reconcile(registry, {});
    REQUIRE(plan.creates.size() == 1);
    std::ostringstream dump;
    dump_plan(plan, dump);
    const auto line = nlohmann::json::parse(dump.str().substr(0, dump.str().find('\n')));
    CHECK(line["op"] == "create");
    CHECK(line["step"] == "st");

    std::stringstream bad("{\"kind\":\"Mystery\"}\n");
    Registry r2;
    CHECK_THROWS_AS(load_objects(bad, r2), ConfigError);
}

// ---------------------------------------------------------------------------
// Randomized mutation property (scaled-down twin of the acceptance check)
// ---------------------------------------------------------------------------

namespace {

struct Simulation {
    Registry registry;
    std::vector<Assignment> running;
    std::mt19937_64 rng;
    int source_serial = 0, step_serial = 0, node_serial = 0;

    explicit Simulation(uint64_t seed) : rng(seed) {}

    std::string pick_region() {
        static const std::string regions[] = {"edge", "cloud", "fog"};
        return regions[std::uniform_int_distribution<size_t>(0, 2)(rng)];
    }

    LabelMap pick_labels() {
        LabelMap labels;
        if (std::bernoulli_distribution(0.8)(rng))
            labels["tier"] = pick_region();
        if (std::bernoulli_distribution(0.3)(rng)) labels["gpu"] = "yes";
        return labels;
    }

    void mutate() {
        switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
            case 0:
                registry.register_node(
                    {"n" + std::to_string(node_serial++), pick_region(),
                     {std::uniform_int_distribution<int64_t>(0, 2000)(rng), 4ll << 30}});
                break;
            case 1: {
                auto nodes = registry.nodes_sorted();
                if (!nodes.empty())
                    registry.delete_node(
                        nodes[std::uniform_int_distribution<size_t>(0, nodes.size() - 1)(rng)]
                            .name);
                break;
            }
            case 2: {
                auto nodes = registry.nodes_sorted();
                std::string host = nodes.empty() ? "nowhere" : nodes[0].name;
                registry.register_source(
                    source("s" + std::to_string(source_serial++), pick_labels(), host));
                break;
            }
            case 3: {
                auto sources = registry.sources_sorted();
                if (!sources.empty())
                    registry.delete_source(
                        sources[std::uniform_int_distribution<size_t>(0, sources.size() - 1)(rng)]
                            .name);
                break;
            }
            case 4: {
                std::optional<std::string> region;
                if (std::bernoulli_distribution(0.4)(rng)) region = pick_region();
                registry.register_step(step(
                    "st" + std::to_string(step_serial++), {pick_labels()},
                    std::uniform_int_distribution<int64_t>(50, 800)(rng), region));
                break;
            }
            case 5: {
                auto steps = registry.steps_sorted();
                if (!steps.empty())
                    registry.delete_step(
                        steps[std::uniform_int_distribution<size_t>(0, steps.size() - 1)(rng)]
                            .name);
                break;
            }
            case 6: {
                auto nodes = registry.nodes_sorted();
                if (!nodes.empty()) {
                    auto n = nodes[std::uniform_int_distribution<size_t>(0, nodes.size() - 1)(rng)];
                    n.capacity.cpu_millis = std::uniform_int_distribution<int64_t>(0, 2000)(rng);
                    registry.update_node(n);
                }
                break;
            }
            case 7: {
                auto sources = registry.sources_sorted();
                if (!sources.empty()) {
                    auto s = sources[std::uniform_int_distribution<size_t>(0, sources.size() - 1)(
                        rng)];
                    s.labels = pick_labels();
                    registry.update_source(s);
                }
                break;
            }
            default: {
                auto steps = registry.steps_sorted();
                if (!steps.empty()) {
                    auto s = steps[std::uniform_int_distribution<size_t>(0, steps.size() - 1)(rng)];
                    s.ingest_selectors = {pick_labels()};
                    if (std::bernoulli_distribution(0.3)(rng)) s.region_restriction = pick_region();
                    registry.update_step(s);
                }
                break;
            }
        }
    }

    void check_invariants(const PlacementPlan& plan) {
        std::map<std::string, ResourceSpec> totals;
        std::set<std::pair<std::string, std::string>> pairs;
        std::map<std::string, AnalysisStepSpec> steps;
        for (const auto& s : registry.steps_sorted()) steps[s.name] = s;
        for (const auto& a : plan.assignments) {
            REQUIRE(pairs.emplace(a.step, a.source).second);  // one per (step, source)
            const auto* n = registry.find_node(a.node);
            REQUIRE(n != nullptr);
            const auto& st = steps.at(a.step);
            if (st.region_restriction) REQUIRE(n->region == *st.region_restriction);
            auto& t = totals[a.node];
            t.cpu_millis += a.request.cpu_millis;
            t.memory_bytes += a.request.memory_bytes;
        }
        for (const auto& [name, total] : totals) {
            const auto* n = registry.find_node(name);
            REQUIRE(total.cpu_millis <= n->capacity.cpu_millis);
            REQUIRE(total.memory_bytes <= n->capacity.memory_bytes);
        }
    }
};

}  // namespace

TEST_CASE("reconcile properties: random mutation sequences hold every invariant") {
    for (uint64_t seed = 0; seed < 200; ++seed) {
        Simulation sim(seed);
        const int mutations = 3 + static_cast<int>(seed % 12);
        for (int i = 0; i < mutations; ++i) {
            sim.mutate();
            const auto plan = reconcile(sim.registry, sim.running);
            sim.check_invariants(plan);

            // Determinism: an identical registry and running set replans identically.
            const auto plan2 = reconcile(sim.registry, sim.running);
            REQUIRE(plan2.assignments == plan.assignments);
            REQUIRE(plan2.creates == plan.creates);
            REQUIRE(plan2.deletes == plan.deletes);

            sim.running = plan.assignments;
        }
        // Convergence: with mutations stopped, the next reconcile is a no-op.
        const auto settled = reconcile(sim.registry, sim.running);
        CHECK(settled.converged());
    }
}
