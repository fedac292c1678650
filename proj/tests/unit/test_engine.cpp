#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>
#include <thread>

#include "zerops/decision_engine.hpp"
#include "zerops/errors.hpp"
#include "zerops/event_bus.hpp"

using namespace zerops;

namespace {

Incident incident_with_errors(const std::vector<std::vector<double>>& per_metric_errors,
                              const std::string& component = "A") {
    Incident incident;
    incident.id = 1;
    uint64_t ts = 1'000'000'000ull;
    for (const auto& errors : per_metric_errors) {
        AnomalyEvent e;
        e.component = component;
        e.timestamp_ns = ts;
        e.error = 1.0;
        e.threshold = 0.5;
        e.per_metric_error = errors;
        incident.events_by_component[component].push_back(e);
        if (!incident.onsets.count(component)) incident.onsets[component] = ts;
        ts += 1;
    }
    incident.t_start_ns = 1'000'000'000ull;
    incident.t_end_ns = ts;
    return incident;
}

RootCauseVerdict verdict_for(const Incident& incident) {
    return make_verdict(incident, {});
}

AnomalyFeature feature_of(std::vector<double> values) {
    AnomalyFeature f;
    f.values = std::move(values);
    f.component = "A";
    return f;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("zerops_engine_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("featurize: single event normalizes its error vector") {
    const auto incident = incident_with_errors({{3.0, 0.0, 4.0, 0.0}});
    const auto feature = featurize(incident, verdict_for(incident));
    CHECK_FALSE(feature.degenerate);
    CHECK(feature.values[0] == doctest::Approx(0.6));
    CHECK(feature.values[2] == doctest::Approx(0.8));
}

TEST_CASE("featurize: orthogonal unit errors average to the diagonal") {
    const auto incident = incident_with_errors({{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    const auto feature = featurize(incident, verdict_for(incident));
    CHECK(feature.values[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(feature.values[1] == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(feature.values[2] == doctest::Approx(0.0));
}

TEST_CASE("featurize: all-zero errors are degenerate") {
    const auto incident = incident_with_errors({{0.0, 0.0}});
    CHECK(featurize(incident, verdict_for(incident)).degenerate);
}

TEST_CASE("featurize: uses the rank-1 component only") {
    Incident incident = incident_with_errors({{1.0, 0.0}}, "root");
    AnomalyEvent other;
    other.component = "other";
    other.timestamp_ns = 2'000'000'000ull;
    other.per_metric_error = {0.0, 1.0};
    incident.events_by_component["other"].push_back(other);
    incident.onsets["other"] = other.timestamp_ns;
    RootCauseVerdict verdict{1, {"root", "other"}, incident.onsets};
    const auto feature = featurize(incident, verdict);
    CHECK(feature.component == "root");
    CHECK(feature.values[0] == doctest::Approx(1.0));
}

TEST_CASE("train_pattern: binning and density normalization") {
    const auto f1 = feature_of({1.0, 0.0});
    CHECK(train_pattern(std::vector<AnomalyFeature>{f1}, "restart").cells.size() == 1);
    CHECK(train_pattern(std::vector<AnomalyFeature>{f1}, "restart").cells.begin()->second == 1.0);

    const auto same = train_pattern(std::vector<AnomalyFeature>{f1, f1}, "restart");
    CHECK(same.cells.size() == 1);
    CHECK(same.cells.begin()->second == 1.0);

    const auto f2 = feature_of({0.0, 1.0});
    const auto split = train_pattern(std::vector<AnomalyFeature>{f1, f2}, "restart");
    CHECK(split.cells.size() == 2);
    for (const auto& [_, density] : split.cells) CHECK(density == 0.5);
}

TEST_CASE("grid_cell: deterministic and clamped at the edges") {
    CHECK(grid_cell(std::vector<double>{1.0}, 8)[0] == 7);
    CHECK(grid_cell(std::vector<double>{-1.0}, 8)[0] == 0);
    CHECK(grid_cell(std::vector<double>{0.0}, 8)[0] == 4);
    CHECK(grid_cell(std::vector<double>{0.5}, 8) == grid_cell(std::vector<double>{0.5}, 8));
}

TEST_CASE("grid_match: exact feature scores 1.0") {
    const auto f = feature_of({1.0, 0.0, 0.0});
    ActionCatalogue catalogue;
    catalogue.actions["restart"] = "restart the service";
    catalogue.patterns.push_back(train_pattern(std::vector<AnomalyFeature>{f}, "restart"));
    const auto match = grid_match(catalogue, f);
    REQUIRE(match.has_value());
    CHECK(match->action == "restart");
    CHECK(match->score == doctest::Approx(1.0));
}

TEST_CASE("grid_match: within-cluster perturbations keep the action >= 95% of the time") {
    std::mt19937_64 rng(314);
    std::normal_distribution<double> noise(0.0, 0.02);
    const size_t dim = 28;
    // Generic cluster position (cell interiors). Sitting exactly on a cell
    // corner would fragment any fixed grid across 2^dim cells.
    std::vector<double> base(dim, 0.13);
    base[0] = base[1] = base[2] = base[3] = 0.53;

    auto draw = [&] {
        std::vector<double> v = base;
        double norm2 = 0.0;
        for (auto& x : v) {
            x += noise(rng);
            norm2 += x * x;
        }
        for (auto& x : v) x /= std::sqrt(norm2);
        return feature_of(v);
    };

    std::vector<AnomalyFeature> training;
    for (int i = 0; i < 100; ++i) training.push_back(draw());
    ActionCatalogue catalogue;
    catalogue.actions["migrate"] = "";
    catalogue.patterns.push_back(train_pattern(training, "migrate"));

    int hits = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto match = grid_match(catalogue, draw());
        if (match && match->action == "migrate") ++hits;
    }
    CHECK(hits >= 950);
}

TEST_CASE("grid_match: disjoint feature yields no-match") {
    ActionCatalogue catalogue;
    catalogue.actions["restart"] = "";
    catalogue.patterns.push_back(
        train_pattern(std::vector<AnomalyFeature>{feature_of({1.0, 0.0, 0.0, 0.0})}, "restart"));
    CHECK_FALSE(grid_match(catalogue, feature_of({0.0, 0.0, 0.0, -1.0})).has_value());
    CHECK_FALSE(grid_match(ActionCatalogue{}, feature_of({1.0, 0.0, 0.0, 0.0})).has_value());
    AnomalyFeature degenerate;
    degenerate.degenerate = true;
    CHECK_FALSE(grid_match(catalogue, degenerate).has_value());
}

TEST_CASE("grid_match: ties break toward the lexicographically smaller action") {
    const auto f = feature_of({1.0, 0.0});
    ActionCatalogue catalogue;
    catalogue.actions["zeta"] = "";
    catalogue.actions["alpha"] = "";
    catalogue.patterns.push_back(train_pattern(std::vector<AnomalyFeature>{f}, "zeta"));
    catalogue.patterns.push_back(train_pattern(std::vector<AnomalyFeature>{f}, "alpha"));
    const auto match = grid_match(catalogue, f);
    REQUIRE(match.has_value());
    CHECK(match->action == "alpha");
}

TEST_CASE("catalogue: file round trip and validation") {
    ActionCatalogue catalogue;
    catalogue.actions["restart"] = "restart the affected unit";
    catalogue.patterns.push_back(
        train_pattern(std::vector<AnomalyFeature>{feature_of({1.0, 0.0})}, "restart"));
    std::ostringstream out;
    catalogue.save_ndjson(out);
    std::istringstream in(out.str());
    const auto loaded = ActionCatalogue::load_ndjson(in);
    CHECK(loaded.actions.size() == 1);
    CHECK(loaded.patterns.size() == 1);
    CHECK(loaded.patterns[0].cells == catalogue.patterns[0].cells);

    std::istringstream orphan(R"({"pattern":{"action":"ghost","resolution":8,"cells":[{"idx":[1],"density":1.0}]}})" "\n");
    CHECK_THROWS_AS(ActionCatalogue::load_ndjson(orphan), ConfigError);
}

TEST_CASE("bus: no replay of events published before subscription") {
    EventBus bus;
    bus.publish("t", {{"n", 1}});
    auto sub = bus.subscribe("t");
    CHECK_FALSE(sub->poll(std::chrono::milliseconds(20)).has_value());
    bus.publish("t", {{"n", 2}});
    const auto got = sub->poll(std::chrono::milliseconds(200));
    REQUIRE(got.has_value());
    CHECK((*got)["n"] == 2);
}

TEST_CASE("bus: every subscriber receives a publish") {
    EventBus bus;
    auto a = bus.subscribe("t");
    auto b = bus.subscribe("t");
    bus.publish("t", {{"n", 7}});
    CHECK(a->poll(std::chrono::milliseconds(200)).has_value());
    CHECK(b->poll(std::chrono::milliseconds(200)).has_value());
}

TEST_CASE("bus: journal keeps 10000 publishes in order") {
    const auto dir = temp_dir("journal");
    {
        EventBus bus(dir);
        for (int i = 0; i < 10'000; ++i) bus.publish("events", {{"seq", i}});
    }
    const auto lines = EventBus::read_journal(dir / "events.ndjson");
    REQUIRE(lines.size() == 10'000);
    for (int i = 0; i < 10'000; ++i) REQUIRE(lines[static_cast<size_t>(i)]["seq"] == i);
}

TEST_CASE("bus: subscriber overflow drops the oldest") {
    EventBus bus(std::nullopt, /*subscriber_capacity=*/4);
    auto sub = bus.subscribe("t");
    for (int i = 0; i < 10; ++i) bus.publish("t", {{"n", i}});
    CHECK(sub->dropped() == 6);
    const auto first = sub->poll(std::chrono::milliseconds(50));
    REQUIRE(first.has_value());
    CHECK((*first)["n"] == 6);  // 0..5 dropped
}
