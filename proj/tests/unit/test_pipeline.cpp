#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "zerops/bench.hpp"
#include "zerops/binary_codec.hpp"
#include "zerops/collector.hpp"
#include "zerops/errors.hpp"
#include "zerops/event_bus.hpp"
#include "zerops/pipeline.hpp"

using namespace zerops;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    fs::path dir;
    fs::path replay;
    fs::path deps;
    fs::path catalogue;

    explicit Fixture(const std::string& name, bool with_fault) {
        dir = fs::temp_directory_path() / ("zerops_pipeline_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);

        SyntheticSpec spec;
        spec.count = 2500;
        spec.seed = 31337;
        spec.tags = {{"host", "A"}};
        if (with_fault) spec.anomalies = {{1200, 80, {0, 1, 2, 3}, 10.0}};
        const auto [header, samples] = generate_dataset(spec);
        replay = dir / "replay.zops";
        {
            std::ofstream out(replay, std::ios::binary);
            const auto bytes = encode_binary(header, samples);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        }

        deps = dir / "deps.ndjson";
        std::ofstream(deps) << R"({"component":"A"})" << "\n"
                            << R"({"component":"B"})" << "\n"
                            << R"({"edge":{"from":"B","to":"A","kind":"vertical"}})" << "\n";

        catalogue = dir / "catalogue.ndjson";
        std::ofstream(catalogue) << R"({"action":{"id":"restart","description":"restart unit"}})"
                                 << "\n";
    }

    PipelineConfig config(const std::string& journal_name) const {
        PipelineConfig cfg;
        cfg.replay = StreamEndpoint::parse("file:" + replay.string());
        cfg.detector.kind = DetectorKind::birch;
        cfg.detector.threshold_sigma = 5.0;  // wiring test: keep false positives out
        cfg.detector.threshold_warmup = 100;
        cfg.deps_path = deps;
        cfg.catalogue_path = catalogue;
        cfg.journal_dir = dir / journal_name;
        return cfg;
    }
};

}  // namespace

TEST_CASE("pipeline: clean replay produces no incidents and no actions") {
    Fixture fx("clean", /*with_fault=*/false);
    const auto result = run_pipeline(fx.config("journal_clean"));
    CHECK(result.samples == 2500);
    CHECK(result.incidents == 0);
    CHECK(result.actions == 0);
}

TEST_CASE("pipeline: injected fault flows through to exactly one matching action") {
    Fixture fx("fault", /*with_fault=*/true);

    // Phase 1: no patterns in the catalogue; incidents and verdicts appear
    // but nothing is recommended.
    const auto phase1 = run_pipeline(fx.config("journal_p1"));
    CHECK(phase1.samples == 2500);
    CHECK(phase1.anomalies >= 1);
    CHECK(phase1.incidents >= 1);
    CHECK(phase1.verdicts == phase1.incidents);
    CHECK(phase1.actions == 0);

    // Train the expert pattern from the phase-1 fault incident (the one
    // containing the injected onset), as an operator labeling a past outage
    // would. Marginal tail false positives may have formed extra incidents;
    // the pattern match is what tells them apart downstream.
    const uint64_t onset_ts = 1'600'000'000ull * 1'000'000'000ull + 1200ull * 500'000'000ull;
    const auto incidents = EventBus::read_journal(fx.dir / "journal_p1" / "incidents.ndjson");
    const auto verdicts = EventBus::read_journal(fx.dir / "journal_p1" / "verdicts.ndjson");
    std::optional<Incident> fault_incident;
    for (const auto& j : incidents) {
        Incident candidate = Incident::from_json(j);
        if (candidate.t_start_ns <= onset_ts && onset_ts <= candidate.t_end_ns)
            fault_incident = std::move(candidate);
    }
    REQUIRE(fault_incident.has_value());
    const Incident& incident = *fault_incident;
    std::optional<RootCauseVerdict> fault_verdict;
    for (const auto& j : verdicts) {
        auto candidate = RootCauseVerdict::from_json(j);
        if (candidate.incident_id == incident.id) fault_verdict = std::move(candidate);
    }
    REQUIRE(fault_verdict.has_value());
    const RootCauseVerdict& verdict = *fault_verdict;
    CHECK(verdict.ranking == std::vector<std::string>{"A"});
    const AnomalyFeature feature = featurize(incident, verdict);
    REQUIRE_FALSE(feature.degenerate);
    ActionCatalogue catalogue;
    catalogue.actions["restart"] = "restart unit";
    catalogue.patterns.push_back(
        train_pattern(std::vector<AnomalyFeature>{feature}, "restart"));
    {
        std::ofstream out(fx.catalogue);
        catalogue.save_ndjson(out);
    }

    // Phase 2: the same replay now recommends exactly one action, and it is
    // the fault incident's.
    const auto phase2 = run_pipeline(fx.config("journal_p2"));
    CHECK(phase2.actions == 1);

    const auto actions = EventBus::read_journal(fx.dir / "journal_p2" / "actions.ndjson");
    REQUIRE(actions.size() == 1);
    const auto action = RecommendedAction::from_json(actions[0]);
    CHECK(action.action == "restart");
    CHECK(action.component == "A");
    CHECK(action.score >= 1.0);

    // Causal ordering across the journals: the action's incident has a
    // verdict, the verdict has an incident record covering the fault onset,
    // and its onset traces back to a journaled anomaly event.
    const auto p2_incidents = EventBus::read_journal(fx.dir / "journal_p2" / "incidents.ndjson");
    const auto p2_verdicts = EventBus::read_journal(fx.dir / "journal_p2" / "verdicts.ndjson");
    const auto p2_anomalies = EventBus::read_journal(fx.dir / "journal_p2" / "anomalies.ndjson");
    std::optional<RootCauseVerdict> v2;
    for (const auto& j : p2_verdicts) {
        auto candidate = RootCauseVerdict::from_json(j);
        if (candidate.incident_id == action.incident_id) v2 = std::move(candidate);
    }
    REQUIRE(v2.has_value());
    std::optional<Incident> i2;
    for (const auto& j : p2_incidents) {
        auto candidate = Incident::from_json(j);
        if (candidate.id == action.incident_id) i2 = std::move(candidate);
    }
    REQUIRE(i2.has_value());
    CHECK(i2->t_start_ns <= onset_ts);
    CHECK(onset_ts <= i2->t_end_ns);
    bool onset_event_journaled = false;
    for (const auto& j : p2_anomalies) {
        const auto e = AnomalyEvent::from_json(j);
        CHECK(e.component == "A");
        if (e.timestamp_ns == v2->onsets.at("A")) onset_event_journaled = true;
    }
    CHECK(onset_event_journaled);
}

TEST_CASE("pipeline: missing catalogue is a startup error naming the path") {
    Fixture fx("missing", /*with_fault=*/false);
    auto cfg = fx.config("journal_missing");
    cfg.catalogue_path = fx.dir / "nope.ndjson";
    try {
        run_pipeline(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nope.ndjson") != std::string::npos);
    }
}

TEST_CASE("pipeline: a corrupt replay surfaces as a stage failure, journals retained") {
    Fixture fx("corrupt", /*with_fault=*/false);
    std::ofstream(fx.replay, std::ios::binary | std::ios::trunc) << "NOPE-not-a-stream";
    CHECK_THROWS_AS(run_pipeline(fx.config("journal_bad")), CodecError);
    CHECK(fs::exists(fx.dir / "journal_bad"));  // partial journals stay
}

TEST_CASE("pipeline: empty stream produces no events and no state") {
    Fixture fx("empty", /*with_fault=*/false);
    {
        std::ofstream out(fx.replay, std::ios::binary | std::ios::trunc);
        const auto bytes = encode_binary(collector_header(), {});
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
    }
    const auto result = run_pipeline(fx.config("journal_empty"));
    CHECK(result.samples == 0);
    CHECK(result.anomalies == 0);
    CHECK(result.incidents == 0);
}

TEST_CASE("pipeline: warm start restores detectors from the repository") {
    Fixture fx("warm", /*with_fault=*/false);
    auto cfg = fx.config("journal_w1");
    cfg.repo_dir = fx.dir / "repo";
    const auto first = run_pipeline(cfg);
    CHECK(first.warm_started_components == 0);

    auto cfg2 = fx.config("journal_w2");
    cfg2.repo_dir = fx.dir / "repo";
    const auto second = run_pipeline(cfg2);
    CHECK(second.warm_started_components == 1);
}
