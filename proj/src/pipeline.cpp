#include "zerops/pipeline.hpp"

#include <atomic>
#include <map>
#include <thread>

#include "zerops/channel.hpp"
#include "zerops/errors.hpp"
#include "zerops/event_bus.hpp"
#include "zerops/log.hpp"
#include "zerops/model_repo.hpp"

namespace zerops {

namespace {

class ChannelSink final : public SampleSink {
public:
    explicit ChannelSink(BoundedChannel<Sample>& channel) : channel_(channel) {}
    void write(const Sample& sample) override { channel_.push(sample); }
    void close() override { channel_.close(); }

private:
    BoundedChannel<Sample>& channel_;
};

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config) {
    if (config.collector.has_value() == config.replay.has_value())
        throw ConfigError("pipeline needs exactly one input: a collector config or a replay endpoint");
    if (!std::filesystem::exists(config.deps_path))
        throw ConfigError("dependency model file not found: " + config.deps_path.string());
    if (!std::filesystem::exists(config.catalogue_path))
        throw ConfigError("catalogue file not found: " + config.catalogue_path.string());

    const DependencyModel deps = DependencyModel::load_file(config.deps_path.string());
    const ActionCatalogue catalogue = ActionCatalogue::load_file(config.catalogue_path.string());

    EventBus bus(config.journal_dir);
    auto anomalies_sub = bus.subscribe(kTopicAnomalies);
    auto incidents_sub = bus.subscribe(kTopicIncidents);
    auto verdicts_sub = bus.subscribe(kTopicVerdicts);

    std::optional<ModelRepo> repo;
    if (config.repo_dir) repo.emplace(*config.repo_dir);

    BoundedChannel<Sample> channel(config.queue_capacity);
    PipelineResult result;
    std::atomic<uint64_t> samples_in{0};
    std::atomic<uint64_t> warm_started{0};
    std::exception_ptr source_failure;

    // Stage 1: sample source.
    std::thread source_thread([&] {
        try {
            if (config.replay) {
                auto source = open_source(*config.replay);
                while (auto sample = source->next()) {
                    samples_in.fetch_add(1);
                    if (!channel.push(std::move(*sample))) break;
                }
            } else {
                Collector collector(*config.collector);
                ChannelSink sink(channel);
                const OverheadReport report = collector.run(sink, config.live_duration);
                samples_in.fetch_add(report.samples_emitted);
            }
        } catch (...) {
            source_failure = std::current_exception();
        }
        channel.close();
    });

    // Stage 2: per-component detectors.
    std::exception_ptr detector_failure;
    std::thread detector_thread([&] {
        std::map<std::string, Detector> detectors;
        auto detector_for = [&](const Sample& sample) -> Detector& {
            const std::string component = config.detector.component.empty()
                                              ? component_id(sample)
                                              : config.detector.component;
            auto it = detectors.find(component);
            if (it != detectors.end()) return it->second;

            DetectorConfig detector_config = config.detector;
            detector_config.component = component;
            detector_config.dim = sample.values.size();
            std::optional<Detector> restored;
            if (repo) {
                const ModelKey key{config.step_name, component, to_string(detector_config.kind)};
                if (auto blob = repo->get_latest(key)) {
                    try {
                        restored = Detector::restore_as(detector_config.kind, *blob);
                        warm_started.fetch_add(1);
                        log::info("warm start for %s from version %u", component.c_str(),
                                  blob->version);
                    } catch (const std::exception& e) {
                        log::warn("warm start for %s failed, cold start: %s", component.c_str(),
                                  e.what());
                    }
                }
            }
            return detectors
                .emplace(component, restored ? std::move(*restored) : Detector(detector_config))
                .first->second;
        };
        try {
            while (auto sample = channel.pop()) {
                if (auto event = detector_for(*sample).process(*sample))
                    bus.publish(kTopicAnomalies, event->to_json());
            }
        } catch (...) {
            detector_failure = std::current_exception();
            channel.close();  // unblock the producer; pushes turn into no-ops
        }
        if (repo) {
            for (const auto& [component, detector] : detectors) {
                try {
                    repo->put({config.step_name, component, to_string(detector.kind())},
                              detector.snapshot());
                } catch (const std::exception& e) {
                    log::warn("final snapshot for %s failed: %s", component.c_str(), e.what());
                }
            }
        }
    });

    // Stage 3: incident tracking and root cause ranking.
    std::atomic<bool> rca_drain{false};
    std::thread rca_thread([&] {
        IncidentTracker tracker(config.rca);
        auto emit = [&](std::vector<Incident> closed) {
            for (const auto& incident : closed) {
                bus.publish(kTopicIncidents, incident.to_json());
                bus.publish(kTopicVerdicts, make_verdict(incident, deps).to_json());
            }
        };
        while (true) {
            auto event = anomalies_sub->poll(std::chrono::milliseconds(50));
            if (event) {
                emit(tracker.ingest(AnomalyEvent::from_json(*event)));
            } else if (rca_drain.load() && anomalies_sub->pending() == 0) {
                break;
            }
        }
        emit(tracker.flush());
    });

    // Stage 4: decision engine.
    std::atomic<bool> engine_drain{false};
    std::thread engine_thread([&] {
        std::map<uint64_t, Incident> incidents;
        std::map<uint64_t, RootCauseVerdict> verdicts;
        auto try_match = [&](uint64_t id) {
            auto inc = incidents.find(id);
            auto ver = verdicts.find(id);
            if (inc == incidents.end() || ver == verdicts.end()) return;
            const AnomalyFeature feature = featurize(inc->second, ver->second);
            if (auto match = grid_match(catalogue, feature, config.match_floor)) {
                RecommendedAction action{id, feature.component, match->action, match->score};
                bus.publish(kTopicActions, action.to_json());
                // Execution hook: recommendations only, actual remediation is
                // out of scope.
                log::info("recommend action '%s' for incident %llu (component %s, score %.3f)",
                          match->action.c_str(), static_cast<unsigned long long>(id),
                          feature.component.c_str(), match->score);
            } else {
                log::info("incident %llu: no matching remediation pattern",
                          static_cast<unsigned long long>(id));
            }
            incidents.erase(inc);
            verdicts.erase(ver);
        };
        while (true) {
            bool idle = true;
            if (auto event = incidents_sub->poll(std::chrono::milliseconds(20))) {
                Incident incident = Incident::from_json(*event);
                const uint64_t id = incident.id;
                incidents.emplace(id, std::move(incident));
                try_match(id);
                idle = false;
            }
            if (auto event = verdicts_sub->poll(std::chrono::milliseconds(20))) {
                RootCauseVerdict verdict = RootCauseVerdict::from_json(*event);
                const uint64_t id = verdict.incident_id;
                verdicts.emplace(id, std::move(verdict));
                try_match(id);
                idle = false;
            }
            if (idle && engine_drain.load() && incidents_sub->pending() == 0 &&
                verdicts_sub->pending() == 0)
                break;
        }
    });

    source_thread.join();
    detector_thread.join();
    rca_drain.store(true);
    rca_thread.join();
    engine_drain.store(true);
    engine_thread.join();

    // Partial journals stay on disk either way.
    if (source_failure) std::rethrow_exception(source_failure);
    if (detector_failure) std::rethrow_exception(detector_failure);

    result.samples = samples_in.load();
    result.anomalies = bus.published(kTopicAnomalies);
    result.incidents = bus.published(kTopicIncidents);
    result.verdicts = bus.published(kTopicVerdicts);
    result.actions = bus.published(kTopicActions);
    result.warm_started_components = warm_started.load();
    return result;
}

}  // namespace zerops
