#pragma once

// One-process pipeline run: collector (or replay) -> per-component IFTM
// detectors -> incident tracker + root cause ranking -> density-grid action
// recommendation, connected by a bounded sample channel and the event bus.
// Exists for end-to-end runs and integration tests; production topology is
// the orchestrator spawning stages as separate workloads.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>

#include "zerops/channel.hpp"
#include "zerops/collector.hpp"
#include "zerops/decision_engine.hpp"
#include "zerops/detector.hpp"
#include "zerops/rca.hpp"

namespace zerops {

struct PipelineConfig {
    // Exactly one of the two inputs:
    std::optional<CollectorConfig> collector;
    std::optional<StreamEndpoint> replay;
    std::chrono::nanoseconds live_duration{0};  // live mode; 0 = until stopped

    DetectorConfig detector;           // component left empty: demux by sample tags
    std::string step_name = "detect";  // model repository key prefix

    std::filesystem::path deps_path;
    std::filesystem::path catalogue_path;
    std::filesystem::path journal_dir;
    std::optional<std::filesystem::path> repo_dir;  // warm start + final snapshot

    RcaParams rca;
    double match_floor = kDefaultMatchFloor;
    size_t queue_capacity = kDefaultQueueCapacity;
};

struct PipelineResult {
    uint64_t samples = 0;
    uint64_t anomalies = 0;
    uint64_t incidents = 0;
    uint64_t verdicts = 0;
    uint64_t actions = 0;
    uint64_t warm_started_components = 0;
};

inline constexpr const char* kTopicAnomalies = "anomalies";
inline constexpr const char* kTopicIncidents = "incidents";
inline constexpr const char* kTopicVerdicts = "verdicts";
inline constexpr const char* kTopicActions = "actions";

PipelineResult run_pipeline(const PipelineConfig& config);

}  // namespace zerops
