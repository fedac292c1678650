#pragma once

// Desk-scale reproduction of the overhead and per-sample-latency experiments:
// a seeded synthetic dataset generator, a sleep-based CPU throttle standing in
// for cgroup quotas, the collector frequency sweep, the detector budget sweep,
// and the just-in-time feasibility check.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zerops/collector.hpp"
#include "zerops/detector.hpp"
#include "zerops/sample.hpp"

namespace zerops {

struct AnomalySpec {
    size_t onset = 0;     // sample index
    size_t duration = 0;  // samples
    std::vector<size_t> metrics;
    double shift_sigma = 0.0;  // additive level shift in stationary-sigma units
};

struct SyntheticSpec {
    size_t count = 10'000;
    size_t metric_count = 28;
    uint64_t seed = 42;
    uint64_t start_ns = 1'600'000'000ull * 1'000'000'000ull;
    uint64_t interval_ns = 500'000'000ull;
    TagList tags;
    std::vector<AnomalySpec> anomalies;
};

// Deterministic given the seed: per-metric AR(1) processes plus injected
// additive level shifts on the specified metrics.
std::pair<MetricHeader, std::vector<Sample>> generate_dataset(const SyntheticSpec& spec);

struct CpuBudget {
    double fraction = 1.0;  // (0, 1] of one core; detectors are single-threaded
};

struct LatencyRow {
    std::string algorithm;
    double budget = 1.0;
    double mean_ms = 0.0;    // includes throttle sleep
    double stddev_ms = 0.0;
    uint64_t samples = 0;    // measured (after warmup)
    double busy_fraction = 0.0;  // busy time / wall time over the run
};

inline constexpr size_t kLatencyWarmupSamples = 100;

// Runs the workload over the dataset on a dedicated thread. After each sample
// taking busy time t, sleeps t*(1-b)/b so long-run CPU utilization stays at
// most b; the reported per-sample time includes that sleep, mirroring what a
// quota-limited process experiences.
LatencyRow throttled_run(const std::function<void(const Sample&)>& workload, CpuBudget budget,
                         const std::vector<Sample>& dataset, const std::string& algorithm);

// Workload factory: a cold-started detector of the given kind, 28 metrics.
std::function<void(const Sample&)> detector_workload(DetectorKind kind,
                                                     std::shared_ptr<Detector>& out);

// One collector run per interval; CSV columns ms,cpu,mem (percent of one core
// and of total memory).
void run_frequency_sweep(const std::vector<std::chrono::nanoseconds>& intervals,
                         std::chrono::nanoseconds duration_per_point, const std::string& source,
                         std::ostream& csv);

// Rows cpu,BIRCH,LSTM,ARIMA in ms/sample, budgets descending.
void run_budget_sweep(const std::vector<DetectorKind>& algorithms,
                      const std::vector<double>& budgets, const std::vector<Sample>& dataset,
                      std::ostream& csv);

struct JitResult {
    bool pass = false;
    double collector_cpu = 0.0;  // fractions of one core
    double detector_cpu = 0.0;
    double combined_cpu = 0.0;
    size_t max_queue_depth = 0;
    uint64_t samples = 0;
    std::vector<std::pair<double, size_t>> backlog;  // (seconds, queue depth)

    std::string csv_row(std::chrono::nanoseconds interval, const std::string& algo) const;
    static const char* csv_header();
};

// Drives a live collector into a detector through a bounded channel; passes
// iff the queue depth never exceeds 1 for the whole run. Aborts early once
// the backlog clearly diverges.
JitResult run_jit_check(std::chrono::nanoseconds interval, DetectorKind kind,
                        std::chrono::nanoseconds duration,
                        const std::string& source = "os-counters",
                        std::optional<std::chrono::nanoseconds> busy_loop = std::nullopt);

// Merges sweep CSVs in `dir` (freq.csv, budget.csv, jit.csv) into the figure
// axis layouts fig2.csv, fig3.csv, fig4.csv. Missing inputs are skipped.
void write_plotdata(const std::string& dir);

}  // namespace zerops
