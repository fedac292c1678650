#pragma once

// High-frequency OS metrics collection. Reads monotone counters and gauges
// from the proc filesystem (or a recorded snapshot trace for deterministic
// replay), derives a fixed 28-metric sample per interval, and accounts its
// own CPU and memory overhead.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>

#include "zerops/endpoints.hpp"
#include "zerops/sample.hpp"

namespace zerops {

struct CounterSnapshot {
    // /proc/stat cpu jiffies (monotone)
    uint64_t cpu_user = 0, cpu_nice = 0, cpu_system = 0, cpu_idle = 0;
    uint64_t cpu_iowait = 0, cpu_irq = 0, cpu_softirq = 0, cpu_steal = 0;
    // /proc/loadavg (gauges)
    double load1 = 0, load5 = 0, load15 = 0;
    // /proc/meminfo (gauges, kB)
    uint64_t mem_total_kb = 0, mem_free_kb = 0, mem_cached_kb = 0, mem_buffers_kb = 0;
    uint64_t swap_total_kb = 0, swap_free_kb = 0;
    // /proc/net/dev totals over non-loopback interfaces (monotone)
    uint64_t net_rx_bytes = 0, net_tx_bytes = 0, net_rx_packets = 0, net_tx_packets = 0;
    uint64_t net_rx_errs = 0, net_tx_errs = 0;
    // /proc/diskstats totals (monotone)
    uint64_t disk_read_ops = 0, disk_write_ops = 0;
    uint64_t disk_read_sectors = 0, disk_write_sectors = 0;
    uint64_t disk_io_time_ms = 0;
    // /proc/stat process counters
    uint64_t procs_running = 0, procs_blocked = 0;
    uint64_t ctxt_switches = 0, forks = 0;

    bool operator==(const CounterSnapshot&) const = default;
};

// Reads all counter groups from /proc; throws CollectError naming the group
// that could not be read.
CounterSnapshot read_metrics_snapshot();

// The fixed 28-metric header every collector stream carries.
const MetricHeader& collector_header();
constexpr size_t kCollectorMetricCount = 28;

// Rates as (cur-prev)/elapsed, gauges copied. A wrapped counter (cur < prev)
// clamps its rate to 0 and logs a warning.
Sample derive_sample(const CounterSnapshot& prev, const CounterSnapshot& cur, double elapsed_s,
                     uint64_t timestamp_ns, const TagList& tags);

// Snapshot trace rows for the synthetic-replay source (CSV, one snapshot per
// line, fixed column order).
std::string snapshot_to_csv_row(const CounterSnapshot& snapshot);
CounterSnapshot snapshot_from_csv_row(const std::string& row);

class SnapshotSource {
public:
    virtual ~SnapshotSource() = default;
    virtual CounterSnapshot read() = 0;
};

// "os-counters" or "synthetic-replay:<path>"; replay cycles at end of trace
// (the wrap clamps rates once per cycle).
std::unique_ptr<SnapshotSource> open_snapshot_source(const std::string& spec);

struct CollectorConfig {
    std::chrono::nanoseconds interval = std::chrono::milliseconds(500);
    TagList tags;
    std::string source = "os-counters";
};

struct OverheadReport {
    std::chrono::nanoseconds interval{};
    double cpu_self_fraction = 0.0;  // collector thread CPU time / wall time
    uint64_t rss_bytes = 0;          // resident set size at end of run
    uint64_t samples_emitted = 0;
    double wall_seconds = 0.0;

    std::string csv_row() const;  // interval_ms,cpu_frac,rss_bytes,samples,wall_s
    static const char* csv_header();
};

uint64_t read_own_rss_bytes();

class Collector {
public:
    explicit Collector(CollectorConfig config);

    // Emits one sample per interval into the sink until stopped or until
    // `max_duration` elapses (zero: run until stop()). The first sample goes
    // out one interval in, once two snapshots exist.
    OverheadReport run(SampleSink& sink, std::chrono::nanoseconds max_duration);
    void stop() { stop_.store(true); }

    const CollectorConfig& config() const { return config_; }

private:
    CollectorConfig config_;
    std::atomic<bool> stop_{false};
};

}  // namespace zerops
