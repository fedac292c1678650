#include "zerops/collector.hpp"

#include <time.h>

#include <cctype>
#include <cinttypes>
#include <fstream>
#include <sstream>
#include <thread>
#include <vector>

#include "zerops/errors.hpp"
#include "zerops/log.hpp"

namespace zerops {

namespace {

std::string read_whole_file(const char* path, const char* group) {
    std::ifstream in(path);
    if (!in) throw CollectError(std::string("cannot read ") + path + " (" + group + ")");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void parse_proc_stat(CounterSnapshot& s) {
    const std::string text = read_whole_file("/proc/stat", "cpu counters");
    std::istringstream in(text);
    std::string line;
    bool saw_cpu = false;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "cpu") {
            ls >> s.cpu_user >> s.cpu_nice >> s.cpu_system >> s.cpu_idle >> s.cpu_iowait >>
                s.cpu_irq >> s.cpu_softirq >> s.cpu_steal;
            saw_cpu = true;
        } else if (key == "ctxt") {
            ls >> s.ctxt_switches;
        } else if (key == "processes") {
            ls >> s.forks;
        } else if (key == "procs_running") {
            ls >> s.procs_running;
        } else if (key == "procs_blocked") {
            ls >> s.procs_blocked;
        }
    }
    if (!saw_cpu) throw CollectError("no aggregate cpu line in /proc/stat (cpu counters)");
}

void parse_loadavg(CounterSnapshot& s) {
    const std::string text = read_whole_file("/proc/loadavg", "load averages");
    std::istringstream in(text);
    if (!(in >> s.load1 >> s.load5 >> s.load15))
        throw CollectError("malformed /proc/loadavg (load averages)");
}

void parse_meminfo(CounterSnapshot& s) {
    const std::string text = read_whole_file("/proc/meminfo", "memory gauges");
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string key;
        uint64_t value = 0;
        ls >> key >> value;
        if (key == "MemTotal:") s.mem_total_kb = value;
        else if (key == "MemFree:") s.mem_free_kb = value;
        else if (key == "Cached:") s.mem_cached_kb = value;
        else if (key == "Buffers:") s.mem_buffers_kb = value;
        else if (key == "SwapTotal:") s.swap_total_kb = value;
        else if (key == "SwapFree:") s.swap_free_kb = value;
    }
    if (s.mem_total_kb == 0) throw CollectError("MemTotal missing in /proc/meminfo (memory gauges)");
}

void parse_net_dev(CounterSnapshot& s) {
    const std::string text = read_whole_file("/proc/net/dev", "network counters");
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);  // two header lines
    std::getline(in, line);
    while (std::getline(in, line)) {
        const size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string iface = line.substr(0, colon);
        iface.erase(0, iface.find_first_not_of(' '));
        if (iface == "lo") continue;
        std::istringstream ls(line.substr(colon + 1));
        uint64_t rx_bytes, rx_packets, rx_errs, rx_drop, rx_fifo, rx_frame, rx_comp, rx_multi;
        uint64_t tx_bytes, tx_packets, tx_errs;
        if (ls >> rx_bytes >> rx_packets >> rx_errs >> rx_drop >> rx_fifo >> rx_frame >> rx_comp >>
            rx_multi >> tx_bytes >> tx_packets >> tx_errs) {
            s.net_rx_bytes += rx_bytes;
            s.net_rx_packets += rx_packets;
            s.net_rx_errs += rx_errs;
            s.net_tx_bytes += tx_bytes;
            s.net_tx_packets += tx_packets;
            s.net_tx_errs += tx_errs;
        }
    }
}

void parse_diskstats(CounterSnapshot& s) {
    const std::string text = read_whole_file("/proc/diskstats", "disk counters");
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        unsigned major = 0, minor = 0;
        std::string device;
        uint64_t reads = 0, reads_merged = 0, read_sectors = 0, read_ms = 0;
        uint64_t writes = 0, writes_merged = 0, write_sectors = 0, write_ms = 0;
        uint64_t in_flight = 0, io_ms = 0;
        if (!(ls >> major >> minor >> device >> reads >> reads_merged >> read_sectors >> read_ms >>
              writes >> writes_merged >> write_sectors >> write_ms >> in_flight >> io_ms))
            continue;
        // Whole devices only; partitions would double-count. Heuristic: skip
        // names ending in a digit preceded by a letter-digit stem (sda1,
        // nvme0n1p2), keep loop/sd/vd/nvme base devices.
        if (device.rfind("loop", 0) == 0 && device.size() > 4) {
            // loopN are whole devices; keep.
        } else if (!device.empty() && std::isdigit(static_cast<unsigned char>(device.back()))) {
            if (device.rfind("nvme", 0) == 0) {
                if (device.find('p') != std::string::npos) continue;  // nvme0n1p1
            } else {
                continue;  // sda1, vda2, ...
            }
        }
        s.disk_read_ops += reads;
        s.disk_write_ops += writes;
        s.disk_read_sectors += read_sectors;
        s.disk_write_sectors += write_sectors;
        s.disk_io_time_ms += io_ms;
    }
}

double rate(uint64_t prev, uint64_t cur, double elapsed_s, bool* wrapped) {
    if (cur < prev) {
        *wrapped = true;
        return 0.0;
    }
    return static_cast<double>(cur - prev) / elapsed_s;
}

class OsSnapshotSource final : public SnapshotSource {
public:
    CounterSnapshot read() override { return read_metrics_snapshot(); }
};

class ReplaySnapshotSource final : public SnapshotSource {
public:
    explicit ReplaySnapshotSource(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw CollectError("cannot open snapshot trace: " + path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            rows_.push_back(snapshot_from_csv_row(line));
        }
        if (rows_.empty()) throw CollectError("snapshot trace is empty: " + path);
    }

    CounterSnapshot read() override {
        const CounterSnapshot& s = rows_[next_];
        next_ = (next_ + 1) % rows_.size();
        return s;
    }

private:
    std::vector<CounterSnapshot> rows_;
    size_t next_ = 0;
};

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

}  // namespace

CounterSnapshot read_metrics_snapshot() {
    CounterSnapshot s;
    parse_proc_stat(s);
    parse_loadavg(s);
    parse_meminfo(s);
    parse_net_dev(s);
    parse_diskstats(s);
    return s;
}

const MetricHeader& collector_header() {
    static const MetricHeader header{{
        "cpu.utilization", "cpu.user", "cpu.system", "cpu.iowait", "cpu.steal",
        "load.1", "load.5", "load.15",
        "mem.used_frac", "mem.free_bytes", "mem.cached_bytes", "mem.buffers_bytes",
        "mem.swap_used_frac",
        "net.rx_bytes_per_s", "net.tx_bytes_per_s", "net.rx_packets_per_s",
        "net.tx_packets_per_s", "net.rx_errs_per_s", "net.tx_errs_per_s",
        "disk.read_bytes_per_s", "disk.write_bytes_per_s", "disk.read_ops_per_s",
        "disk.write_ops_per_s", "disk.io_time_frac",
        "proc.running", "proc.blocked", "proc.ctxt_switches_per_s", "proc.forks_per_s",
    }};
    return header;
}

Sample derive_sample(const CounterSnapshot& prev, const CounterSnapshot& cur, double elapsed_s,
                     uint64_t timestamp_ns, const TagList& tags) {
    if (elapsed_s <= 0.0) throw CollectError("elapsed time between snapshots must be positive");
    bool wrapped = false;
    Sample sample;
    sample.timestamp_ns = timestamp_ns;
    sample.tags = tags;
    sample.values.resize(kCollectorMetricCount);

    const uint64_t busy_prev = prev.cpu_user + prev.cpu_nice + prev.cpu_system + prev.cpu_irq +
                               prev.cpu_softirq + prev.cpu_steal;
    const uint64_t busy_cur = cur.cpu_user + cur.cpu_nice + cur.cpu_system + cur.cpu_irq +
                              cur.cpu_softirq + cur.cpu_steal;
    const uint64_t total_prev = busy_prev + prev.cpu_idle + prev.cpu_iowait;
    const uint64_t total_cur = busy_cur + cur.cpu_idle + cur.cpu_iowait;
    const double total_delta =
        total_cur >= total_prev ? static_cast<double>(total_cur - total_prev) : 0.0;
    auto cpu_frac = [&](uint64_t p, uint64_t c) {
        if (total_delta <= 0.0 || c < p) {
            wrapped |= c < p;
            return 0.0;
        }
        return static_cast<double>(c - p) / total_delta;
    };
    sample.values[0] = cpu_frac(busy_prev, busy_cur);
    sample.values[1] = cpu_frac(prev.cpu_user + prev.cpu_nice, cur.cpu_user + cur.cpu_nice);
    sample.values[2] = cpu_frac(prev.cpu_system + prev.cpu_irq + prev.cpu_softirq,
                                cur.cpu_system + cur.cpu_irq + cur.cpu_softirq);
    sample.values[3] = cpu_frac(prev.cpu_iowait, cur.cpu_iowait);
    sample.values[4] = cpu_frac(prev.cpu_steal, cur.cpu_steal);

    sample.values[5] = cur.load1;
    sample.values[6] = cur.load5;
    sample.values[7] = cur.load15;

    const double total_kb = static_cast<double>(cur.mem_total_kb);
    sample.values[8] =
        total_kb > 0
            ? 1.0 - static_cast<double>(cur.mem_free_kb + cur.mem_cached_kb + cur.mem_buffers_kb) /
                        total_kb
            : 0.0;
    sample.values[9] = static_cast<double>(cur.mem_free_kb) * 1024.0;
    sample.values[10] = static_cast<double>(cur.mem_cached_kb) * 1024.0;
    sample.values[11] = static_cast<double>(cur.mem_buffers_kb) * 1024.0;
    sample.values[12] = cur.swap_total_kb > 0
                            ? static_cast<double>(cur.swap_total_kb - cur.swap_free_kb) /
                                  static_cast<double>(cur.swap_total_kb)
                            : 0.0;

    sample.values[13] = rate(prev.net_rx_bytes, cur.net_rx_bytes, elapsed_s, &wrapped);
    sample.values[14] = rate(prev.net_tx_bytes, cur.net_tx_bytes, elapsed_s, &wrapped);
    sample.values[15] = rate(prev.net_rx_packets, cur.net_rx_packets, elapsed_s, &wrapped);
    sample.values[16] = rate(prev.net_tx_packets, cur.net_tx_packets, elapsed_s, &wrapped);
    sample.values[17] = rate(prev.net_rx_errs, cur.net_rx_errs, elapsed_s, &wrapped);
    sample.values[18] = rate(prev.net_tx_errs, cur.net_tx_errs, elapsed_s, &wrapped);

    sample.values[19] =
        rate(prev.disk_read_sectors, cur.disk_read_sectors, elapsed_s, &wrapped) * 512.0;
    sample.values[20] =
        rate(prev.disk_write_sectors, cur.disk_write_sectors, elapsed_s, &wrapped) * 512.0;
    sample.values[21] = rate(prev.disk_read_ops, cur.disk_read_ops, elapsed_s, &wrapped);
    sample.values[22] = rate(prev.disk_write_ops, cur.disk_write_ops, elapsed_s, &wrapped);
    sample.values[23] =
        rate(prev.disk_io_time_ms, cur.disk_io_time_ms, elapsed_s, &wrapped) / 1000.0;

    sample.values[24] = static_cast<double>(cur.procs_running);
    sample.values[25] = static_cast<double>(cur.procs_blocked);
    sample.values[26] = rate(prev.ctxt_switches, cur.ctxt_switches, elapsed_s, &wrapped);
    sample.values[27] = rate(prev.forks, cur.forks, elapsed_s, &wrapped);

    if (wrapped) log::warn("collector: counter wrap detected, affected rates clamped to 0");
    return sample;
}

std::string snapshot_to_csv_row(const CounterSnapshot& s) {
    char buf[1024];
    std::snprintf(
        buf, sizeof buf,
        "%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
        ",%" PRIu64 ",%.17g,%.17g,%.17g,%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
        ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64
        ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64 ",%" PRIu64,
        s.cpu_user, s.cpu_nice, s.cpu_system, s.cpu_idle, s.cpu_iowait, s.cpu_irq, s.cpu_softirq,
        s.cpu_steal, s.load1, s.load5, s.load15, s.mem_total_kb, s.mem_free_kb, s.mem_cached_kb,
        s.mem_buffers_kb, s.swap_total_kb, s.swap_free_kb, s.net_rx_bytes, s.net_tx_bytes,
        s.net_rx_packets, s.net_tx_packets, s.net_rx_errs, s.net_tx_errs, s.disk_read_ops,
        s.disk_write_ops, s.disk_read_sectors, s.disk_write_sectors, s.disk_io_time_ms,
        s.procs_running, s.procs_blocked);
    std::string row(buf);
    row += "," + std::to_string(s.ctxt_switches) + "," + std::to_string(s.forks);
    return row;
}

CounterSnapshot snapshot_from_csv_row(const std::string& row) {
    CounterSnapshot s;
    const int n = std::sscanf(
        row.c_str(),
        "%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64
        ",%" SCNu64 ",%lf,%lf,%lf,%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64
        ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64
        ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64 ",%" SCNu64
        ",%" SCNu64 ",%" SCNu64,
        &s.cpu_user, &s.cpu_nice, &s.cpu_system, &s.cpu_idle, &s.cpu_iowait, &s.cpu_irq,
        &s.cpu_softirq, &s.cpu_steal, &s.load1, &s.load5, &s.load15, &s.mem_total_kb,
        &s.mem_free_kb, &s.mem_cached_kb, &s.mem_buffers_kb, &s.swap_total_kb, &s.swap_free_kb,
        &s.net_rx_bytes, &s.net_tx_bytes, &s.net_rx_packets, &s.net_tx_packets, &s.net_rx_errs,
        &s.net_tx_errs, &s.disk_read_ops, &s.disk_write_ops, &s.disk_read_sectors,
        &s.disk_write_sectors, &s.disk_io_time_ms, &s.procs_running, &s.procs_blocked,
        &s.ctxt_switches, &s.forks);
    if (n != 32) throw CollectError("malformed snapshot trace row (parsed " + std::to_string(n) +
                                    " of 32 fields)");
    return s;
}

std::unique_ptr<SnapshotSource> open_snapshot_source(const std::string& spec) {
    if (spec == "os-counters" || spec == "os") return std::make_unique<OsSnapshotSource>();
    if (spec.rfind("synthetic-replay:", 0) == 0)
        return std::make_unique<ReplaySnapshotSource>(spec.substr(17));
    if (spec.rfind("replay:", 0) == 0)
        return std::make_unique<ReplaySnapshotSource>(spec.substr(7));
    throw CollectError("unknown collector source '" + spec +
                       "', expected os-counters or synthetic-replay:<path>");
}

std::string OverheadReport::csv_row() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.0f,%.6f,%" PRIu64 ",%" PRIu64 ",%.3f",
                  std::chrono::duration<double, std::milli>(interval).count(), cpu_self_fraction,
                  rss_bytes, samples_emitted, wall_seconds);
    return buf;
}

const char* OverheadReport::csv_header() { return "interval_ms,cpu_frac,rss_bytes,samples,wall_s"; }

uint64_t read_own_rss_bytes() {
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("VmRSS:", 0) == 0) {
            std::istringstream ls(line.substr(6));
            uint64_t kb = 0;
            ls >> kb;
            return kb * 1024;
        }
    }
    return 0;
}

Collector::Collector(CollectorConfig config) : config_(std::move(config)) {
    using namespace std::chrono_literals;
    if (config_.interval < 100ms || config_.interval > 10s)
        throw CollectError("collection interval must lie in [100ms, 10s]");
    validate_tags(config_.tags);
}

OverheadReport Collector::run(SampleSink& sink, std::chrono::nanoseconds max_duration) {
    auto source = open_snapshot_source(config_.source);

    const auto wall_start = std::chrono::steady_clock::now();
    const double cpu_start = thread_cpu_seconds();
    const auto deadline_end =
        max_duration.count() > 0 ? wall_start + max_duration : std::chrono::steady_clock::time_point::max();

    OverheadReport report;
    report.interval = config_.interval;

    CounterSnapshot prev = source->read();
    auto prev_time = std::chrono::steady_clock::now();
    auto next_tick = wall_start + config_.interval;

    while (!stop_.load(std::memory_order_relaxed)) {
        if (next_tick >= deadline_end) break;
        std::this_thread::sleep_until(next_tick);
        next_tick += config_.interval;

        const CounterSnapshot cur = source->read();
        const auto now = std::chrono::steady_clock::now();
        const double elapsed = std::chrono::duration<double>(now - prev_time).count();
        const uint64_t ts = static_cast<uint64_t>(
            std::chrono::duration_cast<std::chrono::nanoseconds>(
                std::chrono::system_clock::now().time_since_epoch())
                .count());
        try {
            sink.write(derive_sample(prev, cur, elapsed, ts, config_.tags));
        } catch (const std::exception& e) {
            log::error("collector: sink failure, stopping: %s", e.what());
            break;
        }
        ++report.samples_emitted;
        prev = cur;
        prev_time = now;
    }

    const auto wall_end = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(wall_end - wall_start).count();
    const double cpu_used = thread_cpu_seconds() - cpu_start;
    report.cpu_self_fraction = report.wall_seconds > 0 ? cpu_used / report.wall_seconds : 0.0;
    report.rss_bytes = read_own_rss_bytes();
    return report;
}

}  // namespace zerops
