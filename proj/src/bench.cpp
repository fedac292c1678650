#include "zerops/bench.hpp"

#include <time.h>

#include <algorithm>
#include <cerrno>
#include <cinttypes>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "zerops/channel.hpp"
#include "zerops/csv_codec.hpp"
#include "zerops/errors.hpp"
#include "zerops/log.hpp"

namespace zerops {

namespace {

double thread_cpu_seconds() {
    timespec ts{};
    clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
    return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

void sleep_ns(int64_t ns) {
    if (ns <= 0) return;
    timespec req{static_cast<time_t>(ns / 1'000'000'000), static_cast<long>(ns % 1'000'000'000)};
    while (nanosleep(&req, &req) != 0 && errno == EINTR) {
    }
}

}  // namespace

std::pair<MetricHeader, std::vector<Sample>> generate_dataset(const SyntheticSpec& spec) {
    MetricHeader header;
    if (spec.metric_count == kCollectorMetricCount) {
        header = collector_header();
    } else {
        for (size_t i = 0; i < spec.metric_count; ++i)
            header.names.push_back("m" + std::to_string(i));
    }

    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> phi_dist(0.5, 0.95);
    std::uniform_real_distribution<double> sigma_dist(0.5, 2.0);
    std::uniform_real_distribution<double> level_dist(-10.0, 10.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    std::vector<double> phi(spec.metric_count), sigma(spec.metric_count),
        level(spec.metric_count), stationary_sigma(spec.metric_count), state(spec.metric_count);
    for (size_t m = 0; m < spec.metric_count; ++m) {
        phi[m] = phi_dist(rng);
        sigma[m] = sigma_dist(rng);
        level[m] = level_dist(rng);
        stationary_sigma[m] = sigma[m] / std::sqrt(1.0 - phi[m] * phi[m]);
        state[m] = level[m];
    }

    std::vector<Sample> samples;
    samples.reserve(spec.count);
    for (size_t t = 0; t < spec.count; ++t) {
        Sample s;
        s.timestamp_ns = spec.start_ns + static_cast<uint64_t>(t) * spec.interval_ns;
        s.tags = spec.tags;
        s.values.resize(spec.metric_count);
        for (size_t m = 0; m < spec.metric_count; ++m) {
            state[m] = level[m] + phi[m] * (state[m] - level[m]) + sigma[m] * noise(rng);
            s.values[m] = state[m];
        }
        for (const auto& anomaly : spec.anomalies) {
            if (t >= anomaly.onset && t < anomaly.onset + anomaly.duration) {
                for (size_t m : anomaly.metrics)
                    if (m < spec.metric_count)
                        s.values[m] += anomaly.shift_sigma * stationary_sigma[m];
            }
        }
        samples.push_back(std::move(s));
    }
    return {std::move(header), std::move(samples)};
}

LatencyRow throttled_run(const std::function<void(const Sample&)>& workload, CpuBudget budget,
                         const std::vector<Sample>& dataset, const std::string& algorithm) {
    if (budget.fraction <= 0.0 || budget.fraction > 1.0)
        throw ConfigError("cpu budget must lie in (0, 1]");

    LatencyRow row;
    row.algorithm = algorithm;
    row.budget = budget.fraction;

    // Dedicated thread per benchmark point; the coordinator stays idle.
    std::thread runner([&] {
        using clock = std::chrono::steady_clock;
        const double slowdown = (1.0 - budget.fraction) / budget.fraction;
        double sum = 0.0, sum2 = 0.0;
        uint64_t measured = 0;
        double busy_total = 0.0;
        const auto run_start = clock::now();
        for (size_t i = 0; i < dataset.size(); ++i) {
            const auto t0 = clock::now();
            workload(dataset[i]);
            const auto t1 = clock::now();
            const double busy = std::chrono::duration<double>(t1 - t0).count();
            busy_total += busy;
            if (slowdown > 0.0)
                sleep_ns(static_cast<int64_t>(busy * slowdown * 1e9));
            const auto t2 = clock::now();
            if (i >= kLatencyWarmupSamples) {
                const double ms = std::chrono::duration<double, std::milli>(t2 - t0).count();
                sum += ms;
                sum2 += ms * ms;
                ++measured;
            }
        }
        const double wall = std::chrono::duration<double>(clock::now() - run_start).count();
        row.samples = measured;
        if (measured > 0) {
            row.mean_ms = sum / static_cast<double>(measured);
            const double var = sum2 / static_cast<double>(measured) - row.mean_ms * row.mean_ms;
            row.stddev_ms = var > 0 ? std::sqrt(var) : 0.0;
        }
        row.busy_fraction = wall > 0 ? busy_total / wall : 0.0;
    });
    runner.join();
    return row;
}

std::function<void(const Sample&)> detector_workload(DetectorKind kind,
                                                     std::shared_ptr<Detector>& out) {
    DetectorConfig config;
    config.kind = kind;
    config.dim = kCollectorMetricCount;
    config.component = "bench";
    out = std::make_shared<Detector>(config);
    auto detector = out;
    return [detector](const Sample& s) { detector->process(s); };
}

void run_frequency_sweep(const std::vector<std::chrono::nanoseconds>& intervals,
                         std::chrono::nanoseconds duration_per_point, const std::string& source,
                         std::ostream& csv) {
    // Null sink: measuring the collection path, not transport.
    class NullSink final : public SampleSink {
    public:
        void write(const Sample&) override {}
        void close() override {}
    };

    const double mem_total_bytes =
        static_cast<double>(read_metrics_snapshot().mem_total_kb) * 1024.0;

    // Brief warm run so allocator arenas settle before the measured points.
    {
        NullSink sink;
        Collector warm({std::chrono::milliseconds(500), {}, source});
        warm.run(sink, std::chrono::seconds(2));
    }

    csv << "ms,cpu,mem\n";
    for (const auto interval : intervals) {
        NullSink sink;
        Collector collector({interval, {}, source});
        const OverheadReport report = collector.run(sink, duration_per_point);
        char buf[128];
        std::snprintf(buf, sizeof buf, "%.0f,%.4f,%.4f\n",
                      std::chrono::duration<double, std::milli>(interval).count(),
                      100.0 * report.cpu_self_fraction,
                      mem_total_bytes > 0
                          ? 100.0 * static_cast<double>(report.rss_bytes) / mem_total_bytes
                          : 0.0);
        csv << buf;
        log::info("freq-sweep: %s", buf);
    }
}

namespace {

const char* column_name(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::birch: return "BIRCH";
        case DetectorKind::rnn: return "LSTM";
        case DetectorKind::arima: return "ARIMA";
    }
    return "?";
}

}  // namespace

void run_budget_sweep(const std::vector<DetectorKind>& algorithms,
                      const std::vector<double>& budgets, const std::vector<Sample>& dataset,
                      std::ostream& csv) {
    csv << "# mean per-sample processing time in ms, throttle sleep included,"
           " stream decode excluded\n";
    csv << "cpu";
    for (const auto kind : algorithms) csv << ',' << column_name(kind);
    csv << '\n';
    for (const double budget : budgets) {
        csv << format_double(budget);
        for (const auto kind : algorithms) {
            std::shared_ptr<Detector> detector;
            auto workload = detector_workload(kind, detector);
            const LatencyRow row =
                throttled_run(workload, CpuBudget{budget}, dataset, column_name(kind));
            char buf[64];
            std::snprintf(buf, sizeof buf, ",%.6f", row.mean_ms);
            csv << buf;
            log::info("budget-sweep: %s at %.1f -> %.4f ms/sample (stddev %.4f)",
                      row.algorithm.c_str(), budget, row.mean_ms, row.stddev_ms);
        }
        csv << '\n';
    }
}

std::string JitResult::csv_row(std::chrono::nanoseconds interval, const std::string& algo) const {
    char buf[192];
    std::snprintf(buf, sizeof buf, "%.0f,%s,%.4f,%.4f,%.4f,%zu,%d",
                  std::chrono::duration<double, std::milli>(interval).count(), algo.c_str(),
                  collector_cpu, detector_cpu, combined_cpu, max_queue_depth, pass ? 1 : 0);
    return buf;
}

const char* JitResult::csv_header() {
    return "ms,algo,collector_cpu,detector_cpu,combined_cpu,max_queue_depth,pass";
}

JitResult run_jit_check(std::chrono::nanoseconds interval, DetectorKind kind,
                        std::chrono::nanoseconds duration, const std::string& source,
                        std::optional<std::chrono::nanoseconds> busy_loop) {
    JitResult result;
    BoundedChannel<Sample> channel(kDefaultQueueCapacity);

    class ChannelSink final : public SampleSink {
    public:
        explicit ChannelSink(BoundedChannel<Sample>& channel) : channel_(channel) {}
        void write(const Sample& sample) override { channel_.push(sample); }
        void close() override { channel_.close(); }

    private:
        BoundedChannel<Sample>& channel_;
    };

    Collector collector({interval, {{"host", "jit"}}, source});
    std::atomic<bool> abort{false};

    double collector_cpu_time = 0.0;
    std::thread collector_thread([&] {
        const double cpu0 = thread_cpu_seconds();
        ChannelSink sink(channel);
        OverheadReport report = collector.run(sink, duration);
        collector_cpu_time = thread_cpu_seconds() - cpu0;
        result.samples = report.samples_emitted;
        channel.close();
    });

    double detector_cpu_time = 0.0;
    std::thread detector_thread([&] {
        const double cpu0 = thread_cpu_seconds();
        DetectorConfig config;
        config.kind = kind;
        config.dim = kCollectorMetricCount;
        config.component = "jit";
        Detector detector(config);
        while (auto sample = channel.pop()) {
            if (busy_loop) {
                // Constructed-infeasibility mode: burn CPU instead of detecting.
                const auto until = std::chrono::steady_clock::now() + *busy_loop;
                volatile double sink_value = 0.0;
                while (std::chrono::steady_clock::now() < until)
                    sink_value = sink_value + 1.0;
            } else {
                detector.process(*sample);
            }
            if (abort.load(std::memory_order_relaxed)) break;
        }
        detector_cpu_time = thread_cpu_seconds() - cpu0;
    });

    // Backlog monitor; diverging queues end the run early.
    const auto start = std::chrono::steady_clock::now();
    while (true) {
        std::this_thread::sleep_for(std::chrono::milliseconds(250));
        const double elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start).count();
        const size_t depth = channel.depth();
        result.backlog.emplace_back(elapsed, depth);
        if (depth >= 8) {
            abort.store(true);
            collector.stop();
            break;
        }
        if (std::chrono::steady_clock::now() - start >= duration) break;
    }

    collector_thread.join();
    channel.close();
    detector_thread.join();

    const double wall = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - start).count();
    result.max_queue_depth = channel.max_depth();
    result.collector_cpu = wall > 0 ? collector_cpu_time / wall : 0.0;
    result.detector_cpu = wall > 0 ? detector_cpu_time / wall : 0.0;
    result.combined_cpu = result.collector_cpu + result.detector_cpu;
    result.pass = result.max_queue_depth <= 1 && !abort.load();
    return result;
}

void write_plotdata(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base(dir);

    // Fig 2: memory/cpu overhead vs collection frequency (already ms,cpu,mem).
    if (fs::exists(base / "freq.csv")) {
        std::ifstream in(base / "freq.csv");
        std::ofstream out(base / "fig2.csv");
        out << in.rdbuf();
    }
    // Fig 3: ms/sample vs cpu budget (already cpu,<algos>).
    if (fs::exists(base / "budget.csv")) {
        std::ifstream in(base / "budget.csv");
        std::ofstream out(base / "fig3.csv");
        std::string line;
        while (std::getline(in, line))
            if (!line.empty() && line[0] != '#') out << line << '\n';
    }
    // Fig 4: combined CPU percent vs frequency, one column per algorithm.
    if (fs::exists(base / "jit.csv")) {
        std::ifstream in(base / "jit.csv");
        std::string line;
        std::getline(in, line);  // header
        std::map<double, std::map<std::string, double>> rows;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string ms, algo, col_cpu, det_cpu, combined;
            std::getline(ls, ms, ',');
            std::getline(ls, algo, ',');
            std::getline(ls, col_cpu, ',');
            std::getline(ls, det_cpu, ',');
            std::getline(ls, combined, ',');
            rows[std::stod(ms)][algo] = std::stod(combined) * 100.0;
        }
        std::ofstream out(base / "fig4.csv");
        out << "ms,BIRCH,LSTM,ARIMA\n";
        for (const auto& [ms, cols] : rows) {
            auto value = [&](const char* name) {
                auto it = cols.find(name);
                return it == cols.end() ? std::string("") : format_double(it->second);
            };
            out << format_double(ms) << ',' << value("BIRCH") << ',' << value("LSTM") << ','
                << value("ARIMA") << '\n';
        }
    }
}

}  // namespace zerops
