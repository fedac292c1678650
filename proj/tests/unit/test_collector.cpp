#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zerops/bench.hpp"
#include "zerops/collector.hpp"
#include "zerops/errors.hpp"

using namespace zerops;
using namespace std::chrono_literals;

namespace {

CounterSnapshot base_snapshot() {
    CounterSnapshot s;
    s.cpu_user = 1000;
    s.cpu_system = 500;
    s.cpu_idle = 10'000;
    s.mem_total_kb = 1'000'000;
    s.mem_free_kb = 400'000;
    s.mem_cached_kb = 100'000;
    s.mem_buffers_kb = 50'000;
    s.net_rx_bytes = 0;
    s.load1 = 0.5;
    s.procs_running = 2;
    return s;
}

class CountingSink final : public SampleSink {
public:
    void write(const Sample& sample) override {
        ++count;
        last = sample;
    }
    void close() override {}
    size_t count = 0;
    Sample last;
};

}  // namespace

TEST_CASE("derive: identical snapshots yield all-zero rates and copied gauges") {
    const auto s = base_snapshot();
    const auto sample = derive_sample(s, s, 1.0, 42, {{"host", "x"}});
    CHECK(sample.values.size() == 28);
    CHECK(sample.values[0] == 0.0);   // cpu.utilization
    CHECK(sample.values[13] == 0.0);  // net.rx_bytes_per_s
    CHECK(sample.values[5] == 0.5);   // load.1 gauge
    CHECK(sample.values[24] == 2.0);  // proc.running gauge
    CHECK(sample.timestamp_ns == 42);
}

TEST_CASE("derive: network rate arithmetic") {
    auto prev = base_snapshot();
    auto cur = prev;
    prev.net_rx_bytes = 0;
    cur.net_rx_bytes = 1000;
    const auto sample = derive_sample(prev, cur, 0.5, 0, {});
    CHECK(sample.values[13] == doctest::Approx(2000.0));
}

TEST_CASE("derive: cpu utilization from jiffy deltas") {
    auto prev = base_snapshot();
    auto cur = prev;
    cur.cpu_user = prev.cpu_user + 50;   // busy delta 50
    cur.cpu_idle = prev.cpu_idle + 50;   // total delta 100
    const auto sample = derive_sample(prev, cur, 1.0, 0, {});
    CHECK(sample.values[0] == doctest::Approx(0.5));
    CHECK(sample.values[1] == doctest::Approx(0.5));  // all of it was user time
    CHECK(sample.values[2] == doctest::Approx(0.0));
}

TEST_CASE("derive: counter wrap clamps the rate to zero") {
    auto prev = base_snapshot();
    auto cur = prev;
    prev.net_rx_bytes = 1'000'000;
    cur.net_rx_bytes = 10;  // wrapped
    const auto sample = derive_sample(prev, cur, 1.0, 0, {});
    CHECK(sample.values[13] == 0.0);
}

TEST_CASE("derive: memory used fraction") {
    const auto s = base_snapshot();
    const auto sample = derive_sample(s, s, 1.0, 0, {});
    CHECK(sample.values[8] == doctest::Approx(1.0 - 550'000.0 / 1'000'000.0));
    CHECK(sample.values[9] == doctest::Approx(400'000.0 * 1024.0));
}

TEST_CASE("os snapshots: monotone counters and a stable memory total") {
    const auto a = read_metrics_snapshot();
    const auto b = read_metrics_snapshot();
    CHECK(b.cpu_user >= a.cpu_user);
    CHECK(b.cpu_idle >= a.cpu_idle);
    CHECK(b.ctxt_switches >= a.ctxt_switches);
    CHECK(a.mem_total_kb == b.mem_total_kb);
    CHECK(a.mem_total_kb > 0);
}

TEST_CASE("snapshot trace: csv rows round-trip and replay reproduces the sequence") {
    const auto dir = std::filesystem::temp_directory_path() / "zerops_collector_trace";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "trace.csv").string();

    std::vector<CounterSnapshot> trace;
    for (int i = 0; i < 5; ++i) {
        auto s = base_snapshot();
        s.cpu_user += static_cast<uint64_t>(100 * i);
        s.net_rx_bytes = static_cast<uint64_t>(5000 * i);
        s.load1 = 0.25 * i;
        trace.push_back(s);
    }
    {
        std::ofstream out(path);
        for (const auto& s : trace) out << snapshot_to_csv_row(s) << "\n";
    }
    for (const auto& s : trace) CHECK(snapshot_from_csv_row(snapshot_to_csv_row(s)) == s);

    auto source = open_snapshot_source("synthetic-replay:" + path);
    for (int cycle = 0; cycle < 2; ++cycle)
        for (const auto& expected : trace) CHECK(source->read() == expected);
}

TEST_CASE("collector config: interval bounds are enforced") {
    CHECK_THROWS_AS(Collector({50ms, {}, "os-counters"}), CollectError);
    CHECK_THROWS_AS(Collector({11s, {}, "os-counters"}), CollectError);
    CHECK_THROWS_AS((void)open_snapshot_source("bogus"), CollectError);
}

TEST_CASE("collector run: emission count tracks wall/interval within one") {
    Collector collector({100ms, {{"host", "unit"}}, "os-counters"});
    CountingSink sink;
    const auto report = collector.run(sink, 2050ms);
    CHECK(report.samples_emitted == sink.count);
    const double expected = report.wall_seconds / 0.1;
    CHECK(std::fabs(static_cast<double>(report.samples_emitted) - expected) <= 1.0 + 1e-6);
    CHECK(sink.last.values.size() == 28);
    CHECK(sink.last.tags == TagList{{"host", "unit"}});
    CHECK(report.cpu_self_fraction >= 0.0);
    CHECK(report.cpu_self_fraction < 0.5);
    CHECK(report.rss_bytes > 0);
}

TEST_CASE("collector run: sink failure stops the run with a partial report") {
    class FailingSink final : public SampleSink {
    public:
        void write(const Sample&) override {
            if (++count >= 3) throw TransportError("sink gone");
        }
        void close() override {}
        size_t count = 0;
    };
    Collector collector({100ms, {}, "os-counters"});
    FailingSink sink;
    const auto report = collector.run(sink, 5s);
    CHECK(report.samples_emitted == 2);  // third write failed
    CHECK(report.wall_seconds < 1.0);
}

TEST_CASE("freq sweep: csv schema parses back") {
    std::ostringstream csv;
    run_frequency_sweep({100ms}, 1s, "os-counters", csv);
    std::istringstream in(csv.str());
    std::string header, row;
    REQUIRE(std::getline(in, header));
    CHECK(header == "ms,cpu,mem");
    REQUIRE(std::getline(in, row));
    double ms = 0, cpu = -1, mem = -1;
    REQUIRE(std::sscanf(row.c_str(), "%lf,%lf,%lf", &ms, &cpu, &mem) == 3);
    CHECK(ms == 100.0);
    CHECK(cpu >= 0.0);
    CHECK(mem > 0.0);
}

TEST_CASE("overhead report: csv row shape") {
    OverheadReport report;
    report.interval = 500ms;
    report.cpu_self_fraction = 0.012345;
    report.rss_bytes = 1024;
    report.samples_emitted = 20;
    report.wall_seconds = 10.0;
    CHECK(std::string(OverheadReport::csv_header()) ==
          "interval_ms,cpu_frac,rss_bytes,samples,wall_s");
    CHECK(report.csv_row() == "500,0.012345,1024,20,10.000");
}
