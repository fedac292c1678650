// Drives the installed zerops binary end to end. The binary path arrives via
// the ZEROPS_BIN environment variable set by ctest.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "zerops/binary_codec.hpp"
#include "zerops/event_bus.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary() {
    const char* env = std::getenv("ZEROPS_BIN");
    REQUIRE_MESSAGE(env != nullptr, "ZEROPS_BIN must point at the zerops binary");
    return env;
}

int run(const std::string& args, const std::string& log_name = "") {
    std::string cmd = binary() + " " + args;
    if (!log_name.empty())
        cmd += " >" + log_name + ".out 2>" + log_name + ".err";
    else
        cmd += " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

struct Workdir {
    fs::path path;
    explicit Workdir(const std::string& name) {
        path = fs::temp_directory_path() / ("zerops_cli_" + name);
        fs::remove_all(path);
        fs::create_directories(path);
        fs::current_path(path);
    }
};

}  // namespace

TEST_CASE("cli: --help exits cleanly, unknown flags are usage errors") {
    CHECK(run("--help") == 0);
    CHECK(run("collect --help") == 0);
    CHECK(run("definitely-not-a-subcommand") == 1);
    CHECK(run("collect") == 1);  // --out is required
}

TEST_CASE("cli: collect to file round-trips through the binary codec") {
    Workdir wd("collect");
    CHECK(run("collect --interval 100ms --tags host=e1 --out file:s.zops "
              "--report overhead.csv --duration 1.2s") == 0);

    std::ifstream in("s.zops", std::ios::binary);
    zerops::BinaryReader reader(in);
    CHECK(reader.header().size() == 28);
    size_t n = 0;
    uint64_t last_ts = 0;
    while (auto s = reader.next()) {
        CHECK(s->timestamp_ns >= last_ts);
        last_ts = s->timestamp_ns;
        CHECK(s->tags == zerops::TagList{{"host", "e1"}});
        ++n;
    }
    CHECK(n >= 9);
    CHECK(n <= 13);

    std::ifstream report("overhead.csv");
    std::string header, row;
    std::getline(report, header);
    CHECK(header == "interval_ms,cpu_frac,rss_bytes,samples,wall_s");
    CHECK(std::getline(report, row));
}

TEST_CASE("cli: detect, rca, and engine chain over journals") {
    Workdir wd("chain");
    // A replayed dataset with one loud fault makes the chain observable.
    CHECK(run("collect --interval 100ms --tags host=e1 --out file:s.zops --duration 1s") == 0);
    CHECK(run("detect --algo arima --in file:s.zops --events journal/anomalies.ndjson") == 0);

    std::ofstream("deps.ndjson") << R"({"component":"e1"})" << "\n";
    CHECK(run("rca --deps deps.ndjson --journal journal") == 0);
    std::ofstream("catalogue.ndjson") << R"({"action":{"id":"restart","description":"r"}})"
                                      << "\n";
    CHECK(run("engine --catalogue catalogue.ndjson --bus-journal journal") == 0);
    CHECK(run("engine --catalogue nope.ndjson --bus-journal journal") == 2);
}

TEST_CASE("cli: models put/get/ls round trip") {
    Workdir wd("models");
    std::ofstream("payload.bin", std::ios::binary) << "model-bytes-123";
    CHECK(run("models put --repo repo --key detect/e1/birch --file payload.bin") == 0);
    CHECK(run("models get --repo repo --key detect/e1/birch --file back.bin") == 0);
    std::ifstream back("back.bin", std::ios::binary);
    std::stringstream buf;
    buf << back.rdbuf();
    CHECK(buf.str() == "model-bytes-123");
    CHECK(run("models ls --repo repo", "ls") == 0);
    std::ifstream ls_out("ls.out");
    std::string line;
    std::getline(ls_out, line);
    CHECK(line == "detect/e1/birch v1");
    CHECK(run("models get --repo repo --key detect/ghost/birch --file x.bin") == 2);
}

TEST_CASE("cli: orchestrate dry run emits a plan and flags infeasibility") {
    Workdir wd("orchestrate");
    fs::create_directories("objects");
    std::ofstream("objects/all.ndjson")
        << R"({"kind":"Node","name":"n1","region":"edge","capacity":{"cpu_millis":1000,"memory_bytes":1073741824}})"
        << "\n"
        << R"({"kind":"DataSource","name":"s1","url":"file:/tmp/x.zops","labels":{"tier":"edge"},"node":"n1"})"
        << "\n"
        << R"({"kind":"AnalysisStep","name":"st","ingest_selectors":[{"tier":"edge"}],"workload":"echo {source.name}","resource_request":{"cpu_millis":100,"memory_bytes":1048576}})"
        << "\n";
    CHECK(run("orchestrate --objects objects --dry-run --once --plan-out plan.ndjson") == 0);
    const auto plan = zerops::EventBus::read_journal("plan.ndjson");
    REQUIRE(plan.size() == 1);
    CHECK(plan[0]["op"] == "create");
    CHECK(plan[0]["command"] == "echo s1");

    std::ofstream("objects/big.ndjson")
        << R"({"kind":"AnalysisStep","name":"huge","ingest_selectors":[{"tier":"edge"}],"workload":"x","resource_request":{"cpu_millis":999999,"memory_bytes":1}})"
        << "\n";
    CHECK(run("orchestrate --objects objects --dry-run --once") == 3);
}

TEST_CASE("cli: orchestrate actually spawns and reaps workloads") {
    Workdir wd("spawn");
    fs::create_directories("objects");
    std::ofstream("objects/all.ndjson")
        << R"({"kind":"Node","name":"n1","region":"edge","capacity":{"cpu_millis":1000,"memory_bytes":1073741824}})"
        << "\n"
        << R"({"kind":"DataSource","name":"s1","url":"file:/tmp/x.zops","labels":{"tier":"edge"},"node":"n1"})"
        << "\n"
        << R"({"kind":"AnalysisStep","name":"st","ingest_selectors":[{"tier":"edge"}],"workload":"echo ran-{source.name} > touched.txt","resource_request":{"cpu_millis":100,"memory_bytes":1048576}})"
        << "\n";
    CHECK(run("orchestrate --objects objects --once") == 0);
    // The spawned shell wrote its marker before the runner reaped it.
    std::ifstream touched("touched.txt");
    std::string content;
    std::getline(touched, content);
    CHECK(content == "ran-s1");
}

TEST_CASE("cli: bench budget sweep and plotdata produce the figure CSVs") {
    Workdir wd("bench");
    CHECK(run("bench budget-sweep --out out --samples 300 --budgets 1.0,0.5") == 0);
    std::ifstream csv("out/budget.csv");
    std::string comment, header;
    std::getline(csv, comment);
    std::getline(csv, header);
    CHECK(header == "cpu,BIRCH,LSTM,ARIMA");
    CHECK(run("bench plotdata --out out") == 0);
    CHECK(fs::exists("out/fig3.csv"));
}

TEST_CASE("cli: pipeline replay reports its stage counts as json") {
    Workdir wd("pipeline");
    CHECK(run("collect --interval 100ms --tags host=e1 --out file:s.zops --duration 1s") == 0);
    std::ofstream("deps.ndjson") << R"({"component":"e1"})" << "\n";
    std::ofstream("catalogue.ndjson") << R"({"action":{"id":"restart","description":"r"}})"
                                      << "\n";
    CHECK(run("pipeline --replay file:s.zops --deps deps.ndjson --catalogue catalogue.ndjson "
              "--journal journal",
              "pipe") == 0);
    std::ifstream out("pipe.out");
    std::string line;
    std::getline(out, line);
    const auto summary = nlohmann::json::parse(line);
    CHECK(summary["samples"].get<int>() >= 9);
    CHECK(summary["actions"] == 0);
}
