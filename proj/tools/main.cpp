// zerops: single entry point for the edge self-healing toolkit. Subcommands
// cover collection, detection, root cause analysis, action recommendation,
// orchestration, the model repository, benchmarks, and a one-process pipeline.
//
// Exit codes: 0 ok, 1 usage, 2 runtime error, 3 unschedulable / infeasible.

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "zerops/bench.hpp"
#include "zerops/channel.hpp"
#include "zerops/collector.hpp"
#include "zerops/csv_codec.hpp"
#include "zerops/decision_engine.hpp"
#include "zerops/detector.hpp"
#include "zerops/errors.hpp"
#include "zerops/event_bus.hpp"
#include "zerops/log.hpp"
#include "zerops/model_repo.hpp"
#include "zerops/orchestrator.hpp"
#include "zerops/pipeline.hpp"
#include "zerops/rca.hpp"

namespace fs = std::filesystem;
using namespace zerops;
using namespace std::chrono_literals;

namespace {

std::chrono::nanoseconds parse_duration(const std::string& text) {
    size_t pos = 0;
    const double value = std::stod(text, &pos);
    const std::string unit = text.substr(pos);
    if (unit == "ns") return std::chrono::nanoseconds(static_cast<int64_t>(value));
    if (unit == "us") return std::chrono::nanoseconds(static_cast<int64_t>(value * 1e3));
    if (unit == "ms") return std::chrono::nanoseconds(static_cast<int64_t>(value * 1e6));
    if (unit == "s" || unit.empty()) return std::chrono::nanoseconds(static_cast<int64_t>(value * 1e9));
    if (unit == "m") return std::chrono::nanoseconds(static_cast<int64_t>(value * 60e9));
    if (unit == "h") return std::chrono::nanoseconds(static_cast<int64_t>(value * 3600e9));
    throw ConfigError("cannot parse duration '" + text + "' (use ns/us/ms/s/m/h)");
}

TagList parse_tag_list(const std::string& text) {
    TagList tags;
    if (text.empty()) return tags;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const size_t eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("tag '" + item + "' is not k=v");
        tags.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    validate_tags(tags);
    return tags;
}

// NDJSON sink for anomaly events; the file doubles as a bus journal fragment.
class EventFileSink {
public:
    explicit EventFileSink(const std::string& path) {
        const auto parent = fs::path(path).parent_path();
        if (!parent.empty()) fs::create_directories(parent);
        out_.open(path, std::ios::app);
        if (!out_) throw TransportError("cannot open events file: " + path);
    }
    void write(const AnomalyEvent& event) { out_ << event.to_json().dump() << '\n' << std::flush; }

private:
    std::ofstream out_;
};

int cmd_collect(const std::string& interval, const std::string& tags, const std::string& out,
                const std::string& report_path, const std::string& source,
                const std::string& duration) {
    CollectorConfig config;
    config.interval = parse_duration(interval);
    config.tags = parse_tag_list(tags);
    config.source = source;
    Collector collector(config);
    auto sink = open_sink(StreamEndpoint::parse(out), collector_header());
    const auto report = collector.run(
        *sink, duration.empty() ? std::chrono::nanoseconds(0) : parse_duration(duration));
    sink->close();
    if (!report_path.empty()) {
        const bool fresh = !fs::exists(report_path);
        std::ofstream rep(report_path, std::ios::app);
        if (fresh) rep << OverheadReport::csv_header() << '\n';
        rep << report.csv_row() << '\n';
    }
    log::info("collected %llu samples, cpu %.4f, rss %llu bytes",
              static_cast<unsigned long long>(report.samples_emitted), report.cpu_self_fraction,
              static_cast<unsigned long long>(report.rss_bytes));
    return 0;
}

int cmd_detect(const std::string& algo, const std::string& in, const std::string& events,
               const std::string& params, const std::string& repo_dir,
               const std::string& warm_start, const std::string& checkpoint,
               const std::string& step_name) {
    DetectorConfig base;
    base.kind = detector_kind_from_string(algo);
    if (!params.empty()) base.apply_params(params);

    auto source = open_source(StreamEndpoint::parse(in));
    base.dim = source->header().size();
    EventFileSink event_sink(events);

    std::optional<ModelRepo> repo;
    if (!repo_dir.empty()) repo.emplace(repo_dir);
    std::optional<ModelKey> warm_key;
    if (!warm_start.empty()) {
        if (!repo) throw ConfigError("--warm-start requires --repo");
        warm_key = ModelKey::parse(warm_start);
    }

    std::map<std::string, Detector> detectors;
    std::vector<std::unique_ptr<CheckpointLoop>> checkpoints;
    uint64_t emitted = 0, processed = 0;
    while (auto sample = source->next()) {
        const std::string component = component_id(*sample);
        auto it = detectors.find(component);
        if (it == detectors.end()) {
            DetectorConfig config = base;
            config.component = component;
            std::optional<Detector> restored;
            if (warm_key && warm_key->component == component) {
                if (auto blob = repo->get_latest(*warm_key))
                    restored = Detector::restore_as(config.kind, *blob);
            }
            it = detectors.emplace(component, restored ? std::move(*restored) : Detector(config))
                     .first;
            if (repo && !checkpoint.empty()) {
                Detector* live = &it->second;
                checkpoints.push_back(std::make_unique<CheckpointLoop>(
                    *repo, ModelKey{step_name, component, algo},
                    std::chrono::duration_cast<std::chrono::milliseconds>(
                        parse_duration(checkpoint)),
                    [live] { return live->snapshot(); }));
            }
        }
        if (auto event = it->second.process(*sample)) {
            event_sink.write(*event);
            ++emitted;
        }
        ++processed;
    }
    checkpoints.clear();  // stop loops before the final snapshot
    if (repo) {
        for (const auto& [component, detector] : detectors)
            repo->put({step_name, component, algo}, detector.snapshot());
    }
    log::info("processed %llu samples, emitted %llu anomaly events",
              static_cast<unsigned long long>(processed),
              static_cast<unsigned long long>(emitted));
    return 0;
}

int cmd_rca(const std::string& deps_path, const std::string& journal_dir,
            const std::string& events_in, const std::string& gap, const std::string& lateness) {
    const auto deps = DependencyModel::load_file(deps_path);
    RcaParams params;
    if (!gap.empty()) params.gap_timeout_ns = static_cast<uint64_t>(parse_duration(gap).count());
    if (!lateness.empty())
        params.lateness_ns = static_cast<uint64_t>(parse_duration(lateness).count());

    EventBus bus{fs::path(journal_dir)};
    const fs::path events_path =
        events_in.empty() ? fs::path(journal_dir) / "anomalies.ndjson" : fs::path(events_in);
    IncidentTracker tracker(params);
    auto emit = [&](const std::vector<Incident>& closed) {
        for (const auto& incident : closed) {
            bus.publish(kTopicIncidents, incident.to_json());
            bus.publish(kTopicVerdicts, make_verdict(incident, deps).to_json());
        }
    };
    for (const auto& line : EventBus::read_journal(events_path))
        emit(tracker.ingest(AnomalyEvent::from_json(line)));
    emit(tracker.flush());
    log::info("closed %llu incidents (%llu late events dropped)",
              static_cast<unsigned long long>(bus.published(kTopicIncidents)),
              static_cast<unsigned long long>(tracker.dropped_late()));
    return 0;
}

int cmd_engine(const std::string& catalogue_path, const std::string& journal_dir, double floor) {
    const auto catalogue = ActionCatalogue::load_file(catalogue_path);
    EventBus bus{fs::path(journal_dir)};
    const auto incidents_path = fs::path(journal_dir) / "incidents.ndjson";
    const auto verdicts_path = fs::path(journal_dir) / "verdicts.ndjson";
    std::map<uint64_t, RootCauseVerdict> verdicts;
    if (fs::exists(verdicts_path))
        for (const auto& line : EventBus::read_journal(verdicts_path)) {
            auto v = RootCauseVerdict::from_json(line);
            verdicts.emplace(v.incident_id, std::move(v));
        }
    uint64_t recommended = 0;
    if (fs::exists(incidents_path)) {
        for (const auto& line : EventBus::read_journal(incidents_path)) {
            const Incident incident = Incident::from_json(line);
            auto it = verdicts.find(incident.id);
            if (it == verdicts.end()) continue;
            const auto feature = featurize(incident, it->second);
            if (auto match = grid_match(catalogue, feature, floor)) {
                RecommendedAction action{incident.id, feature.component, match->action,
                                         match->score};
                bus.publish(kTopicActions, action.to_json());
                ++recommended;
            }
        }
    }
    log::info("recommended %llu actions", static_cast<unsigned long long>(recommended));
    return 0;
}

// Spawned workload bookkeeping for the orchestrate loop.
class ProcessRunner {
public:
    void apply(const PlacementPlan& plan, bool dry_run, std::ostream& out) {
        dump_plan(plan, out);
        out.flush();
        if (dry_run) return;
        for (const auto& a : plan.deletes) {
            const std::string key = a.step + "/" + a.source;
            auto it = pids_.find(key);
            if (it != pids_.end()) {
                ::kill(it->second, SIGTERM);
                ::waitpid(it->second, nullptr, 0);
                pids_.erase(it);
            }
        }
        for (const auto& a : plan.creates) {
            const pid_t pid = ::fork();
            if (pid == 0) {
                ::execl("/bin/sh", "sh", "-c", a.command.c_str(), static_cast<char*>(nullptr));
                _exit(127);
            }
            if (pid > 0) pids_[a.step + "/" + a.source] = pid;
        }
    }

    ~ProcessRunner() {
        for (const auto& [_, pid] : pids_) {
            ::kill(pid, SIGTERM);
            ::waitpid(pid, nullptr, 0);
        }
    }

private:
    std::map<std::string, pid_t> pids_;
};

int cmd_orchestrate(const std::string& objects_dir, bool dry_run, const std::string& tick,
                    bool once, uint64_t max_ticks, const std::string& plan_out) {
    auto load_registry = [&] {
        Registry registry;
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(objects_dir))
            if (entry.path().extension() == ".ndjson") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            std::ifstream in(file);
            load_objects(in, registry);
        }
        return registry;
    };

    std::ofstream plan_file;
    if (!plan_out.empty()) plan_file.open(plan_out, std::ios::app);
    std::ostream& out = plan_out.empty() ? std::cout : plan_file;

    ProcessRunner runner;
    std::vector<Assignment> running;
    bool had_unschedulable = false;
    const auto tick_duration = parse_duration(tick);
    for (uint64_t i = 0; once ? i < 1 : (max_ticks == 0 || i < max_ticks); ++i) {
        if (i > 0) std::this_thread::sleep_for(tick_duration);
        const Registry registry = load_registry();
        const PlacementPlan plan = reconcile(registry, running);
        runner.apply(plan, dry_run, out);
        running = plan.assignments;
        had_unschedulable = !plan.unschedulable.empty();
        for (const auto& [step, reason] : plan.unschedulable)
            log::warn("step '%s' unschedulable: %s", step.c_str(), reason.c_str());
    }
    return had_unschedulable ? 3 : 0;
}

int cmd_models(const std::string& verb, const std::string& repo_dir, const std::string& key_text,
               const std::string& file, uint32_t version) {
    ModelRepo repo(repo_dir);
    if (verb == "ls") {
        for (const auto& [key, latest] : repo.list())
            std::cout << key.to_string() << " v" << latest << '\n';
        return 0;
    }
    const ModelKey key = ModelKey::parse(key_text);
    if (verb == "get") {
        ModelBlob blob;
        if (version == 0) {
            auto latest = repo.get_latest(key);
            if (!latest) throw RepoError("key '" + key_text + "' not found");
            blob = std::move(*latest);
        } else {
            blob = repo.get(key, version);
        }
        if (file.empty()) {
            std::cout.write(reinterpret_cast<const char*>(blob.payload.data()),
                            static_cast<std::streamsize>(blob.payload.size()));
        } else {
            std::ofstream out(file, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(blob.payload.data()),
                      static_cast<std::streamsize>(blob.payload.size()));
        }
        return 0;
    }
    if (verb == "put") {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw RepoError("cannot read payload file: " + file);
        ModelBlob blob;
        blob.detector_type = detector_kind_from_string(key.detector);
        blob.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        const uint32_t v = repo.put(key, blob);
        std::cout << "stored " << key.to_string() << " v" << v << '\n';
        return 0;
    }
    throw ConfigError("models verb must be ls, get, or put");
}

std::vector<std::chrono::nanoseconds> parse_interval_list(const std::string& text) {
    std::vector<std::chrono::nanoseconds> intervals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) intervals.push_back(parse_duration(item));
    return intervals;
}

int cmd_bench(const std::string& mode, const std::string& out_dir, uint64_t seed,
              const std::string& intervals, const std::string& duration_per_point,
              const std::string& budgets_text, size_t samples, const std::string& jit_interval,
              const std::string& jit_algo, const std::string& jit_duration,
              const std::string& source) {
    fs::create_directories(out_dir);
    if (mode == "freq-sweep") {
        std::ofstream csv(fs::path(out_dir) / "freq.csv");
        run_frequency_sweep(parse_interval_list(intervals), parse_duration(duration_per_point),
                            source, csv);
        return 0;
    }
    if (mode == "budget-sweep") {
        std::vector<double> budgets;
        std::stringstream ss(budgets_text);
        std::string item;
        while (std::getline(ss, item, ',')) budgets.push_back(std::stod(item));
        SyntheticSpec spec;
        spec.count = samples;
        spec.seed = seed;
        spec.tags = {{"host", "bench"}};
        const auto dataset = generate_dataset(spec).second;
        std::ofstream csv(fs::path(out_dir) / "budget.csv");
        run_budget_sweep({DetectorKind::birch, DetectorKind::rnn, DetectorKind::arima}, budgets,
                         dataset, csv);
        return 0;
    }
    if (mode == "jit") {
        const auto interval = parse_duration(jit_interval);
        const auto result = run_jit_check(interval, detector_kind_from_string(jit_algo),
                                          parse_duration(jit_duration), source);
        const fs::path csv_path = fs::path(out_dir) / "jit.csv";
        const bool fresh = !fs::exists(csv_path);
        std::ofstream csv(csv_path, std::ios::app);
        if (fresh) csv << JitResult::csv_header() << '\n';
        std::string algo_col = jit_algo == "rnn" ? "lstm" : jit_algo;
        for (auto& c : algo_col) c = static_cast<char>(std::toupper(c));
        csv << result.csv_row(interval, algo_col) << '\n';
        if (!result.pass) {
            log::error("jit check failed: max queue depth %zu", result.max_queue_depth);
            for (const auto& [t, depth] : result.backlog)
                std::cerr << "backlog " << t << "s depth " << depth << '\n';
            return 3;
        }
        log::info("jit pass: combined cpu %.3f of one core", result.combined_cpu);
        return 0;
    }
    if (mode == "plotdata") {
        write_plotdata(out_dir);
        return 0;
    }
    throw ConfigError("bench mode must be freq-sweep, budget-sweep, jit, or plotdata");
}

int cmd_pipeline(const std::string& replay, const std::string& interval, const std::string& tags,
                 const std::string& algo, const std::string& params, const std::string& deps,
                 const std::string& catalogue, const std::string& journal,
                 const std::string& repo_dir, const std::string& duration) {
    PipelineConfig config;
    if (!replay.empty()) {
        config.replay = StreamEndpoint::parse(replay);
    } else {
        CollectorConfig collector;
        collector.interval = parse_duration(interval);
        collector.tags = parse_tag_list(tags);
        config.collector = collector;
        if (!duration.empty()) config.live_duration = parse_duration(duration);
    }
    config.detector.kind = detector_kind_from_string(algo);
    if (!params.empty()) config.detector.apply_params(params);
    config.deps_path = deps;
    config.catalogue_path = catalogue;
    config.journal_dir = journal;
    if (!repo_dir.empty()) config.repo_dir = repo_dir;

    const auto result = run_pipeline(config);
    std::cout << nlohmann::json{{"samples", result.samples},
                                {"anomalies", result.anomalies},
                                {"incidents", result.incidents},
                                {"verdicts", result.verdicts},
                                {"actions", result.actions},
                                {"warm_started", result.warm_started_components}}
                     .dump()
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zerops: in-place edge monitoring, anomaly detection, and self-healing toolkit"};
    app.require_subcommand(1);

    // collect
    std::string c_interval = "500ms", c_tags, c_out, c_report, c_source = "os-counters",
                c_duration;
    auto* collect = app.add_subcommand("collect", "sample OS counters into a stream endpoint");
    collect->add_option("--interval", c_interval, "collection interval (100ms..10s)");
    collect->add_option("--tags", c_tags, "static tags k=v,k=v");
    collect->add_option("--out", c_out, "sink endpoint (file:..., tcp-connect:..., stdio)")
        ->required();
    collect->add_option("--report", c_report, "append an overhead report CSV row here");
    collect->add_option("--source", c_source, "os-counters or synthetic-replay:<path>");
    collect->add_option("--duration", c_duration, "stop after this long (default: run forever)");

    // detect
    std::string d_algo, d_in, d_events, d_params, d_repo, d_warm, d_checkpoint,
        d_step = "detect";
    auto* detect = app.add_subcommand("detect", "run an IFTM detector over a sample stream");
    detect->add_option("--algo", d_algo, "birch|arima|rnn")->required();
    detect->add_option("--in", d_in, "source endpoint")->required();
    detect->add_option("--events", d_events, "anomaly event NDJSON output path")->required();
    detect->add_option("--params", d_params, "detector parameter overrides k=v,...");
    detect->add_option("--repo", d_repo, "model repository directory");
    detect->add_option("--warm-start", d_warm, "model key step/component/detector to restore");
    detect->add_option("--checkpoint", d_checkpoint, "periodic snapshot interval (e.g. 30s)");
    detect->add_option("--step-name", d_step, "repository key step name");

    // rca
    std::string r_deps, r_journal, r_events_in, r_gap, r_lateness;
    auto* rca = app.add_subcommand("rca", "sessionize anomaly events and rank root causes");
    rca->add_option("--deps", r_deps, "dependency model NDJSON file")->required();
    rca->add_option("--journal", r_journal, "bus journal directory")->required();
    rca->add_option("--events-in", r_events_in,
                    "events NDJSON (default journal/anomalies.ndjson)");
    rca->add_option("--gap", r_gap, "incident gap timeout (default 30s)");
    rca->add_option("--lateness", r_lateness, "event lateness bound (default 5s)");

    // engine
    std::string e_catalogue, e_journal;
    double e_floor = kDefaultMatchFloor;
    auto* engine = app.add_subcommand("engine", "recommend remediation actions for incidents");
    engine->add_option("--catalogue", e_catalogue, "action catalogue NDJSON")->required();
    engine->add_option("--bus-journal", e_journal, "bus journal directory")->required();
    engine->add_option("--floor", e_floor, "no-match score floor");

    // orchestrate
    std::string o_objects, o_tick = "2s", o_plan_out;
    bool o_dry = false, o_once = false;
    uint64_t o_max_ticks = 0;
    auto* orchestrate = app.add_subcommand("orchestrate", "reconcile declared objects");
    orchestrate->add_option("--objects", o_objects, "directory of *.ndjson object files")
        ->required();
    orchestrate->add_flag("--dry-run", o_dry, "record rendered commands without spawning");
    orchestrate->add_option("--tick", o_tick, "reconcile interval");
    orchestrate->add_flag("--once", o_once, "single reconcile, then exit");
    orchestrate->add_option("--max-ticks", o_max_ticks, "stop after N reconciles (0 = forever)");
    orchestrate->add_option("--plan-out", o_plan_out, "append plan diffs to this NDJSON file");

    // models
    std::string m_verb, m_repo, m_key, m_file;
    uint32_t m_version = 0;
    auto* models = app.add_subcommand("models", "inspect the model repository");
    models->add_option("verb", m_verb, "ls|get|put")->required();
    models->add_option("--repo", m_repo, "repository directory")->required();
    models->add_option("--key", m_key, "model key step/component/detector");
    models->add_option("--file", m_file, "payload file for get/put");
    models->add_option("--version", m_version, "specific version for get (default latest)");

    // bench
    std::string b_mode, b_out = "bench-out",
                b_intervals = "100ms,200ms,300ms,400ms,500ms,600ms,700ms,800ms,900ms,1s",
                b_point = "60s", b_budgets = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1",
                b_jit_interval = "500ms", b_jit_algo = "birch", b_jit_duration = "10m",
                b_source = "os-counters";
    uint64_t b_seed = 42;
    size_t b_samples = 10'000;
    auto* bench = app.add_subcommand("bench", "overhead and latency experiments");
    bench->add_option("mode", b_mode, "freq-sweep|budget-sweep|jit|plotdata")->required();
    bench->add_option("--out", b_out, "output directory");
    bench->add_option("--seed", b_seed, "dataset seed");
    bench->add_option("--intervals", b_intervals, "freq-sweep collection intervals");
    bench->add_option("--duration-per-point", b_point, "freq-sweep dwell per interval");
    bench->add_option("--budgets", b_budgets, "budget-sweep cpu budgets");
    bench->add_option("--samples", b_samples, "budget-sweep dataset size");
    bench->add_option("--interval", b_jit_interval, "jit collection interval");
    bench->add_option("--algo", b_jit_algo, "jit detector algorithm");
    bench->add_option("--duration", b_jit_duration, "jit run length");
    bench->add_option("--source", b_source, "collector source for sweeps");

    // pipeline
    std::string p_replay, p_interval = "500ms", p_tags, p_algo = "birch", p_params, p_deps,
                p_catalogue, p_journal, p_repo, p_duration;
    auto* pipeline = app.add_subcommand("pipeline", "collector->detector->rca->engine in-process");
    pipeline->add_option("--replay", p_replay, "replay endpoint instead of live collection");
    pipeline->add_option("--interval", p_interval, "live collection interval");
    pipeline->add_option("--tags", p_tags, "live collection tags");
    pipeline->add_option("--algo", p_algo, "detector algorithm");
    pipeline->add_option("--params", p_params, "detector parameter overrides");
    pipeline->add_option("--deps", p_deps, "dependency model NDJSON")->required();
    pipeline->add_option("--catalogue", p_catalogue, "action catalogue NDJSON")->required();
    pipeline->add_option("--journal", p_journal, "bus journal directory")->required();
    pipeline->add_option("--repo", p_repo, "model repository for warm starts");
    pipeline->add_option("--duration", p_duration, "live mode run length");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? 0 : 1;
    }

    try {
        if (collect->parsed())
            return cmd_collect(c_interval, c_tags, c_out, c_report, c_source, c_duration);
        if (detect->parsed())
            return cmd_detect(d_algo, d_in, d_events, d_params, d_repo, d_warm, d_checkpoint,
                              d_step);
        if (rca->parsed()) return cmd_rca(r_deps, r_journal, r_events_in, r_gap, r_lateness);
        if (engine->parsed()) return cmd_engine(e_catalogue, e_journal, e_floor);
        if (orchestrate->parsed())
            return cmd_orchestrate(o_objects, o_dry, o_tick, o_once, o_max_ticks, o_plan_out);
        if (models->parsed()) return cmd_models(m_verb, m_repo, m_key, m_file, m_version);
        if (bench->parsed())
            return cmd_bench(b_mode, b_out, b_seed, b_intervals, b_point, b_budgets, b_samples,
                             b_jit_interval, b_jit_algo, b_jit_duration, b_source);
        if (pipeline->parsed())
            return cmd_pipeline(p_replay, p_interval, p_tags, p_algo, p_params, p_deps,
                                p_catalogue, p_journal, p_repo, p_duration);
    } catch (const std::exception& e) {
        log::error("%s", e.what());
        return 2;
    }
    return 1;
}
