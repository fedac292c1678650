#include "zerops/detector.hpp"

#include <cmath>
#include <sstream>

#include "zerops/errors.hpp"
#include "zerops/wire.hpp"

namespace zerops {

nlohmann::json AnomalyEvent::to_json() const {
    return {{"component", component},        {"ts_ns", timestamp_ns},
            {"detector", zerops::to_string(detector)}, {"error", error},
            {"threshold", threshold},        {"per_metric_error", per_metric_error}};
}

AnomalyEvent AnomalyEvent::from_json(const nlohmann::json& j) {
    AnomalyEvent e;
    e.component = j.at("component").get<std::string>();
    e.timestamp_ns = j.at("ts_ns").get<uint64_t>();
    e.detector = detector_kind_from_string(j.at("detector").get<std::string>());
    e.error = j.at("error").get<double>();
    e.threshold = j.at("threshold").get<double>();
    e.per_metric_error = j.at("per_metric_error").get<std::vector<double>>();
    return e;
}

void DetectorConfig::apply_params(const std::string& spec) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const size_t eq = item.find('=');
        if (eq == std::string::npos)
            throw ConfigError("malformed detector parameter '" + item + "', expected k=v");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            if (key == "T") birch.distance_threshold = std::stod(value);
            else if (key == "M") birch.max_clusters = std::stoul(value);
            else if (key == "decay" || key == "lambda") birch.decay = std::stod(value);
            else if (key == "prune_floor") birch.prune_floor = std::stod(value);
            else if (key == "p") arima.p = std::stoi(value);
            else if (key == "d") arima.d = std::stoi(value);
            else if (key == "q") arima.q = std::stoi(value);
            else if (key == "forgetting") arima.forgetting = std::stod(value);
            else if (key == "H") rnn.hidden_dim = std::stoul(value);
            else if (key == "lr") rnn.learning_rate = std::stod(value);
            else if (key == "seed") rnn.seed = std::stoull(value);
            else if (key == "init_scale") rnn.init_scale = std::stod(value);
            else if (key == "alpha") threshold_alpha = std::stod(value);
            else if (key == "c") threshold_sigma = std::stod(value);
            else if (key == "W") threshold_warmup = std::stoull(value);
            else if (key == "dim") dim = std::stoul(value);
            else throw ConfigError("unknown detector parameter '" + key + "'");
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("invalid value '" + value + "' for detector parameter '" + key +
                              "'");
        }
    }
}

namespace {

std::variant<BirchState, ArimaState, RnnState> make_identity(const DetectorConfig& config) {
    switch (config.kind) {
        case DetectorKind::birch: return BirchState{config.birch, {}};
        case DetectorKind::arima: return ArimaState(config.dim, config.arima);
        case DetectorKind::rnn: {
            RnnParams params = config.rnn;
            params.input_dim = config.dim;
            return RnnState::init(params);
        }
    }
    throw ConfigError("unknown detector kind");
}

void put_vec(std::vector<uint8_t>& out, const std::vector<double>& v) {
    wire::put_u32(out, static_cast<uint32_t>(v.size()));
    for (double x : v) wire::put_f64(out, x);
}

std::vector<double> get_vec(wire::Reader& r) {
    const uint32_t n = r.u32();
    std::vector<double> v(n);
    for (uint32_t i = 0; i < n; ++i) v[i] = r.f64();
    return v;
}

void put_str(std::vector<uint8_t>& out, const std::string& s) {
    wire::put_u32(out, static_cast<uint32_t>(s.size()));
    wire::put_bytes(out, s);
}

std::string get_str(wire::Reader& r) { return r.bytes(r.u32()); }

}  // namespace

Detector::Detector(DetectorConfig config)
    : config_(std::move(config)),
      standardizer_(config_.dim),
      identity_(make_identity(config_)),
      threshold_{config_.threshold_alpha, config_.threshold_sigma, config_.threshold_warmup} {
    if (config_.dim == 0) throw ConfigError("detector dimension must be positive");
}

std::optional<AnomalyEvent> Detector::process(const Sample& sample) {
    if (sample.values.size() != config_.dim)
        throw CodecError("detector expects " + std::to_string(config_.dim) +
                         " metrics, sample has " + std::to_string(sample.values.size()));
    const std::vector<double> z = standardizer_.standardize(sample.values);

    std::vector<double> reconstruction;
    if (auto* birch = std::get_if<BirchState>(&identity_)) {
        reconstruction = birch_insert(*birch, z).reconstruction;
    } else if (auto* arima = std::get_if<ArimaState>(&identity_)) {
        reconstruction = arima_step(*arima, z).prediction;
    } else {
        reconstruction = rnn_step(std::get<RnnState>(identity_), z).prediction;
    }

    std::vector<double> per_metric(config_.dim);
    double sum2 = 0.0;
    for (size_t i = 0; i < config_.dim; ++i) {
        const double diff = z[i] - reconstruction[i];
        per_metric[i] = std::fabs(diff);
        sum2 += diff * diff;
    }
    const double error = std::sqrt(sum2);

    const ThresholdDecision decision = threshold_update(threshold_, error);
    last_ = {error, decision.threshold, decision.is_anomaly};
    ++seen_;

    if (!decision.is_anomaly) return std::nullopt;
    AnomalyEvent event;
    event.component = config_.component.empty() ? component_id(sample) : config_.component;
    event.timestamp_ns = sample.timestamp_ns;
    event.detector = config_.kind;
    event.error = error;
    event.threshold = decision.threshold;
    event.per_metric_error = std::move(per_metric);
    return event;
}

ModelBlob Detector::snapshot() const {
    std::vector<uint8_t> out;
    wire::put_u8(out, static_cast<uint8_t>(config_.kind));
    wire::put_u64(out, config_.dim);
    put_str(out, config_.component);
    wire::put_u64(out, seen_);

    wire::put_u64(out, standardizer_.count());
    wire::put_u64(out, standardizer_.nonfinite_replacements());
    put_vec(out, standardizer_.mean());
    put_vec(out, standardizer_.m2());

    wire::put_f64(out, threshold_.alpha);
    wire::put_f64(out, threshold_.sigma_mult);
    wire::put_u64(out, threshold_.warmup);
    wire::put_f64(out, threshold_.mean);
    wire::put_f64(out, threshold_.sq_dev);
    wire::put_u64(out, threshold_.count);

    if (const auto* birch = std::get_if<BirchState>(&identity_)) {
        wire::put_f64(out, birch->params.distance_threshold);
        wire::put_u64(out, birch->params.max_clusters);
        wire::put_f64(out, birch->params.decay);
        wire::put_f64(out, birch->params.prune_floor);
        wire::put_u32(out, static_cast<uint32_t>(birch->clusters.size()));
        for (const auto& c : birch->clusters) {
            wire::put_f64(out, c.n);
            put_vec(out, c.ls);
            wire::put_f64(out, c.ss);
        }
    } else if (const auto* arima = std::get_if<ArimaState>(&identity_)) {
        wire::put_u32(out, static_cast<uint32_t>(arima->params.p));
        wire::put_u32(out, static_cast<uint32_t>(arima->params.d));
        wire::put_u32(out, static_cast<uint32_t>(arima->params.q));
        wire::put_f64(out, arima->params.forgetting);
        wire::put_f64(out, arima->params.init_cov);
        wire::put_f64(out, arima->params.cond_cap);
        for (const auto& model : arima->models) {
            const auto raw = model.raw();
            wire::put_u64(out, raw.observed);
            put_vec(out, raw.raw_lags);
            put_vec(out, raw.diff_lags);
            put_vec(out, raw.resid_lags);
            put_vec(out, raw.coeff);
            put_vec(out, raw.cov);
            wire::put_u64(out, raw.reconditions);
        }
    } else {
        const auto& net = std::get<RnnState>(identity_);
        wire::put_u64(out, net.params.input_dim);
        wire::put_u64(out, net.params.hidden_dim);
        wire::put_f64(out, net.params.learning_rate);
        wire::put_f64(out, net.params.init_scale);
        wire::put_u64(out, net.params.seed);
        put_vec(out, net.wx);
        put_vec(out, net.wh);
        put_vec(out, net.b);
        put_vec(out, net.wy);
        put_vec(out, net.by);
        put_vec(out, net.h);
        put_vec(out, net.c);
        wire::put_u8(out, net.has_cache ? 1 : 0);
        if (net.has_cache) {
            put_vec(out, net.cache_x);
            put_vec(out, net.cache_h_prev);
            put_vec(out, net.cache_c_prev);
            put_vec(out, net.cache_i);
            put_vec(out, net.cache_f);
            put_vec(out, net.cache_g);
            put_vec(out, net.cache_o);
            put_vec(out, net.cache_c_new);
        }
        wire::put_u64(out, net.skipped_updates);
    }

    ModelBlob blob;
    blob.detector_type = config_.kind;
    blob.payload = std::move(out);
    return blob;
}

Detector Detector::restore(const ModelBlob& blob) {
    wire::Reader r(blob.payload);
    DetectorConfig config;
    const uint8_t kind_tag = r.u8();
    if (kind_tag < 1 || kind_tag > 3)
        throw RepoError("model payload has unknown detector kind tag " + std::to_string(kind_tag));
    config.kind = static_cast<DetectorKind>(kind_tag);
    if (config.kind != blob.detector_type)
        throw RepoError(std::string("model payload kind '") + zerops::to_string(config.kind) +
                        "' disagrees with blob tag '" + zerops::to_string(blob.detector_type) +
                        "'");
    config.dim = r.u64();
    config.component = get_str(r);
    const uint64_t seen = r.u64();

    const uint64_t std_count = r.u64();
    const uint64_t std_nonfinite = r.u64();
    auto std_mean = get_vec(r);
    auto std_m2 = get_vec(r);

    config.threshold_alpha = r.f64();
    config.threshold_sigma = r.f64();
    config.threshold_warmup = r.u64();
    const double thr_mean = r.f64();
    const double thr_sq_dev = r.f64();
    const uint64_t thr_count = r.u64();

    std::variant<BirchState, ArimaState, RnnState> identity{BirchState{}};
    switch (config.kind) {
        case DetectorKind::birch: {
            BirchState state;
            state.params.distance_threshold = r.f64();
            state.params.max_clusters = r.u64();
            state.params.decay = r.f64();
            state.params.prune_floor = r.f64();
            const uint32_t count = r.u32();
            state.clusters.reserve(count);
            for (uint32_t i = 0; i < count; ++i) {
                MicroCluster c;
                c.n = r.f64();
                c.ls = get_vec(r);
                c.ss = r.f64();
                state.clusters.push_back(std::move(c));
            }
            config.birch = state.params;
            identity = std::move(state);
            break;
        }
        case DetectorKind::arima: {
            ArimaParams params;
            params.p = static_cast<int>(r.u32());
            params.d = static_cast<int>(r.u32());
            params.q = static_cast<int>(r.u32());
            params.forgetting = r.f64();
            params.init_cov = r.f64();
            params.cond_cap = r.f64();
            ArimaState state(config.dim, params);
            for (auto& model : state.models) {
                ArimaModel::Raw raw;
                raw.observed = r.u64();
                raw.raw_lags = get_vec(r);
                raw.diff_lags = get_vec(r);
                raw.resid_lags = get_vec(r);
                raw.coeff = get_vec(r);
                raw.cov = get_vec(r);
                raw.reconditions = r.u64();
                model.load(std::move(raw));
            }
            config.arima = params;
            identity = std::move(state);
            break;
        }
        case DetectorKind::rnn: {
            RnnState net;
            net.params.input_dim = r.u64();
            net.params.hidden_dim = r.u64();
            net.params.learning_rate = r.f64();
            net.params.init_scale = r.f64();
            net.params.seed = r.u64();
            net.wx = get_vec(r);
            net.wh = get_vec(r);
            net.b = get_vec(r);
            net.wy = get_vec(r);
            net.by = get_vec(r);
            net.h = get_vec(r);
            net.c = get_vec(r);
            net.has_cache = r.u8() != 0;
            if (net.has_cache) {
                net.cache_x = get_vec(r);
                net.cache_h_prev = get_vec(r);
                net.cache_c_prev = get_vec(r);
                net.cache_i = get_vec(r);
                net.cache_f = get_vec(r);
                net.cache_g = get_vec(r);
                net.cache_o = get_vec(r);
                net.cache_c_new = get_vec(r);
            }
            net.skipped_updates = r.u64();
            config.rnn = net.params;
            identity = std::move(net);
            break;
        }
    }

    Detector detector(config);
    detector.seen_ = seen;
    detector.standardizer_.load(std_count, std::move(std_mean), std::move(std_m2), std_nonfinite);
    detector.threshold_.mean = thr_mean;
    detector.threshold_.sq_dev = thr_sq_dev;
    detector.threshold_.count = thr_count;
    detector.identity_ = std::move(identity);
    return detector;
}

Detector Detector::restore_as(DetectorKind expected, const ModelBlob& blob) {
    if (blob.detector_type != expected)
        throw RepoError(std::string("cannot restore: expected detector type '") +
                        zerops::to_string(expected) + "', blob holds '" +
                        zerops::to_string(blob.detector_type) + "'");
    return restore(blob);
}

}  // namespace zerops
