#pragma once

// One IFTM detector per monitored component: standardize the incoming sample,
// reconstruct it with the configured identity function, and flag it when the
// reconstruction error crosses the dynamic threshold.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zerops/arima.hpp"
#include "zerops/birch.hpp"
#include "zerops/model_blob.hpp"
#include "zerops/rnn.hpp"
#include "zerops/sample.hpp"
#include "zerops/standardizer.hpp"
#include "zerops/threshold.hpp"

namespace zerops {

struct AnomalyEvent {
    std::string component;
    uint64_t timestamp_ns = 0;
    DetectorKind detector = DetectorKind::birch;
    double error = 0.0;
    double threshold = 0.0;
    std::vector<double> per_metric_error;

    nlohmann::json to_json() const;
    static AnomalyEvent from_json(const nlohmann::json& j);
};

struct DetectorConfig {
    DetectorKind kind = DetectorKind::birch;
    size_t dim = 28;
    std::string component;  // empty: derive from each sample's tags

    BirchParams birch;
    ArimaParams arima;
    RnnParams rnn;

    double threshold_alpha = 0.05;
    double threshold_sigma = 3.0;
    uint64_t threshold_warmup = 50;

    // Parses "k=v,k=v" overrides (e.g. "T=2.5,alpha=0.2,H=16").
    void apply_params(const std::string& spec);
};

struct DetectResult {
    double error = 0.0;
    double threshold = 0.0;
    bool is_anomaly = false;
};

class Detector {
public:
    explicit Detector(DetectorConfig config);

    // Full IFTM step; returns an event only when the sample is flagged.
    std::optional<AnomalyEvent> process(const Sample& sample);

    DetectorKind kind() const { return config_.kind; }
    size_t dim() const { return config_.dim; }
    const std::string& component() const { return config_.component; }
    const DetectResult& last() const { return last_; }
    const ThresholdModel& threshold_model() const { return threshold_; }
    uint64_t samples_seen() const { return seen_; }

    // State round-trips bit-exactly: a restored detector produces the same
    // outputs as the original on any subsequent input sequence.
    ModelBlob snapshot() const;
    static Detector restore(const ModelBlob& blob);
    // Restore into a slot that expects a specific detector type.
    static Detector restore_as(DetectorKind expected, const ModelBlob& blob);

private:
    DetectorConfig config_;
    Standardizer standardizer_;
    std::variant<BirchState, ArimaState, RnnState> identity_;
    ThresholdModel threshold_;
    DetectResult last_;
    uint64_t seen_ = 0;
};

}  // namespace zerops
